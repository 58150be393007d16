#pragma once

// Seeded random PL maps for property tests and the self-test suite.

#include "pldeg/degree.hpp"
#include "pldeg/meshgen.hpp"
#include "pldeg/random.hpp"

namespace pldeg {

/// Smooth displacement x + sum_k a_k sin(w_k . x + phase_k) v_k.
template <int D>
struct SmoothWarp {
  struct Mode {
    Point<D> frequency, direction;
    double phase = 0.0;
  };
  std::vector<Mode> modes;
  double amplitude = 0.0;

  Point<D> operator()(const Point<D>& x) const {
    Point<D> y = x;
    for (const auto& m : modes) y += amplitude * std::sin(m.frequency.dot(x) + m.phase) * m.direction;
    return y;
  }

  static SmoothWarp random(Rng& rng, double scale, int mode_count = 3) {
    SmoothWarp w;
    for (int k = 0; k < mode_count; ++k) {
      Mode m;
      for (int i = 0; i < D; ++i) {
        m.frequency(i) = rng.uniform(-2.0, 2.0) * std::numbers::pi / scale;
        m.direction(i) = rng.normal();
      }
      m.direction /= std::max(m.direction.norm(), 1e-12);
      m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      w.modes.push_back(m);
    }
    w.amplitude = rng.uniform(0.05, 0.3) * scale;
    return w;
  }
};

/// Random smooth warp of the mesh with det > 0 on every simplex; the
/// amplitude is halved until the map is orientation preserving.
template <int D>
PLMap<D> random_orientation_preserving(std::shared_ptr<const SimplicialMesh<D>> mesh, Rng& rng) {
  const double scale = mesh->diameter();
  auto warp = SmoothWarp<D>::random(rng, scale);
  // Random rotation/dilation on top keeps orientation.
  Matrix<D> a = Matrix<D>::Identity();
  if constexpr (D == 2) {
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    a << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  } else {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    a = q.normalized().toRotationMatrix();
  }
  a *= rng.uniform(0.5, 2.0);
  Point<D> shift;
  for (int i = 0; i < D; ++i) shift(i) = rng.uniform(-1.0, 1.0);
  for (int attempt = 0; attempt < 60; ++attempt) {
    PLMap<D> map(mesh, map_vertices<D>(*mesh, [&](const Point<D>& x) -> Point<D> { return a * warp(x) + shift; }));
    if (map.all_positive()) return map;
    warp.amplitude *= 0.5;
  }
  return PLMap<D>(mesh, map_vertices<D>(*mesh, [&](const Point<D>& x) -> Point<D> { return a * x + shift; }));
}

/// Random map with the boundary fixed to a smooth injective warp and the
/// interior vertices displaced freely, so folds of either orientation occur.
template <int D>
PLMap<D> random_folded(std::shared_ptr<const SimplicialMesh<D>> mesh, Rng& rng, double interior_noise) {
  const auto base = random_orientation_preserving<D>(mesh, rng);
  auto images = base.images();
  const double h = mesh->diameter();
  for (std::size_t v = 0; v < images.size(); ++v) {
    if (mesh->is_boundary_vertex(static_cast<int>(v))) continue;
    for (int i = 0; i < D; ++i) images[v](i) += interior_noise * h * rng.normal();
  }
  return PLMap<D>(mesh, std::move(images));
}

/// Rectangle mesh with a random cell count and 2*nx*ny in [lo, hi] simplices.
inline SimplicialMesh<2> random_rectangle_mesh(Rng& rng, int lo = 8, int hi = 200) {
  while (true) {
    const int nx = 1 + static_cast<int>(rng.index(10));
    const int ny = 1 + static_cast<int>(rng.index(10));
    if (2 * nx * ny < lo || 2 * nx * ny > hi) continue;
    return rectangle_mesh(nx, ny, Point<2>(0, 0), Point<2>(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)));
  }
}

/// Point drawn uniformly from the image bounding box enlarged by 10%.
template <int D>
Point<D> random_value(const PLMap<D>& map, Rng& rng) {
  auto box = bounding_box<D>(map.images());
  const Point<D> pad = 0.1 * (box.hi - box.lo);
  Point<D> z;
  for (int i = 0; i < D; ++i) z(i) = rng.uniform(box.lo(i) - pad(i), box.hi(i) + pad(i));
  return z;
}

}  // namespace pldeg
