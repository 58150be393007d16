#pragma once

// Structured meshes used by the fixtures and the tests.

#include "pldeg/mesh.hpp"

#include <numbers>

namespace pldeg {

/// [lo, hi] split into nx*ny cells, two triangles per cell.
inline SimplicialMesh<2> rectangle_mesh(int nx, int ny, const Point<2>& lo = Point<2>(0, 0),
                                        const Point<2>& hi = Point<2>(1, 1)) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidInput, "rectangle_mesh needs nx, ny >= 1");
  std::vector<Point<2>> v;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<SimplexIndices<2>> t;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return build_mesh<2>(std::move(v), std::move(t));
}

namespace detail {

// Quads between consecutive closed rings of equal size.
inline void connect_rings(std::vector<SimplexIndices<2>>& t, int a0, int b0, int n) {
  for (int j = 0; j < n; ++j) {
    const int a = a0 + j, an = a0 + (j + 1) % n, b = b0 + j, bn = b0 + (j + 1) % n;
    t.push_back({a, an, bn});
    t.push_back({a, bn, b});
  }
}

}  // namespace detail

/// Disk of the given radius: a centre fan plus `rings` rings of n vertices.
/// The first vertex is the centre; ring k has radius radius*k/rings and its
/// vertices sit at angles 2*pi*j/n.
inline SimplicialMesh<2> disk_mesh(int n, int rings, double radius = 1.0, const Point<2>& center = Point<2>(0, 0)) {
  if (n < 3 || rings < 1) throw Error(ErrorCode::InvalidInput, "disk_mesh needs n >= 3, rings >= 1");
  std::vector<Point<2>> v{center};
  for (int k = 1; k <= rings; ++k) {
    const double r = radius * k / rings;
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n;
      v.push_back(center + r * Point<2>(std::cos(phi), std::sin(phi)));
    }
  }
  std::vector<SimplexIndices<2>> t;
  for (int j = 0; j < n; ++j) t.push_back({0, 1 + j, 1 + (j + 1) % n});
  for (int k = 1; k < rings; ++k) detail::connect_rings(t, 1 + (k - 1) * n, 1 + k * n, n);
  return build_mesh<2>(std::move(v), std::move(t));
}

/// Annulus r_in < |x - center| < r_out with `rings` layers of quads and n
/// vertices per ring; ring k has radius r_in + (r_out - r_in) k / rings.
inline SimplicialMesh<2> annulus_mesh(int n, int rings, double r_in, double r_out,
                                      const Point<2>& center = Point<2>(0, 0)) {
  if (n < 3 || rings < 1 || !(0.0 < r_in && r_in < r_out))
    throw Error(ErrorCode::InvalidInput, "annulus_mesh needs n >= 3, rings >= 1, 0 < r_in < r_out");
  std::vector<Point<2>> v;
  for (int k = 0; k <= rings; ++k) {
    const double r = r_in + (r_out - r_in) * k / rings;
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n;
      v.push_back(center + r * Point<2>(std::cos(phi), std::sin(phi)));
    }
  }
  std::vector<SimplexIndices<2>> t;
  for (int k = 0; k < rings; ++k) detail::connect_rings(t, k * n, (k + 1) * n, n);
  return build_mesh<2>(std::move(v), std::move(t));
}

/// Box [lo, hi] in 3D with n^3 cubes, each split into the 6 Kuhn tetrahedra
/// around the main diagonal.
inline SimplicialMesh<3> box_mesh(int nx, int ny, int nz, const Point<3>& lo = Point<3>(0, 0, 0),
                                  const Point<3>& hi = Point<3>(1, 1, 1)) {
  if (nx < 1 || ny < 1 || nz < 1) throw Error(ErrorCode::InvalidInput, "box_mesh needs positive counts");
  std::vector<Point<3>> v;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        v.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny,
                       lo.z() + (hi.z() - lo.z()) * k / nz);
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<SimplexIndices<3>> t;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& perm : perms) {
          std::array<int, 3> c{i, j, k};
          SimplexIndices<3> tet;
          tet[0] = id(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[perm[step]];
            tet[step + 1] = id(c[0], c[1], c[2]);
          }
          t.push_back(tet);
        }
  return build_mesh<3>(std::move(v), std::move(t));
}

/// Image of every mesh vertex under f.
template <int D, class F>
std::vector<Point<D>> map_vertices(const SimplicialMesh<D>& mesh, F&& f) {
  std::vector<Point<D>> images;
  images.reserve(mesh.vertex_count());
  for (const auto& v : mesh.vertices()) images.push_back(f(v));
  return images;
}

template <int D>
std::shared_ptr<const SimplicialMesh<D>> share(SimplicialMesh<D> mesh) {
  return std::make_shared<const SimplicialMesh<D>>(std::move(mesh));
}

}  // namespace pldeg
