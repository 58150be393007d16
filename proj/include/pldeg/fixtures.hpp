#pragma once

// Explicit example deformations with known degree values.
//
// Smooth boundaries are polygonalized at resolution n; integer expectations
// are only claimed at query points farther than 4/n from the image boundary.

#include "pldeg/degree.hpp"
#include "pldeg/meshgen.hpp"

#include <map>
#include <string>

namespace pldeg {

enum class Basis { Published, Derived };

inline std::string_view to_string(Basis b) { return b == Basis::Published ? "published" : "derived"; }

struct Expectation {
  std::string kind;  // "degree" or "preimage_count"
  Point<2> query;
  int expected = 0;
  Basis basis = Basis::Derived;
  std::string note;
};

struct Fixture {
  std::string name;
  int resolution = 0;
  std::shared_ptr<const SimplicialMesh<2>> mesh;
  PLMap<2> map;
  std::vector<Expectation> expectations;
};

// ---------------------------------------------------------------------------

/// Disk B_1(0) with vertex images r e^{2 i phi}.
inline Fixture fixture_angle_doubling(int n) {
  if (n < 16 || n % 2 != 0) throw Error(ErrorCode::InvalidInput, "angle-doubling needs even n >= 16");
  auto mesh = share(disk_mesh(n, std::max(2, n / 4)));
  auto images = map_vertices<2>(*mesh, [](const Point<2>& x) {
    const double r = x.norm();
    const double phi = std::atan2(x.y(), x.x());
    return Point<2>(r * std::cos(2 * phi), r * std::sin(2 * phi));
  });
  Fixture f{"angle-doubling", n, mesh, PLMap<2>(mesh, std::move(images)), {}};
  f.expectations.push_back({"degree", Point<2>(0.3, 0.2), 2, Basis::Published, "degree 2 near the origin"});
  const double rho = 0.5 * (1.0 - 2.0 * std::numbers::pi / n);
  f.expectations.push_back({"preimage_count", Point<2>(rho * std::cos(0.7), rho * std::sin(0.7)), 2,
                            Basis::Published, "two antipodal preimages"});
  f.expectations.push_back({"degree", Point<2>(1.5, 0.2), 0, Basis::Derived, "outside the image"});
  return f;
}

/// Annulus B_2(0) minus closed B_1(0); the outer circle stays fixed and the
/// inner circle is translated to (3,0) + the unit circle.
inline Fixture fixture_annulus_translation(int n) {
  if (n < 32) throw Error(ErrorCode::InvalidInput, "annulus translation needs n >= 32");
  auto mesh = share(annulus_mesh(n, std::max(2, n / 8), 1.0, 2.0));
  auto images = map_vertices<2>(*mesh, [](const Point<2>& x) {
    const double r = x.norm();
    return Point<2>(2.0 * (r - 1.0) / r * x + (2.0 - r) / r * (x + Point<2>(3.0, 0.0)));
  });
  Fixture f{"annulus", n, mesh, PLMap<2>(mesh, std::move(images)), {}};
  f.expectations.push_back({"degree", Point<2>(0.0, 0.0), 1, Basis::Published, "inside the fixed outer circle"});
  f.expectations.push_back({"degree", Point<2>(3.0, 0.0), -1, Basis::Published, "inside the translated inner circle"});
  f.expectations.push_back({"degree", Point<2>(0.0, 5.0), 0, Basis::Derived, "unbounded region"});
  return f;
}

// ---------------------------------------------------------------------------
// Cone flip.

namespace detail {

/// Convex hull of the tip 0 and the ball tangent to the cone
/// {x . e > (1 - alpha)|x|} along |x| = r, with e = (1, 0).
struct CappedCone {
  double cos_t, sin_t, r;
  Point<2> center;
  double radius;

  CappedCone(double alpha, double r_) : r(r_) {
    cos_t = 1.0 - alpha;
    sin_t = std::sqrt(1.0 - cos_t * cos_t);
    center = Point<2>(r / cos_t, 0.0);
    radius = r * sin_t / cos_t;
  }
  bool contains(const Point<2>& x) const {
    if ((x - center).norm() < radius) return true;
    return x.x() > cos_t * x.norm() && x.x() < r * cos_t;
  }
  double perimeter() const { return 2.0 * r + radius * (std::numbers::pi + 2.0 * std::acos(cos_t)); }

  /// Counterclockwise arclength parametrization starting at the tip along the
  /// lower edge; returns the point and the outward unit normal.
  std::pair<Point<2>, Point<2>> at(double t) const {
    const double theta = std::acos(cos_t);
    const double arc = radius * (std::numbers::pi + 2.0 * theta);
    if (t <= r) return {t * Point<2>(cos_t, -sin_t), Point<2>(-sin_t, -cos_t)};
    if (t >= r + arc) return {(2.0 * r + arc - t) * Point<2>(cos_t, sin_t), Point<2>(-sin_t, cos_t)};
    const double a = -0.5 * std::numbers::pi - theta + (t - r) / radius;
    const Point<2> n(std::cos(a), std::sin(a));
    return {center + radius * n, n};
  }
};

}  // namespace detail

/// Omega = V_2 minus closed V_1 for two capped cones sharing their tip. Each
/// point of the strip mesh lies on the normal segment from Q on the inner
/// boundary to P on the outer one, x = Q + s (P - Q); its image is
/// s P + (1 - s) R Q with R the reflection across {x . e = 0}. With
/// `compose`, F(z) = (z1, z1 z2) is applied to the images.
inline Fixture fixture_cone_flip(int n, bool compose = true) {
  if (n < 32) throw Error(ErrorCode::InvalidInput, "cone flip needs n >= 32");
  const detail::CappedCone inner(1.0 / 3.0, 1.0), outer(2.0 / 3.0, 2.0);
  const int layers = std::max(4, n / 4);
  const double length = inner.perimeter();

  std::vector<Point<2>> vertices{Point<2>::Zero()};
  std::vector<Point<2>> images{Point<2>::Zero()};
  auto id = [layers](int column, int k) { return 1 + (column - 1) * (layers + 1) + k; };
  for (int i = 1; i < n; ++i) {
    const auto [q, normal] = inner.at(length * i / n);
    // Exit point of the normal ray from V_2 by bisection on the convex membership test.
    double lo = 0.0, hi = 1.0;
    while (outer.contains(q + hi * normal)) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (outer.contains(q + mid * normal) ? lo : hi) = mid;
    }
    const Point<2> p = q + 0.5 * (lo + hi) * normal;
    const Point<2> rq(-q.x(), q.y());
    for (int k = 0; k <= layers; ++k) {
      const double s = static_cast<double>(k) / layers;
      vertices.push_back(q + s * (p - q));
      images.push_back(s * p + (1.0 - s) * rq);
    }
  }
  std::vector<SimplexIndices<2>> simplices;
  for (int k = 0; k < layers; ++k) {
    simplices.push_back({0, id(1, k), id(1, k + 1)});
    simplices.push_back({0, id(n - 1, k + 1), id(n - 1, k)});
  }
  for (int i = 1; i + 1 < n; ++i)
    for (int k = 0; k < layers; ++k) {
      simplices.push_back({id(i, k), id(i + 1, k), id(i + 1, k + 1)});
      simplices.push_back({id(i, k), id(i + 1, k + 1), id(i, k + 1)});
    }
  if (compose)
    for (auto& z : images) z = Point<2>(z.x(), z.x() * z.y());
  auto mesh = share(build_mesh<2>(std::move(vertices), std::move(simplices)));
  Fixture f{compose ? "cone-flip" : "cone-flip-intermediate", n, mesh, PLMap<2>(mesh, std::move(images)), {}};
  f.expectations.push_back({"degree", Point<2>(1.0, 0.0), 1, Basis::Published, "value e"});
  f.expectations.push_back(
      {"degree", Point<2>(-1.0, 0.0), compose ? -1 : 1, Basis::Published, compose ? "value -e, sign flipped" : "value -e"});
  return f;
}

// ---------------------------------------------------------------------------
// Stacked holes.

namespace detail {

struct VertexPool {
  std::vector<Point<2>> points;
  std::map<std::pair<long long, long long>, int> index;
  double quantum;

  explicit VertexPool(double q) : quantum(q) {}
  int add(const Point<2>& p) {
    const std::pair<long long, long long> key{std::llround(p.x() / quantum), std::llround(p.y() / quantum)};
    auto [it, inserted] = index.emplace(key, static_cast<int>(points.size()));
    if (inserted) points.push_back(p);
    return it->second;
  }
};

}  // namespace detail

/// Row of |target| unit tiles, each with a circular hole of radius 1/4. The
/// outer boundary is fixed; hole i is mapped onto the circle of radius
/// 0.5 + 0.3 i about a common centre C below the row, reversed when
/// target > 0 so that every hole adds sign(target) to the degree at C.
/// Interior vertices follow a discrete harmonic extension.
inline Fixture fixture_stacked_holes(int n_holes, int target, int n = 32) {
  if (n_holes < 1 || n_holes != std::abs(target))
    throw Error(ErrorCode::InvalidInput, "stacked holes needs n_holes = |target| >= 1");
  if (n < 16 || n % 8 != 0) throw Error(ErrorCode::InvalidInput, "stacked holes needs n >= 16, a multiple of 8");
  const int layers = std::max(3, n / 8);
  const double hole = 0.25;
  detail::VertexPool pool(1e-9);
  std::vector<SimplexIndices<2>> simplices;
  std::vector<std::pair<int, double>> hole_vertex;  // (hole, angle) per vertex on a hole circle
  std::map<int, std::pair<int, double>> on_hole;
  for (int h = 0; h < n_holes; ++h) {
    const Point<2> c(h + 0.5, 0.5);
    std::vector<std::vector<int>> ring(layers + 1, std::vector<int>(n));
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n;
      const Point<2> u(std::cos(phi), std::sin(phi));
      const double rs = 0.5 / std::max(std::abs(u.x()), std::abs(u.y()));
      for (int k = 0; k <= layers; ++k) {
        const double r = hole + (rs - hole) * k / layers;
        ring[k][j] = pool.add(c + r * u);
      }
      on_hole[ring[0][j]] = {h, phi};
    }
    for (int k = 0; k < layers; ++k)
      for (int j = 0; j < n; ++j) {
        const int jn = (j + 1) % n;
        simplices.push_back({ring[k][j], ring[k][jn], ring[k + 1][jn]});
        simplices.push_back({ring[k][j], ring[k + 1][jn], ring[k + 1][j]});
      }
  }
  auto mesh = share(build_mesh<2>(std::move(pool.points), std::move(simplices)));

  const double outer_radius = 0.5 + 0.3 * (n_holes - 1);
  const Point<2> center(0.5 * n_holes + 0.0123, -outer_radius - 0.3);
  std::vector<Point<2>> images = mesh->vertices();
  std::vector<char> fixed(images.size(), 0);
  for (std::size_t v = 0; v < images.size(); ++v) {
    if (!mesh->is_boundary_vertex(static_cast<int>(v))) continue;
    fixed[v] = 1;
    auto it = on_hole.find(static_cast<int>(v));
    if (it == on_hole.end()) continue;
    const auto [h, phi] = it->second;
    const double a = target > 0 ? -phi : phi;
    images[v] = center + (0.5 + 0.3 * h) * Point<2>(std::cos(a), std::sin(a));
  }
  std::vector<std::vector<int>> adjacency(images.size());
  for (const auto& s : mesh->simplices())
    for (int i = 0; i <= 2; ++i)
      for (int j = 0; j <= 2; ++j)
        if (i != j) adjacency[s[i]].push_back(s[j]);
  for (auto& a : adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  for (int it = 0; it < 4000; ++it) {
    double change = 0.0;
    for (std::size_t v = 0; v < images.size(); ++v) {
      if (fixed[v]) continue;
      Point<2> avg = Point<2>::Zero();
      for (int w : adjacency[v]) avg += images[w];
      avg /= static_cast<double>(adjacency[v].size());
      change = std::max(change, (avg - images[v]).norm());
      images[v] = avg;
    }
    if (change < 1e-12) break;
  }
  Fixture f{"stacked", n, mesh, PLMap<2>(mesh, std::move(images)), {}};
  f.expectations.push_back({"degree", center, target, Basis::Derived, "common centre of the hole images"});
  return f;
}

// ---------------------------------------------------------------------------
// Wrapped strips: self-contact and overlap.

/// Strip [0, 2 (m + extra) / m] x [0, 1] with m + extra columns, wrapped by
/// y = (1 + x2)(cos(-pi x1), sin(-pi x1)). With extra = 0 the two short
/// sides meet along a radial segment (self-contact with det > 0 everywhere);
/// with extra > 0 the last `extra` columns cover the first ones exactly once
/// more. Overlapping vertex images are snapped to identical values.
inline Fixture fixture_wrap(int m, int extra = 0, int rows = 0) {
  if (m < 8) throw Error(ErrorCode::InvalidInput, "wrap needs m >= 8");
  if (extra < 0 || extra >= m) throw Error(ErrorCode::InvalidInput, "wrap needs 0 <= extra < m");
  if (rows <= 0) rows = std::max(2, m / 8);
  const int nx = m + extra;
  auto mesh = share(rectangle_mesh(nx, rows, Point<2>(0, 0), Point<2>(2.0 * nx / m, 1.0)));
  std::vector<Point<2>> images(mesh->vertex_count());
  for (int j = 0; j <= rows; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int col = i % m;
      const double a = -2.0 * std::numbers::pi * col / m;
      const double r = 1.0 + static_cast<double>(j) / rows;
      images[j * (nx + 1) + i] = Point<2>(r * std::cos(a), r * std::sin(a));
    }
  Fixture f{extra == 0 ? "wrap" : "overlap-wrap", m, mesh, PLMap<2>(mesh, std::move(images)), {}};
  f.expectations.push_back({"degree", Point<2>(-1.5, 0.01), 1, Basis::Derived, "inside the band"});
  f.expectations.push_back({"degree", Point<2>(0.0, 0.0), 0, Basis::Derived, "inside the inner circle"});
  if (extra > 0) {
    const double a = -2.0 * std::numbers::pi * 0.3 / m, r = 1.0 + 0.6 / rows;
    f.expectations.push_back({"degree", r * Point<2>(std::cos(a), std::sin(a)), 2, Basis::Derived,
                              "band covered twice"});
  }
  return f;
}

/// Exact area of the part of the wrap image covered twice.
inline double wrap_overlap_area(int m, int extra) {
  return 1.5 * extra * std::sin(2.0 * std::numbers::pi / m);
}

/// Rectangle [0,2] x [0,1] on an 8 x 8 grid whose vertical segment
/// {1} x [0, 1/4] is collapsed onto the boundary point (1, 0); the column
/// above it is compressed affinely. det >= 0 with equality on the simplices
/// along the segment.
inline Fixture fixture_collapse() {
  auto mesh = share(rectangle_mesh(8, 8, Point<2>(0, 0), Point<2>(2, 1)));
  auto images = map_vertices<2>(*mesh, [](const Point<2>& x) {
    const double t = 0.25 * std::max(0.0, 1.0 - std::abs(x.x() - 1.0) / 0.25);
    return Point<2>(x.x(), std::max(0.0, x.y() - t) / (1.0 - t));
  });
  Fixture f{"collapse", 8, mesh, PLMap<2>(mesh, std::move(images)), {}};
  f.expectations.push_back({"degree", Point<2>(0.61, 0.37), 1, Basis::Derived, "inside the image"});
  return f;
}

inline Fixture fixture_identity(int n = 8) {
  auto mesh = share(rectangle_mesh(n, n));
  Fixture f{"identity", n, mesh, identity_map(mesh), {}};
  f.expectations.push_back({"degree", Point<2>(0.503, 0.497), 1, Basis::Derived, "normalization"});
  return f;
}

inline std::vector<std::string> fixture_names() {
  return {"identity", "angle-doubling", "annulus", "cone-flip", "cone-flip-intermediate",
          "stacked", "wrap", "overlap-wrap", "collapse"};
}

/// Fixture by name; `n` is the resolution, `param` the hole count / target
/// degree for "stacked" and the extra column count for "overlap-wrap".
inline Fixture make_fixture(const std::string& name, int n, int param = 0) {
  if (name == "identity") return fixture_identity(n);
  if (name == "angle-doubling") return fixture_angle_doubling(n);
  if (name == "annulus") return fixture_annulus_translation(n);
  if (name == "cone-flip") return fixture_cone_flip(n, true);
  if (name == "cone-flip-intermediate") return fixture_cone_flip(n, false);
  if (name == "stacked") {
    const int target = param == 0 ? 2 : param;
    return fixture_stacked_holes(std::abs(target), target, std::max(16, n - n % 8));
  }
  if (name == "wrap") return fixture_wrap(n, 0);
  if (name == "overlap-wrap") return fixture_wrap(n, param == 0 ? std::max(1, n / 8) : param);
  if (name == "collapse") return fixture_collapse();
  throw Error(ErrorCode::InvalidInput, "unknown fixture '" + name + "'");
}

}  // namespace pldeg
