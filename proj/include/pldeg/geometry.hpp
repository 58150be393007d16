#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace pldeg {

template <int D>
using Point = Eigen::Matrix<double, D, 1>;

template <int D>
using Matrix = Eigen::Matrix<double, D, D>;

/// Vertex positions of a (D-1)-dimensional facet embedded in R^D.
template <int D>
using FacetPoints = std::array<Point<D>, D>;

/// Vertex positions of a D-simplex.
template <int D>
using SimplexPoints = std::array<Point<D>, D + 1>;

constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

/// Columns are the edge vectors p_i - p_0.
template <int D>
Matrix<D> edge_matrix(const SimplexPoints<D>& p) {
  Matrix<D> e;
  for (int i = 0; i < D; ++i) e.col(i) = p[i + 1] - p[0];
  return e;
}

template <int D>
double signed_volume(const SimplexPoints<D>& p) {
  return edge_matrix<D>(p).determinant() / factorial(D);
}

template <int D>
Matrix<D> cofactor(const Matrix<D>& f) {
  Matrix<D> c;
  if constexpr (D == 2) {
    c << f(1, 1), -f(1, 0), -f(0, 1), f(0, 0);
  } else {
    static_assert(D == 3);
    const Eigen::Vector3d r0 = f.row(0), r1 = f.row(1), r2 = f.row(2);
    c.row(0) = r1.cross(r2);
    c.row(1) = r2.cross(r0);
    c.row(2) = r0.cross(r1);
  }
  return c;
}

template <int D>
struct BoundingBox {
  Point<D> lo = Point<D>::Constant(std::numeric_limits<double>::infinity());
  Point<D> hi = Point<D>::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Point<D>& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool empty() const { return (hi.array() < lo.array()).any(); }
  double diagonal() const { return empty() ? 0.0 : (hi - lo).norm(); }
  bool overlaps(const BoundingBox& o, double tol = 0.0) const {
    return ((lo.array() <= o.hi.array() + tol) && (o.lo.array() <= hi.array() + tol)).all();
  }
};

template <int D, class Range>
BoundingBox<D> bounding_box(const Range& points) {
  BoundingBox<D> box;
  for (const auto& p : points) box.extend(p);
  return box;
}

inline double cross2(const Point<2>& a, const Point<2>& b) { return a.x() * b.y() - a.y() * b.x(); }

template <int D>
Point<D> closest_on_segment(const Point<D>& p, const Point<D>& a, const Point<D>& b) {
  const Point<D> ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

// Ericson, Real-Time Collision Detection, 5.1.5.
inline Point<3> closest_on_triangle(const Point<3>& p, const Point<3>& a, const Point<3>& b,
                                    const Point<3>& c) {
  const Point<3> ab = b - a, ac = c - a, ap = p - a;
  if (ab.cross(ac).squaredNorm() <= 1e-300) {
    Point<3> best = closest_on_segment<3>(p, a, b);
    for (const Point<3>& q : {closest_on_segment<3>(p, b, c), closest_on_segment<3>(p, a, c)})
      if ((q - p).squaredNorm() < (best - p).squaredNorm()) best = q;
    return best;
  }
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Point<3> bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + (d1 / (d1 - d3)) * ab;
  const Point<3> cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Euclidean distance from z to a closed facet.
template <int D>
double facet_distance(const Point<D>& z, const FacetPoints<D>& f) {
  if constexpr (D == 2) {
    return (closest_on_segment<2>(z, f[0], f[1]) - z).norm();
  } else {
    return (closest_on_triangle(z, f[0], f[1], f[2]) - z).norm();
  }
}

/// Barycentric coordinates of z. The simplex must be non-degenerate.
template <int D>
Eigen::Matrix<double, D + 1, 1> barycentric(const Point<D>& z, const SimplexPoints<D>& p) {
  const Matrix<D> e = edge_matrix<D>(p);
  const Point<D> local = e.partialPivLu().solve(z - p[0]);
  Eigen::Matrix<double, D + 1, 1> lambda;
  lambda(0) = 1.0 - local.sum();
  lambda.template tail<D>() = local;
  return lambda;
}

/// Signed angle (2D) or signed solid angle (3D) subtended by an oriented facet at z.
/// Summed over a closed oriented boundary this gives 2*pi resp. 4*pi times the winding number.
template <int D>
double subtended_angle(const Point<D>& z, const FacetPoints<D>& f) {
  if constexpr (D == 2) {
    const Point<2> a = f[0] - z, b = f[1] - z;
    return std::atan2(cross2(a, b), a.dot(b));
  } else {
    // Van Oosterom and Strackee (1983).
    const Point<3> a = f[0] - z, b = f[1] - z, c = f[2] - z;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    return 2.0 * std::atan2(num, den);
  }
}

template <int D>
constexpr double full_angle() {
  return D == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

/// Area-weighted normal of an oriented facet: outward for boundary facets of a
/// positively oriented simplex.
template <int D>
Point<D> facet_normal(const FacetPoints<D>& f) {
  if constexpr (D == 2) {
    const Point<2> t = f[1] - f[0];
    return Point<2>(t.y(), -t.x());
  } else {
    return 0.5 * (f[1] - f[0]).cross(f[2] - f[0]);
  }
}

// ---------------------------------------------------------------------------
// Closed intersection predicates with an absolute tolerance.

inline double segment_segment_distance2(const Point<2>& a, const Point<2>& b, const Point<2>& c,
                                        const Point<2>& d) {
  const double o1 = cross2(b - a, c - a), o2 = cross2(b - a, d - a);
  const double o3 = cross2(d - c, a - c), o4 = cross2(d - c, b - c);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return 0.0;
  return std::min({(closest_on_segment<2>(a, c, d) - a).norm(), (closest_on_segment<2>(b, c, d) - b).norm(),
                   (closest_on_segment<2>(c, a, b) - c).norm(), (closest_on_segment<2>(d, a, b) - d).norm()});
}

inline bool segments_intersect(const Point<2>& a, const Point<2>& b, const Point<2>& c, const Point<2>& d,
                               double tol) {
  return segment_segment_distance2(a, b, c, d) <= tol;
}

namespace detail {

inline bool point_in_triangle_coplanar(const Point<3>& p, const Point<3>& a, const Point<3>& b,
                                       const Point<3>& c, double tol) {
  return (closest_on_triangle(p, a, b, c) - p).norm() <= tol;
}

inline bool segment_hits_triangle(const Point<3>& p, const Point<3>& q, const Point<3>& a, const Point<3>& b,
                                  const Point<3>& c, double tol) {
  Point<3> n = (b - a).cross(c - a);
  const double nn = n.norm();
  if (nn <= 1e-300) return false;
  n /= nn;
  const double dp = n.dot(p - a), dq = n.dot(q - a);
  if ((dp > tol && dq > tol) || (dp < -tol && dq < -tol)) return false;
  if (std::abs(dp) <= tol && std::abs(dq) <= tol) {
    // Coplanar: segment against triangle edges, or an endpoint inside.
    if (point_in_triangle_coplanar(p, a, b, c, tol) || point_in_triangle_coplanar(q, a, b, c, tol)) return true;
    const std::array<Point<3>, 3> v{a, b, c};
    for (int i = 0; i < 3; ++i) {
      // Project onto the triangle plane and use a 2D test in a local frame.
      const Point<3> u = (b - a).normalized();
      const Point<3> w = n.cross(u);
      auto to2 = [&](const Point<3>& x) { return Point<2>((x - a).dot(u), (x - a).dot(w)); };
      if (segments_intersect(to2(p), to2(q), to2(v[i]), to2(v[(i + 1) % 3]), tol)) return true;
    }
    return false;
  }
  const double t = std::clamp(dp / (dp - dq), 0.0, 1.0);
  const Point<3> x = p + t * (q - p);
  return point_in_triangle_coplanar(x, a, b, c, tol);
}

}  // namespace detail

/// Closed triangle-triangle intersection test in 3D with tolerance.
inline bool triangles_intersect(const FacetPoints<3>& t1, const FacetPoints<3>& t2, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (detail::segment_hits_triangle(t1[i], t1[(i + 1) % 3], t2[0], t2[1], t2[2], tol)) return true;
    if (detail::segment_hits_triangle(t2[i], t2[(i + 1) % 3], t1[0], t1[1], t1[2], tol)) return true;
  }
  return false;
}

/// Closed intersection of two facets (segments in 2D, triangles in 3D).
template <int D>
bool facets_intersect(const FacetPoints<D>& f, const FacetPoints<D>& g, double tol) {
  if constexpr (D == 2) {
    return segments_intersect(f[0], f[1], g[0], g[1], tol);
  } else {
    return triangles_intersect(f, g, tol);
  }
}

/// Separating-axis test for positive-measure overlap of two D-simplices.
/// Returns true when the interiors overlap by more than tol along every axis.
template <int D>
bool simplices_overlap(const SimplexPoints<D>& s, const SimplexPoints<D>& t, double tol) {
  auto separated_along = [&](const Point<D>& axis) {
    const double n = axis.norm();
    if (n <= 1e-300) return false;
    const Point<D> u = axis / n;
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    double tmin = smin, tmax = -smin;
    for (const auto& p : s) {
      smin = std::min(smin, u.dot(p));
      smax = std::max(smax, u.dot(p));
    }
    for (const auto& p : t) {
      tmin = std::min(tmin, u.dot(p));
      tmax = std::max(tmax, u.dot(p));
    }
    return smax <= tmin + tol || tmax <= smin + tol;
  };
  auto face_normals = [](const SimplexPoints<D>& p) {
    std::array<Point<D>, D + 1> normals;
    for (int i = 0; i <= D; ++i) {
      FacetPoints<D> f;
      int k = 0;
      for (int j = 0; j <= D; ++j)
        if (j != i) f[k++] = p[j];
      normals[i] = facet_normal<D>(f);
    }
    return normals;
  };
  for (const auto& n : face_normals(s))
    if (separated_along(n)) return false;
  for (const auto& n : face_normals(t))
    if (separated_along(n)) return false;
  if constexpr (D == 3) {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = k + 1; l < 4; ++l)
            if (separated_along((s[j] - s[i]).cross(t[l] - t[k]))) return false;
  }
  return true;
}

/// Distance between the closed segments [a,b] and [c,d] (Ericson 5.1.9).
template <int D>
double segment_distance(const Point<D>& a, const Point<D>& b, const Point<D>& c, const Point<D>& d) {
  const Point<D> d1 = b - a, d2 = d - c, r = a - c;
  const double aa = d1.squaredNorm(), ee = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (aa <= 1e-300 && ee <= 1e-300) return r.norm();
  if (aa <= 1e-300) {
    t = std::clamp(f / ee, 0.0, 1.0);
  } else {
    const double cc = d1.dot(r);
    if (ee <= 1e-300) {
      s = std::clamp(-cc / aa, 0.0, 1.0);
    } else {
      const double bb = d1.dot(d2), denom = aa * ee - bb * bb;
      s = denom > 0 ? std::clamp((bb * f - cc * ee) / denom, 0.0, 1.0) : 0.0;
      t = (bb * s + f) / ee;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-cc / aa, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((bb - cc) / aa, 0.0, 1.0);
      }
    }
  }
  return ((a + s * d1) - (c + t * d2)).norm();
}

/// Distance from z to a closed simplex (zero inside).
template <int D>
double simplex_distance(const Point<D>& z, const SimplexPoints<D>& p) {
  const auto lambda = barycentric<D>(z, p);
  if (lambda.minCoeff() >= 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= D; ++i) {
    FacetPoints<D> f;
    int k = 0;
    for (int j = 0; j <= D; ++j)
      if (j != i) f[k++] = p[j];
    best = std::min(best, facet_distance<D>(z, f));
  }
  return best;
}

/// Distance between a closed simplex and a closed facet whose interiors are
/// disjoint (vertex-to-cell and edge-to-edge candidates suffice for D <= 3).
template <int D>
double simplex_facet_distance(const SimplexPoints<D>& s, const FacetPoints<D>& f) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : f) best = std::min(best, simplex_distance<D>(v, s));
  for (const auto& v : s) best = std::min(best, facet_distance<D>(v, f));
  for (int i = 0; i <= D; ++i)
    for (int j = i + 1; j <= D; ++j)
      for (int k = 0; k < D; ++k)
        for (int l = k + 1; l < D; ++l) best = std::min(best, segment_distance<D>(s[i], s[j], f[k], f[l]));
  return best;
}

/// Closed facet versus axis-aligned box (separating-axis test).
template <int D>
bool facet_hits_box(const FacetPoints<D>& f, const Point<D>& lo, const Point<D>& hi) {
  const Point<D> center = 0.5 * (lo + hi);
  const Point<D> half = 0.5 * (hi - lo);
  auto separated = [&](const Point<D>& axis) {
    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (const auto& p : f) {
      const double v = axis.dot(p - center);
      fmin = std::min(fmin, v);
      fmax = std::max(fmax, v);
    }
    const double r = half.dot(axis.cwiseAbs());
    return fmin > r || fmax < -r;
  };
  for (int k = 0; k < D; ++k)
    if (separated(Point<D>::Unit(k))) return false;
  const Point<D> n = facet_normal<D>(f);
  if (separated(n)) return false;
  if constexpr (D == 3) {
    for (int i = 0; i < 3; ++i) {
      const Point<3> e = f[(i + 1) % 3] - f[i];
      for (int k = 0; k < 3; ++k) {
        const Point<3> axis = e.cross(Point<3>::Unit(k));
        if (axis.squaredNorm() > 0 && separated(axis)) return false;
      }
    }
  }
  return true;
}

}  // namespace pldeg
