#pragma once

#include "pldeg/geometry.hpp"

#include <vector>

namespace pldeg {

/// Quadrature node in barycentric coordinates; weights sum to 1 and are
/// multiplied by the simplex volume.
template <int D>
struct QuadratureNode {
  std::array<double, D + 1> lambda;
  double weight;
};

/// Symmetric simplex rules: degree 4 on triangles (Dunavant, 6 nodes) and
/// degree 5 on tetrahedra (Walkington, 14 nodes).
template <int D>
const std::vector<QuadratureNode<D>>& simplex_rule() {
  if constexpr (D == 2) {
    static const std::vector<QuadratureNode<2>> rule = [] {
      std::vector<QuadratureNode<2>> r;
      const double a1 = 0.445948490915965, w1 = 0.223381589678011;
      const double a2 = 0.091576213509771, w2 = 0.109951743655322;
      for (double a : {a1, a2}) {
        const double w = (a == a1) ? w1 : w2;
        const double b = 1.0 - 2.0 * a;
        r.push_back({{b, a, a}, w});
        r.push_back({{a, b, a}, w});
        r.push_back({{a, a, b}, w});
      }
      return r;
    }();
    return rule;
  } else {
    static const std::vector<QuadratureNode<3>> rule = [] {
      std::vector<QuadratureNode<3>> r;
      // Weights below are for the reference tetrahedron of volume 1/6.
      const double a = 0.0927352503108912, wa = 0.01224884051939366;
      const double b = 0.3108859192633006, wb = 0.01878132095300264;
      const double c = 0.04550370412564965, wc = 0.007091003462846911;
      for (const auto& [p, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
        const double q = 1.0 - 3.0 * p;
        r.push_back({{q, p, p, p}, 6.0 * w});
        r.push_back({{p, q, p, p}, 6.0 * w});
        r.push_back({{p, p, q, p}, 6.0 * w});
        r.push_back({{p, p, p, q}, 6.0 * w});
      }
      const double d = 0.5 - c;
      const std::array<std::array<double, 4>, 6> pairs{{{c, c, d, d},
                                                        {c, d, c, d},
                                                        {c, d, d, c},
                                                        {d, c, c, d},
                                                        {d, c, d, c},
                                                        {d, d, c, c}}};
      for (const auto& l : pairs) r.push_back({l, 6.0 * wc});
      return r;
    }();
    return rule;
  }
}

/// Integral of f over a simplex given by its vertices (unsigned volume).
template <int D, class F>
double integrate_simplex(const SimplexPoints<D>& p, F&& f) {
  const double vol = std::abs(signed_volume<D>(p));
  double sum = 0.0;
  for (const auto& node : simplex_rule<D>()) {
    Point<D> x = Point<D>::Zero();
    for (int i = 0; i <= D; ++i) x += node.lambda[i] * p[i];
    sum += node.weight * f(x);
  }
  return vol * sum;
}

/// Splits a simplex at the midpoint of its longest edge.
template <int D>
std::array<SimplexPoints<D>, 2> bisect_longest_edge(const SimplexPoints<D>& p) {
  int bi = 0, bj = 1;
  double best = -1.0;
  for (int i = 0; i <= D; ++i)
    for (int j = i + 1; j <= D; ++j) {
      const double l = (p[i] - p[j]).squaredNorm();
      if (l > best) {
        best = l;
        bi = i;
        bj = j;
      }
    }
  const Point<D> mid = 0.5 * (p[bi] + p[bj]);
  SimplexPoints<D> a = p, b = p;
  a[bj] = mid;
  b[bi] = mid;
  return {a, b};
}

}  // namespace pldeg
