#pragma once

// Exact planar integrals of winding numbers.
//
// A family of oriented segments defines w(z) = sum of windings around z.
// Cutting the plane into vertical slabs at every endpoint and crossing makes
// w constant on each trapezoid between consecutive segments of a slab, so
// areas and polynomial integrals weighted by w are computed exactly (up to
// rounding). Crossing a segment upward adds +1 if it runs left to right and
// -1 if it runs right to left.

#include "pldeg/geometry.hpp"
#include "pldeg/quadrature.hpp"

#include <functional>
#include <vector>

namespace pldeg {

struct OrientedSegment {
  Point<2> a, b;
};

struct Trapezoid {
  double xa, xb;
  double lo_a, lo_b;  // lower edge heights at xa, xb
  double hi_a, hi_b;  // upper edge heights at xa, xb
  int winding;

  double area() const { return 0.5 * (xb - xa) * ((hi_a - lo_a) + (hi_b - lo_b)); }
  std::array<SimplexPoints<2>, 2> triangles() const {
    const Point<2> p0(xa, lo_a), p1(xb, lo_b), p2(xb, hi_b), p3(xa, hi_a);
    return {SimplexPoints<2>{p0, p1, p2}, SimplexPoints<2>{p0, p2, p3}};
  }
};

namespace detail {

struct SweepSegment {
  double x0, y0, x1, y1;
  int sign;
  double at(double x) const {
    if (x1 == x0) return y0;
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
};

}  // namespace detail

/// Decomposes the plane into trapezoids of constant nonzero winding number.
inline std::vector<Trapezoid> winding_trapezoids(const std::vector<OrientedSegment>& segments) {
  std::vector<detail::SweepSegment> segs;
  segs.reserve(segments.size());
  for (const auto& s : segments) {
    if (s.a.x() == s.b.x()) continue;  // vertical: no area between slabs
    if (s.a.x() < s.b.x())
      segs.push_back({s.a.x(), s.a.y(), s.b.x(), s.b.y(), +1});
    else
      segs.push_back({s.b.x(), s.b.y(), s.a.x(), s.a.y(), -1});
  }
  std::sort(segs.begin(), segs.end(), [](const auto& p, const auto& q) { return p.x0 < q.x0; });

  std::vector<double> events;
  for (const auto& s : segs) {
    events.push_back(s.x0);
    events.push_back(s.x1);
  }
  // Proper crossings; x-overlapping pairs are found by scanning the x0-sorted list.
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& p = segs[i];
    for (std::size_t j = i + 1; j < segs.size() && segs[j].x0 < p.x1; ++j) {
      const auto& q = segs[j];
      const double lo = std::max(p.x0, q.x0), hi = std::min(p.x1, q.x1);
      if (!(lo < hi)) continue;
      const double d_lo = p.at(lo) - q.at(lo), d_hi = p.at(hi) - q.at(hi);
      if ((d_lo < 0 && d_hi > 0) || (d_lo > 0 && d_hi < 0)) {
        const double x = lo + (hi - lo) * d_lo / (d_lo - d_hi);
        if (x > lo && x < hi) events.push_back(x);
      }
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::vector<Trapezoid> out;
  std::vector<std::size_t> active;
  std::size_t next = 0;
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t e = 0; e + 1 < events.size(); ++e) {
    const double xa = events[e], xb = events[e + 1];
    while (next < segs.size() && segs[next].x0 <= xa) active.push_back(next++);
    std::erase_if(active, [&](std::size_t i) { return segs[i].x1 <= xa; });
    if (active.empty()) continue;
    const double xm = 0.5 * (xa + xb);
    order.clear();
    for (std::size_t i : active)
      if (segs[i].x1 >= xb) order.emplace_back(segs[i].at(xm), i);
    std::sort(order.begin(), order.end());
    int w = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const auto& lo = segs[order[k].second];
      const auto& hi = segs[order[k + 1].second];
      w += lo.sign;
      if (w == 0) continue;
      out.push_back({xa, xb, lo.at(xa), lo.at(xb), hi.at(xa), hi.at(xb), w});
    }
  }
  return out;
}

/// Integral of weight(w) * f over the plane, where w is the winding number.
inline double winding_integral(const std::vector<Trapezoid>& traps, const std::function<double(int)>& weight,
                               const std::function<double(const Point<2>&)>& f) {
  double total = 0.0;
  for (const auto& t : traps) {
    const double wt = weight(t.winding);
    if (wt == 0.0) continue;
    for (const auto& tri : t.triangles()) total += wt * integrate_simplex<2>(tri, f);
  }
  return total;
}

inline double winding_area(const std::vector<Trapezoid>& traps, const std::function<double(int)>& weight) {
  double total = 0.0;
  for (const auto& t : traps) total += weight(t.winding) * t.area();
  return total;
}

/// Exact area of a union of triangles: the positively oriented boundary of
/// each triangle contributes one to the coverage count on its interior.
inline double union_area(const std::vector<SimplexPoints<2>>& triangles) {
  std::vector<OrientedSegment> segs;
  segs.reserve(3 * triangles.size());
  for (auto t : triangles) {
    const double v = signed_volume<2>(t);
    if (v == 0.0) continue;
    if (v < 0) std::swap(t[1], t[2]);
    for (int i = 0; i < 3; ++i) segs.push_back({t[i], t[(i + 1) % 3]});
  }
  return winding_area(winding_trapezoids(segs), [](int w) { return w >= 1 ? 1.0 : 0.0; });
}

}  // namespace pldeg
