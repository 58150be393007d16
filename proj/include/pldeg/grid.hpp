#pragma once

// Background-grid classification of R^D minus a union of facets.
//
// Cells touched by any closed facet are blocked; the remaining cells are
// flood-filled with face connectivity. The grid is padded so that the
// unbounded region is always a single frame-connected component. Regions
// thinner than one cell are not resolved; callers choose the resolution.

#include "pldeg/geometry.hpp"

#include <cstdint>
#include <deque>
#include <numeric>
#include <span>
#include <vector>

namespace pldeg {

template <int D>
constexpr int default_grid_resolution() {
  return D == 2 ? 256 : 64;
}

template <int D>
class ComplementDecomposition;

template <int D>
ComplementDecomposition<D> decompose_complement(std::span<const FacetPoints<D>> facets, int resolution,
                                                int representatives = 3);

namespace detail {

template <int D>
bool segment_hits_facet(const Point<D>& a, const Point<D>& b, const FacetPoints<D>& f, double tol) {
  if constexpr (D == 2) {
    return segments_intersect(a, b, f[0], f[1], tol);
  } else {
    return segment_hits_triangle(a, b, f[0], f[1], f[2], tol);
  }
}

}  // namespace detail

template <int D>
struct GridRegion {
  int label = -1;
  bool bounded = true;
  std::size_t cell_count = 0;
  double measure = 0.0;  // cell_count * h^D; underestimates near blocked cells
  std::vector<Point<D>> representatives;
};

template <int D>
class ComplementDecomposition {
 public:
  int component_count() const { return static_cast<int>(regions_.size()); }
  int unbounded_label() const { return unbounded_; }
  bool has_two_components() const { return component_count() == 2; }
  const std::vector<GridRegion<D>>& regions() const { return regions_; }
  const GridRegion<D>& region(int label) const { return regions_.at(label); }
  double cell_size() const { return h_; }
  int resolution() const { return resolution_; }

  std::vector<int> bounded_labels() const {
    std::vector<int> out;
    for (const auto& r : regions_)
      if (r.bounded) out.push_back(r.label);
    return out;
  }

  /// Region label of p, -1 when p lies in a blocked cell. Points outside the
  /// grid belong to the unbounded region.
  int label_at(const Point<D>& p) const {
    std::array<long, D> c;
    for (int k = 0; k < D; ++k) {
      const double t = std::floor((p(k) - origin_(k)) / h_);
      if (t < 0 || t >= static_cast<double>(dims_[k])) return unbounded_;
      c[k] = static_cast<long>(t);
    }
    return labels_[linear(c)];
  }

  /// Centre of the cell containing p, or p itself outside the grid.
  Point<D> cell_center_of(const Point<D>& p) const {
    Point<D> out = p;
    for (int k = 0; k < D; ++k) {
      const double t = std::floor((p(k) - origin_(k)) / h_);
      if (t < 0 || t >= static_cast<double>(dims_[k])) return p;
      out(k) = origin_(k) + (t + 0.5) * h_;
    }
    return out;
  }

  /// Midpoint sum of g(label, cell centre) over the unblocked cells of the
  /// bounded regions.
  template <class G>
  double integrate_cells(G&& g) const {
    double sum = 0.0;
    for (std::size_t idx = 0; idx < labels_.size(); ++idx) {
      const int l = labels_[idx];
      if (l < 0 || !regions_[l].bounded) continue;
      const auto c = unlinear(idx);
      Point<D> x;
      for (int k = 0; k < D; ++k) x(k) = origin_(k) + (c[k] + 0.5) * h_;
      sum += g(l, x);
    }
    return sum * std::pow(h_, D);
  }

  std::size_t blocked_cells() const {
    std::size_t n = 0;
    for (int l : labels_) n += (l < 0);
    return n;
  }

  friend ComplementDecomposition decompose_complement<D>(std::span<const FacetPoints<D>>, int, int);

 private:
  std::size_t linear(const std::array<long, D>& c) const {
    std::size_t idx = 0;
    for (int k = D - 1; k >= 0; --k) idx = idx * dims_[k] + static_cast<std::size_t>(c[k]);
    return idx;
  }
  std::array<long, D> unlinear(std::size_t idx) const {
    std::array<long, D> c;
    for (int k = 0; k < D; ++k) {
      c[k] = static_cast<long>(idx % dims_[k]);
      idx /= dims_[k];
    }
    return c;
  }

  Point<D> origin_ = Point<D>::Zero();
  double h_ = 1.0;
  int resolution_ = 0;
  std::array<std::size_t, D> dims_{};
  std::vector<int> labels_;  // -1 blocked
  std::vector<GridRegion<D>> regions_;
  int unbounded_ = 0;
};

template <int D>
ComplementDecomposition<D> decompose_complement(std::span<const FacetPoints<D>> facets, int resolution,
                                                int representatives) {
  ComplementDecomposition<D> out;
  out.resolution_ = resolution;
  BoundingBox<D> box;
  for (const auto& f : facets)
    for (const auto& p : f) box.extend(p);
  if (box.empty()) {
    box.extend(Point<D>::Zero());
  }
  double diag = box.diagonal();
  if (diag <= 0.0) diag = 1.0;
  const double h = diag / resolution;
  constexpr int pad = 2;
  out.h_ = h;
  out.origin_ = box.lo - Point<D>::Constant(pad * h);
  std::size_t total = 1;
  for (int k = 0; k < D; ++k) {
    out.dims_[k] = static_cast<std::size_t>(std::ceil((box.hi(k) - box.lo(k)) / h)) + 2 * pad + 1;
    total *= out.dims_[k];
  }
  out.labels_.assign(total, -2);  // -2 unvisited, -1 blocked

  auto cell_lo = [&](const std::array<long, D>& c) {
    Point<D> lo;
    for (int k = 0; k < D; ++k) lo(k) = out.origin_(k) + c[k] * h;
    return lo;
  };

  // Block cells hit by facets; the tiny inflation keeps facets lying exactly
  // on a cell face from slipping between both neighbours.
  const Point<D> inflate = Point<D>::Constant(1e-9 * h);
  std::vector<std::vector<int>> cell_facets(total);
  for (std::size_t fi = 0; fi < facets.size(); ++fi) {
    const auto& f = facets[fi];
    BoundingBox<D> fb;
    for (const auto& p : f) fb.extend(p);
    std::array<long, D> lo, hi;
    for (int k = 0; k < D; ++k) {
      lo[k] = std::max<long>(0, static_cast<long>(std::floor((fb.lo(k) - out.origin_(k)) / h)) - 1);
      hi[k] = std::min<long>(static_cast<long>(out.dims_[k]) - 1,
                             static_cast<long>(std::floor((fb.hi(k) - out.origin_(k)) / h)) + 1);
    }
    std::array<long, D> c = lo;
    while (true) {
      const std::size_t idx = out.linear(c);
      const Point<D> clo = cell_lo(c) - inflate;
      const Point<D> chi = cell_lo(c) + Point<D>::Constant(h) + inflate;
      if (facet_hits_box<D>(f, clo, chi)) {
        out.labels_[idx] = -1;
        cell_facets[idx].push_back(static_cast<int>(fi));
      }
      int k = 0;
      while (k < D && ++c[k] > hi[k]) {
        c[k] = lo[k];
        ++k;
      }
      if (k == D) break;
    }
  }

  // Flood fill.
  std::vector<std::size_t> queue;
  std::vector<char> raw_frame;
  int raw_count = 0;
  for (std::size_t start = 0; start < total; ++start) {
    if (out.labels_[start] != -2) continue;
    queue.clear();
    queue.push_back(start);
    out.labels_[start] = raw_count;
    bool touches_frame = false;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const auto c = out.unlinear(queue[qi]);
      for (int k = 0; k < D; ++k) {
        if (c[k] == 0 || c[k] + 1 == static_cast<long>(out.dims_[k])) touches_frame = true;
        for (int step : {-1, 1}) {
          auto n = c;
          n[k] += step;
          if (n[k] < 0 || n[k] >= static_cast<long>(out.dims_[k])) continue;
          const std::size_t ni = out.linear(n);
          if (out.labels_[ni] == -2) {
            out.labels_[ni] = raw_count;
            queue.push_back(ni);
          }
        }
      }
    }
    raw_frame.push_back(touches_frame);
    ++raw_count;
  }

  // Staircase blocking can cut thin wedges into pockets. Two grid regions are
  // the same component when a facet-free straight segment joins cell centres
  // of both; candidate pairs are cells at most two cells apart. Grazing
  // contacts count as hits so that segments through shared facet edges do
  // not leak.
  std::vector<int> parent(raw_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto center = [&](const std::array<long, D>& c) { return Point<D>(cell_lo(c) + Point<D>::Constant(0.5 * h)); };
  constexpr int reach = 2;
  for (std::size_t i = 0; i < total; ++i) {
    const int li = out.labels_[i];
    if (li < 0) continue;
    const auto c = out.unlinear(i);
    std::array<long, D> o;
    o.fill(-reach);
    while (true) {
      auto n = c;
      bool inside = true;
      for (int k = 0; k < D; ++k) {
        n[k] += o[k];
        inside = inside && n[k] >= 0 && n[k] < static_cast<long>(out.dims_[k]);
      }
      if (inside) {
        const std::size_t ni = out.linear(n);
        const int ln = out.labels_[ni];
        if (ln >= 0 && find(ln) != find(li)) {
          const Point<D> a = center(c), b = center(n);
          bool blocked = false;
          std::array<long, D> lo, hi;
          for (int k = 0; k < D; ++k) {
            lo[k] = std::min(c[k], n[k]);
            hi[k] = std::max(c[k], n[k]);
          }
          std::array<long, D> w = lo;
          while (!blocked) {
            for (int fi : cell_facets[out.linear(w)])
              if (detail::segment_hits_facet<D>(a, b, facets[fi], 1e-9 * h)) {
                blocked = true;
                break;
              }
            int k = 0;
            while (k < D && ++w[k] > hi[k]) {
              w[k] = lo[k];
              ++k;
            }
            if (k == D) break;
          }
          if (!blocked) parent[find(ln)] = find(li);
        }
      }
      int k = 0;
      while (k < D && ++o[k] > reach) {
        o[k] = -reach;
        ++k;
      }
      if (k == D) break;
    }
  }
  std::vector<int> compact(raw_count, -1);
  for (int r = 0; r < raw_count; ++r) {
    const int root = find(r);
    if (compact[root] < 0) {
      compact[root] = static_cast<int>(out.regions_.size());
      GridRegion<D> region;
      region.label = compact[root];
      region.bounded = true;
      out.regions_.push_back(region);
    }
    compact[r] = compact[root];
    if (raw_frame[r]) out.regions_[compact[r]].bounded = false;
  }
  for (auto& l : out.labels_)
    if (l >= 0) {
      l = compact[l];
      ++out.regions_[l].cell_count;
    }
  for (auto& region : out.regions_) {
    region.measure = static_cast<double>(region.cell_count) * std::pow(h, D);
    if (!region.bounded) out.unbounded_ = region.label;
  }

  // Multi-source BFS distance (in cells) from blocked cells; representatives
  // are the cells farthest from any facet, ties broken by lowest index.
  std::vector<int> dist(total, -1);
  std::deque<std::size_t> bfs;
  for (std::size_t i = 0; i < total; ++i)
    if (out.labels_[i] == -1) {
      dist[i] = 0;
      bfs.push_back(i);
    }
  if (bfs.empty()) {
    for (std::size_t i = 0; i < total; ++i) dist[i] = 1;
  }
  while (!bfs.empty()) {
    const std::size_t cur = bfs.front();
    bfs.pop_front();
    const auto c = out.unlinear(cur);
    for (int k = 0; k < D; ++k)
      for (int step : {-1, 1}) {
        auto n = c;
        n[k] += step;
        if (n[k] < 0 || n[k] >= static_cast<long>(out.dims_[k])) continue;
        const std::size_t ni = out.linear(n);
        if (dist[ni] < 0) {
          dist[ni] = dist[cur] + 1;
          bfs.push_back(ni);
        }
      }
  }
  std::vector<std::vector<std::pair<int, std::size_t>>> best(out.regions_.size());
  for (std::size_t i = 0; i < total; ++i) {
    const int l = out.labels_[i];
    if (l < 0) continue;
    auto& b = best[l];
    const std::pair<int, std::size_t> cand{dist[i], i};
    auto better = [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); };
    if (static_cast<int>(b.size()) < representatives) {
      b.push_back(cand);
      std::sort(b.begin(), b.end(), better);
    } else if (better(cand, b.back())) {
      b.back() = cand;
      std::sort(b.begin(), b.end(), better);
    }
  }
  for (std::size_t l = 0; l < out.regions_.size(); ++l)
    for (const auto& [d, idx] : best[l])
      out.regions_[l].representatives.push_back(cell_lo(out.unlinear(idx)) + Point<D>::Constant(0.5 * h));
  return out;
}

}  // namespace pldeg
