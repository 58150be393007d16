#pragma once

// Checkers for the invertibility conditions CNC, INV, DEG1, DEG1_loc, AIB,
// AI and injectivity almost everywhere, plus the sigma theorem, the
// equivalence ledger and the change-of-variables identity.

#include "pldeg/degree.hpp"
#include "pldeg/parallel.hpp"
#include "pldeg/random.hpp"
#include "pldeg/sweep.hpp"
#include "pldeg/topology.hpp"

#include <json.hpp>

#include <map>

namespace pldeg {

using Json = nlohmann::json;

enum class Condition { CNC, INV, DEG1, DEG1_loc, AIB, AI, InjectiveAE };
enum class Verdict { Holds, Fails, Inconclusive };

inline std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::CNC: return "CNC";
    case Condition::INV: return "INV";
    case Condition::DEG1: return "DEG1";
    case Condition::DEG1_loc: return "DEG1_loc";
    case Condition::AIB: return "AIB";
    case Condition::AI: return "AI";
    case Condition::InjectiveAE: return "InjectiveAE";
  }
  return "?";
}

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Result of one checker. A Fails verdict carries a witness in `evidence`
/// that can be re-evaluated from the record alone; `resolution` lists every
/// sampling parameter used.
struct ConditionVerdict {
  Condition condition = Condition::DEG1;
  Verdict verdict = Verdict::Inconclusive;
  std::string summary;
  Json evidence = Json::object();
  Json resolution = Json::object();

  bool holds() const { return verdict == Verdict::Holds; }
  bool fails() const { return verdict == Verdict::Fails; }

  Json to_json() const {
    return Json{{"condition", std::string(to_string(condition))},
                {"verdict", std::string(to_string(verdict))},
                {"summary", summary},
                {"evidence", evidence},
                {"resolution", resolution}};
  }
};

template <int D>
Json to_json(const Point<D>& p) {
  Json a = Json::array();
  for (int i = 0; i < D; ++i) a.push_back(p(i));
  return a;
}

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
  double estimate = 0.0, lo = 0.0, hi = 0.0;
};

inline WilsonInterval wilson_interval(std::size_t hits, std::size_t n, double z = 3.0) {
  if (n == 0) return {0.0, 0.0, 1.0};
  const double p = static_cast<double>(hits) / static_cast<double>(n), nn = static_cast<double>(n);
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {p, hits == 0 ? 0.0 : std::max(0.0, center - half), hits == n ? 1.0 : std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------
// Point location among image simplices.

/// Uniform bins over the image bounding box; each bin lists the simplices
/// whose image boxes meet it.
template <int D>
class ImageBins {
 public:
  ImageBins(const PLMap<D>& map, const Submesh<D>& sub) : map_(&map) {
    std::vector<Point<D>> pts;
    for (int s : sub.simplices)
      for (const auto& p : map.image_simplex(s)) pts.push_back(p);
    box_ = bounding_box<D>(pts);
    const double cells = std::max<double>(1.0, static_cast<double>(sub.simplices.size()));
    per_axis_ = std::clamp(static_cast<int>(std::ceil(std::pow(cells, 1.0 / D))), 1, D == 2 ? 512 : 64);
    bins_.resize(static_cast<std::size_t>(std::pow(per_axis_, D)));
    for (int s : sub.simplices) {
      const auto b = bounding_box<D>(map.image_simplex(s));
      std::array<int, D> lo, hi;
      for (int i = 0; i < D; ++i) {
        lo[i] = cell(b.lo(i), i);
        hi[i] = cell(b.hi(i), i);
      }
      std::array<int, D> c = lo;
      while (true) {
        bins_[flat(c)].push_back(s);
        int i = 0;
        while (i < D && ++c[i] > hi[i]) c[i] = lo[i], ++i;
        if (i == D) break;
      }
    }
  }

  const BoundingBox<D>& box() const { return box_; }

  /// Simplices whose image contains z with every barycentric coordinate
  /// above `margin`; `near_facet` is set when some candidate has a
  /// coordinate in [-margin, margin].
  std::vector<int> covering(const Point<D>& z, double margin, bool* near_facet = nullptr) const {
    std::vector<int> out;
    for (int i = 0; i < D; ++i)
      if (z(i) < box_.lo(i) || z(i) > box_.hi(i)) return out;
    std::array<int, D> c;
    for (int i = 0; i < D; ++i) c[i] = cell(z(i), i);
    for (int s : bins_[flat(c)]) {
      const auto lambda = barycentric<D>(z, map_->image_simplex(s));
      const double m = lambda.minCoeff();
      if (!std::isfinite(m)) continue;
      if (m > margin)
        out.push_back(s);
      else if (m >= -margin && near_facet)
        *near_facet = true;
    }
    return out;
  }

 private:
  int cell(double x, int axis) const {
    const double w = box_.hi(axis) - box_.lo(axis);
    if (w <= 0) return 0;
    return std::clamp(static_cast<int>((x - box_.lo(axis)) / w * per_axis_), 0, per_axis_ - 1);
  }
  std::size_t flat(const std::array<int, D>& c) const {
    std::size_t k = 0;
    for (int i = D - 1; i >= 0; --i) k = k * per_axis_ + c[i];
    return k;
  }

  const PLMap<D>* map_;
  BoundingBox<D> box_;
  int per_axis_ = 1;
  std::vector<std::vector<int>> bins_;
};

namespace detail {

template <int D>
Point<D> sample_box(const BoundingBox<D>& box, std::uint64_t seed, std::uint64_t index) {
  Point<D> z;
  for (int i = 0; i < D; ++i)
    z(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * counter_uniform(seed, D * index + i);
  return z;
}

template <int D>
double box_volume(const BoundingBox<D>& box) {
  double v = 1.0;
  for (int i = 0; i < D; ++i) v *= box.hi(i) - box.lo(i);
  return v;
}

// Barycentric margin below which a sample is treated as lying on a facet.
inline constexpr double kFacetMargin = 1e-12;

struct CoverageCounts {
  std::size_t inside = 0, multiple = 0, near_facet = 0, preimage_total = 0;
  std::int64_t first_multiple = -1;
};

template <int D>
CoverageCounts count_coverage(const ImageBins<D>& bins, std::size_t samples, std::uint64_t seed) {
  const auto parts = parallel_chunks<CoverageCounts>(samples, 64, [&](std::size_t b, std::size_t e, std::size_t) {
    CoverageCounts c;
    for (std::size_t i = b; i < e; ++i) {
      bool near = false;
      const auto hits = bins.covering(sample_box<D>(bins.box(), seed, i), kFacetMargin, &near);
      if (near) {
        ++c.near_facet;
        continue;
      }
      if (hits.empty()) continue;
      ++c.inside;
      c.preimage_total += hits.size();
      if (hits.size() >= 2) {
        ++c.multiple;
        if (c.first_multiple < 0) c.first_multiple = static_cast<std::int64_t>(i);
      }
    }
    return c;
  });
  CoverageCounts total;
  for (const auto& c : parts) {
    total.inside += c.inside;
    total.multiple += c.multiple;
    total.near_facet += c.near_facet;
    total.preimage_total += c.preimage_total;
    if (total.first_multiple < 0) total.first_multiple = c.first_multiple;
  }
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DEG1 and DEG1_loc.

template <int D>
ConditionVerdict check_DEG1(const PLMap<D>& map, const Submesh<D>& sub,
                            int resolution = default_grid_resolution<D>()) {
  ConditionVerdict v;
  v.condition = Condition::DEG1;
  v.resolution = {{"grid_resolution", resolution}};
  const auto field = degree_field(map, sub, resolution);
  const RegionDegree<D>* worst = nullptr;
  Json degrees = Json::array();
  for (const auto& r : field.regions) {
    degrees.push_back(r.degree);
    if (!worst || r.degree > worst->degree) worst = &r;
  }
  v.evidence["region_degrees"] = degrees;
  v.evidence["sigma"] = std::string(to_string(field.sigma.kind));
  if (worst && worst->degree > 1) {
    v.verdict = Verdict::Fails;
    v.summary = "degree " + std::to_string(worst->degree) + " on a region";
    v.evidence["witness_value"] = to_json<D>(worst->representatives.front());
    v.evidence["witness_degree"] = worst->degree;
  } else {
    v.verdict = Verdict::Holds;
    v.summary = "every region has degree <= 1";
  }
  return v;
}

template <int D>
ConditionVerdict check_DEG1(const PLMap<D>& map, int resolution = default_grid_resolution<D>()) {
  return check_DEG1(map, whole(map.mesh()), resolution);
}

template <int D>
ConditionVerdict check_DEG1_loc(const PLMap<D>& map, const InnerCovering<D>& covering,
                                int resolution = default_grid_resolution<D>()) {
  ConditionVerdict v;
  v.condition = Condition::DEG1_loc;
  v.verdict = Verdict::Holds;
  v.summary = "DEG1 holds on every level";
  v.resolution = {{"grid_resolution", resolution}, {"levels", covering.levels.size()}};
  Json levels = Json::array();
  for (std::size_t k = 0; k < covering.levels.size(); ++k) {
    const auto level = check_DEG1(map, covering.levels[k].submesh, resolution);
    levels.push_back(Json{{"offset", covering.levels[k].offset}, {"verdict", std::string(to_string(level.verdict))}});
    if (level.fails() && v.verdict == Verdict::Holds) {
      v.verdict = Verdict::Fails;
      v.summary = "DEG1 fails on level " + std::to_string(k + 1);
      v.evidence["witness_level"] = k + 1;
      v.evidence["witness_value"] = level.evidence["witness_value"];
      v.evidence["witness_degree"] = level.evidence["witness_degree"];
    }
  }
  v.evidence["levels"] = levels;
  return v;
}

// ---------------------------------------------------------------------------
// CNC and injectivity almost everywhere.

struct SampleOptions {
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
};

/// Sum of det * volume over the simplices of the submesh.
template <int D>
double integral_det(const PLMap<D>& map, const Submesh<D>& sub) {
  double total = 0.0;
  for (int s : sub.simplices) total += map.differential(s).det * map.mesh().volume(s);
  return total;
}

/// Exact measure of the union of the image triangles.
inline double image_area(const PLMap<2>& map, const Submesh<2>& sub) {
  std::vector<SimplexPoints<2>> tris;
  tris.reserve(sub.simplices.size());
  for (int s : sub.simplices) tris.push_back(map.image_simplex(s));
  return union_area(tris);
}

/// integral of det <= measure of the image. In 2D the image measure is exact
/// and decides the verdict; the Monte-Carlo estimate is reported alongside.
/// In 3D a sample covered twice by open image simplices of positive
/// determinant proves a positive-measure double cover; otherwise the exact
/// left side is compared with the Wilson band of the estimate.
template <int D>
ConditionVerdict check_CNC(const PLMap<D>& map, const Submesh<D>& sub, const SampleOptions& opt = {}) {
  ConditionVerdict v;
  v.condition = Condition::CNC;
  v.resolution = {{"samples", opt.samples}, {"seed", opt.seed}, {"wilson_z", 3.0}};
  const double lhs = integral_det(map, sub);
  v.evidence["lhs"] = lhs;
  v.evidence["positive_determinants"] = map.all_positive();
  const ImageBins<D> bins(map, sub);
  const double box = detail::box_volume<D>(bins.box());
  WilsonInterval w;
  detail::CoverageCounts counts;
  if (opt.samples > 0) {
    counts = detail::count_coverage<D>(bins, opt.samples, opt.seed);
    w = wilson_interval(counts.inside, opt.samples);
    v.evidence["rhs_monte_carlo"] = box * w.estimate;
    v.evidence["rhs_monte_carlo_band"] = Json::array({box * w.lo, box * w.hi});
    v.evidence["double_cover_samples"] = counts.multiple;
  }
  if constexpr (D == 2) {
    const double rhs = image_area(map, sub);
    const double slack = lhs - rhs;
    const double tol = 1e-9 * std::abs(lhs) + map.tau_vol();
    v.evidence["rhs"] = rhs;
    v.evidence["slack"] = slack;
    v.resolution["tolerance"] = tol;
    v.verdict = slack <= tol ? Verdict::Holds : Verdict::Fails;
    v.summary = slack <= tol ? "integral of det does not exceed the image area"
                             : "integral of det exceeds the image area";
  } else {
    if (opt.samples == 0) {
      v.verdict = Verdict::Inconclusive;
      v.summary = "no samples drawn";
      return v;
    }
    v.evidence["slack"] = lhs - box * w.estimate;
    const double tol = 1e-9 * std::abs(lhs) + map.tau_vol();
    v.resolution["tolerance"] = tol;
    if (map.all_positive() && counts.first_multiple >= 0) {
      v.verdict = Verdict::Fails;
      v.summary = "sampled value covered twice by open image simplices";
      v.evidence["witness_value"] = to_json<D>(detail::sample_box<D>(bins.box(), opt.seed, counts.first_multiple));
      v.evidence["witness_sample"] = counts.first_multiple;
    } else if (lhs > box * w.hi + tol) {
      v.verdict = Verdict::Fails;
      v.summary = "integral of det above the confidence band of the image measure";
    } else if (map.all_positive() || lhs < box * w.lo - tol) {
      v.verdict = Verdict::Holds;
      v.summary = map.all_positive() ? "no double cover among the samples" : "integral of det below the confidence band";
    } else {
      v.verdict = Verdict::Inconclusive;
      v.summary = "slack inside the confidence band";
    }
  }
  return v;
}

template <int D>
ConditionVerdict check_CNC(const PLMap<D>& map, const SampleOptions& opt = {}) {
  return check_CNC(map, whole(map.mesh()), opt);
}

/// Samples the image bounding box and counts preimages in open image
/// simplices. Any sample with two preimages of positive determinant is a
/// witness of a positive-measure double cover.
template <int D>
ConditionVerdict check_injective_ae(const PLMap<D>& map, const SampleOptions& opt = {}) {
  ConditionVerdict v;
  v.condition = Condition::InjectiveAE;
  v.resolution = {{"samples", opt.samples}, {"seed", opt.seed}, {"wilson_z", 3.0}};
  const auto sub = whole(map.mesh());
  const ImageBins<D> bins(map, sub);
  const auto counts = detail::count_coverage<D>(bins, opt.samples, opt.seed);
  const double box = detail::box_volume<D>(bins.box());
  const auto multi = wilson_interval(counts.multiple, counts.inside);
  double abs_det = 0.0;
  for (int s : sub.simplices) abs_det += std::abs(map.differential(s).det) * map.mesh().volume(s);
  const double mc = box * static_cast<double>(counts.preimage_total) / std::max<std::size_t>(1, opt.samples);
  v.evidence["inside_samples"] = counts.inside;
  v.evidence["multiple_samples"] = counts.multiple;
  v.evidence["facet_samples"] = counts.near_facet;
  v.evidence["multiple_fraction"] = multi.estimate;
  v.evidence["multiple_fraction_upper"] = multi.hi;
  v.evidence["integral_abs_det"] = abs_det;
  v.evidence["integral_preimage_count"] = mc;
  v.evidence["area_formula_relative_gap"] = abs_det > 0 ? (mc - abs_det) / abs_det : 0.0;
  if (counts.multiple > 0) {
    v.verdict = Verdict::Fails;
    v.summary = "sampled values with several preimages";
    const Point<D> z = detail::sample_box<D>(bins.box(), opt.seed, counts.first_multiple);
    v.evidence["witness_value"] = to_json<D>(z);
    v.evidence["witness_sample"] = counts.first_multiple;
    Json pre = Json::array();
    for (int s : bins.covering(z, detail::kFacetMargin)) pre.push_back(s);
    v.evidence["witness_simplices"] = pre;
  } else {
    v.verdict = Verdict::Holds;
    v.summary = "no sampled value has more than one preimage";
  }
  return v;
}

// ---------------------------------------------------------------------------
// INV.

struct InvOptions {
  int centers = 10;
  int radii_per_center = 5;
  std::uint64_t seed = 1;
  int resolution = 0;  // grid resolution for region counts, 0 = unused
};

namespace detail {

// Distinct seeded picks from [0, n).
inline std::vector<int> pick_distinct(std::size_t n, int count, std::uint64_t seed) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0, count)));
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(k);
  return idx;
}

}  // namespace detail

/// Balls of radius d_a (1 - 2^-(j+1)) around seeded interior vertices a,
/// approximated by the simplices with every vertex inside. Clause (i) is
/// tested at the ball's vertices, clause (ii) at all other vertices; values
/// on y(boundary of the ball) satisfy both clauses.
template <int D>
ConditionVerdict check_INV(const PLMap<D>& map, const InvOptions& opt = {}) {
  ConditionVerdict v;
  v.condition = Condition::INV;
  v.resolution = {{"centers", opt.centers}, {"radii_per_center", opt.radii_per_center}, {"seed", opt.seed}};
  const auto& mesh = map.mesh();
  std::vector<int> interior;
  for (std::size_t x = 0; x < mesh.vertex_count(); ++x)
    if (!mesh.is_boundary_vertex(static_cast<int>(x))) interior.push_back(static_cast<int>(x));
  int tested = 0, skipped = 0;
  const double tol = map.tau_geom();
  Json centers = Json::array();
  for (int pick : detail::pick_distinct(interior.size(), opt.centers, opt.seed)) {
    const int a_index = interior[pick];
    const Point<D> a = mesh.vertices()[a_index];
    const double da = mesh.boundary_distance(a);
    centers.push_back(a_index);
    for (int j = 0; j < opt.radii_per_center; ++j) {
      double r = da * (1.0 - std::pow(0.5, j + 1));
      // Keep the sphere off the vertices.
      for (int tries = 0; tries < 8; ++tries) {
        bool clash = false;
        for (const auto& x : mesh.vertices()) clash = clash || std::abs((x - a).norm() - r) <= 1e-9 * da;
        if (!clash) break;
        r *= 1.0 - 1e-6;
      }
      const auto ball = ball_submesh(mesh, a, r);
      if (ball.empty()) {
        ++skipped;
        continue;
      }
      ++tested;
      const auto boundary = image_boundary(map, ball);
      const auto bbox = [&] {
        std::vector<Point<D>> pts;
        for (const auto& f : boundary)
          for (const auto& p : f) pts.push_back(p);
        return bounding_box<D>(pts);
      }();
      std::vector<char> in_ball(mesh.vertex_count(), 0);
      for (int x : submesh_vertices(mesh, ball)) in_ball[x] = 1;
      for (std::size_t x = 0; x < mesh.vertex_count(); ++x) {
        const Point<D>& z = map.images()[x];
        bool outside_box = false;
        for (int i = 0; i < D; ++i) outside_box = outside_box || z(i) < bbox.lo(i) - tol || z(i) > bbox.hi(i) + tol;
        int degree = 0;
        if (!outside_box) {
          double dist = std::numeric_limits<double>::infinity();
          for (const auto& f : boundary) dist = std::min(dist, facet_distance<D>(z, f));
          if (dist <= tol) continue;  // on y(boundary of the ball)
          try {
            degree = degree_boundary(map, ball, z);
          } catch (const Error&) {
            continue;
          }
        }
        const bool inside = in_ball[x] != 0;
        if ((inside && degree == 0) || (!inside && degree != 0)) {
          v.verdict = Verdict::Fails;
          v.summary = inside ? "a vertex of the ball maps outside its topological image"
                             : "a vertex outside the ball maps into its topological image";
          v.evidence = {{"center_vertex", a_index}, {"center", to_json<D>(a)},       {"radius", r},
                        {"vertex", x},              {"value", to_json<D>(z)},        {"degree", degree},
                        {"clause", inside ? "i" : "ii"}};
          v.resolution["balls_tested"] = tested;
          v.resolution["balls_skipped"] = skipped;
          return v;
        }
      }
    }
  }
  v.resolution["balls_tested"] = tested;
  v.resolution["balls_skipped"] = skipped;
  v.evidence["center_vertices"] = centers;
  if (tested == 0) throw Error(ErrorCode::BallTooSmall, "every sampled ball submesh is empty");
  v.verdict = Verdict::Holds;
  v.summary = "no sampled ball violates the separation property";
  return v;
}

// ---------------------------------------------------------------------------
// Boundary injectivity and AIB.

struct InjectivityRecord {
  bool injective = true;
  std::size_t pairs_tested = 0;
  std::size_t intersecting_pairs = 0;
  double min_separation = std::numeric_limits<double>::infinity();  // over tested disjoint pairs
  std::optional<std::pair<int, int>> witness;                        // facet indices
};

namespace detail {

template <int D>
double facet_pair_distance(const FacetPoints<D>& f, const FacetPoints<D>& g) {
  if constexpr (D == 2) {
    return segment_distance<2>(f[0], f[1], g[0], g[1]);
  } else {
    if (triangles_intersect(f, g, 0.0)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      d = std::min({d, facet_distance<3>(f[i], g), facet_distance<3>(g[i], f)});
      for (int j = 0; j < 3; ++j) d = std::min(d, segment_distance<3>(f[i], f[(i + 1) % 3], g[j], g[(j + 1) % 3]));
    }
    return d;
  }
}

// Facets sharing vertices are pulled towards their centroids at the shared
// vertices, so only contact away from the shared part is detected.
template <int D>
std::pair<FacetPoints<D>, FacetPoints<D>> separate_shared(const FacetIndices<D>& fi, FacetPoints<D> f,
                                                          const FacetIndices<D>& gi, FacetPoints<D> g) {
  constexpr double shrink = 1e-9;
  Point<D> cf = Point<D>::Zero(), cg = Point<D>::Zero();
  for (int i = 0; i < D; ++i) cf += f[i] / D, cg += g[i] / D;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      if (fi[i] == gi[j]) {
        f[i] += shrink * (cf - f[i]);
        g[j] += shrink * (cg - g[j]);
      }
  return {f, g};
}

template <int D>
bool share_vertex(const FacetIndices<D>& f, const FacetIndices<D>& g) {
  for (int a : f)
    for (int b : g)
      if (a == b) return true;
  return false;
}

}  // namespace detail

/// Exact pairwise test of boundary facet images given per-vertex images.
/// Non-adjacent facets must not meet; adjacent ones may only meet in the
/// shared vertices. Disjoint pairs with boxes closer than `pad` contribute to
/// the minimum separation.
template <int D>
InjectivityRecord boundary_injectivity(const std::vector<FacetIndices<D>>& facets,
                                       const std::vector<Point<D>>& images, double pad,
                                       bool stop_at_first = false) {
  InjectivityRecord rec;
  const std::size_t n = facets.size();
  std::vector<FacetPoints<D>> pts(n);
  std::vector<BoundingBox<D>> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < D; ++k) pts[i][k] = images[facets[i][k]];
    boxes[i] = bounding_box<D>(pts[i]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return boxes[a].lo(0) < boxes[b].lo(0); });
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < n && boxes[order[oj]].lo(0) <= boxes[i].hi(0) + pad; ++oj) {
      const std::size_t j = order[oj];
      bool near = true;
      for (int k = 0; k < D; ++k)
        near = near && boxes[j].lo(k) <= boxes[i].hi(k) + pad && boxes[i].lo(k) <= boxes[j].hi(k) + pad;
      if (!near) continue;
      ++rec.pairs_tested;
      bool hit;
      if (detail::share_vertex<D>(facets[i], facets[j])) {
        const auto [f, g] = detail::separate_shared<D>(facets[i], pts[i], facets[j], pts[j]);
        hit = facets_intersect<D>(f, g, 0.0);
      } else {
        hit = facets_intersect<D>(pts[i], pts[j], 0.0);
        if (!hit) rec.min_separation = std::min(rec.min_separation, detail::facet_pair_distance<D>(pts[i], pts[j]));
      }
      if (hit) {
        rec.injective = false;
        ++rec.intersecting_pairs;
        if (!rec.witness) rec.witness = std::make_pair(static_cast<int>(i), static_cast<int>(j));
        if (stop_at_first) return rec;
      }
    }
  }
  return rec;
}

template <int D>
struct AIBCertificate {
  std::vector<int> boundary_vertices;
  std::vector<std::vector<Point<D>>> approximants;  // images of boundary_vertices per k
  std::vector<double> sup_distances;
  std::vector<InjectivityRecord> injectivity_proofs;

  /// Every approximant injective and the distances strictly decreasing.
  bool valid() const {
    if (approximants.empty()) return false;
    for (const auto& p : injectivity_proofs)
      if (!p.injective) return false;
    for (std::size_t k = 1; k < sup_distances.size(); ++k)
      if (!(sup_distances[k] < sup_distances[k - 1])) return false;
    return true;
  }
};

template <int D>
struct AIBResult {
  ConditionVerdict verdict;
  std::optional<AIBCertificate<D>> certificate;
};

struct AIBOptions {
  int max_iters = 12;
  double epsilon0_fraction = 1e-2;  // of the image diameter
  int required_steps = 3;
};

/// Area-weighted average of the image normals of the boundary facets at
/// each boundary vertex, normalized.
template <int D>
std::vector<Point<D>> boundary_vertex_normals(const PLMap<D>& map) {
  std::vector<Point<D>> n(map.mesh().vertex_count(), Point<D>::Zero());
  for (const auto& f : map.mesh().boundary_facets()) {
    const Point<D> normal = facet_normal<D>(map.image_facet(f));
    for (int v : f) n[v] += normal;
  }
  for (auto& x : n) {
    const double len = x.norm();
    if (len > 0) x /= len;
  }
  return n;
}

/// Step 1 certifies an injective boundary trace directly. Step 2 pushes the
/// boundary vertex images along their normals by eps_k = eps_0 2^-k, with the
/// sign that leaves fewer intersecting pairs at eps_0, and accepts the k whose
/// perturbation is injective. In 2D a transversal crossing of two
/// non-adjacent facets that survives every perturbation below the accepted
/// range proves failure.
template <int D>
AIBResult<D> check_AIB(const PLMap<D>& map, const AIBOptions& opt = {}) {
  AIBResult<D> out;
  auto& v = out.verdict;
  v.condition = Condition::AIB;
  const auto& mesh = map.mesh();
  const auto& facets = mesh.boundary_facets();
  const double diam = map.image_diameter();
  const double pad = 1e-2 * diam;
  std::vector<int> bverts;
  for (std::size_t x = 0; x < mesh.vertex_count(); ++x)
    if (mesh.is_boundary_vertex(static_cast<int>(x))) bverts.push_back(static_cast<int>(x));
  auto restrict_images = [&](const std::vector<Point<D>>& images) {
    std::vector<Point<D>> out_images;
    for (int x : bverts) out_images.push_back(images[x]);
    return out_images;
  };
  v.resolution = {{"max_iters", opt.max_iters},
                  {"epsilon0", opt.epsilon0_fraction * diam},
                  {"required_steps", opt.required_steps}};

  const auto direct = boundary_injectivity<D>(facets, map.images(), pad);
  v.evidence["boundary_pairs_tested"] = direct.pairs_tested;
  v.evidence["intersecting_pairs"] = direct.intersecting_pairs;
  if (direct.injective) {
    AIBCertificate<D> cert;
    cert.boundary_vertices = bverts;
    cert.approximants.push_back(restrict_images(map.images()));
    cert.sup_distances.push_back(0.0);
    cert.injectivity_proofs.push_back(direct);
    v.verdict = Verdict::Holds;
    v.summary = "boundary trace is injective";
    v.evidence["step"] = 1;
    v.evidence["min_separation"] = direct.min_separation;
    out.certificate = std::move(cert);
    return out;
  }

  const auto normals = boundary_vertex_normals(map);
  auto pushed = [&](double eps) {
    auto images = map.images();
    for (int x : bverts) images[x] += eps * normals[x];
    return images;
  };
  const double eps0 = opt.epsilon0_fraction * diam;
  const auto plus = boundary_injectivity<D>(facets, pushed(eps0), pad);
  const auto minus = boundary_injectivity<D>(facets, pushed(-eps0), pad);
  const double sign = minus.intersecting_pairs < plus.intersecting_pairs ? -1.0 : 1.0;
  v.evidence["push_sign"] = sign;

  AIBCertificate<D> cert;
  cert.boundary_vertices = bverts;
  Json attempts = Json::array();
  for (int k = 0; k < opt.max_iters; ++k) {
    const double eps = eps0 * std::pow(0.5, k);
    const auto images = pushed(sign * eps);
    const auto rec = boundary_injectivity<D>(facets, images, pad);
    attempts.push_back(Json{{"epsilon", eps}, {"injective", rec.injective}, {"intersecting_pairs", rec.intersecting_pairs}});
    if (!rec.injective) continue;
    double sup = 0.0;
    for (int x : bverts) sup = std::max(sup, (images[x] - map.images()[x]).norm());
    cert.approximants.push_back(restrict_images(images));
    cert.sup_distances.push_back(sup);
    cert.injectivity_proofs.push_back(rec);
  }
  v.evidence["step"] = 2;
  v.evidence["attempts"] = attempts;
  v.evidence["accepted_steps"] = cert.approximants.size();
  if (static_cast<int>(cert.approximants.size()) >= opt.required_steps && cert.valid()) {
    v.verdict = Verdict::Holds;
    v.summary = "injective push-offs converge to the boundary trace";
    out.certificate = std::move(cert);
    return out;
  }

  if constexpr (D == 2) {
    // Stable transversal crossings: every endpoint keeps a margin from the
    // other segment's line, so perturbations below half the margin still cross.
    const double eps_min = eps0 * std::pow(0.5, opt.max_iters - 1);
    for (std::size_t i = 0; i < facets.size(); ++i)
      for (std::size_t j = i + 1; j < facets.size(); ++j) {
        if (detail::share_vertex<2>(facets[i], facets[j])) continue;
        const auto f = map.image_facet(facets[i]), g = map.image_facet(facets[j]);
        auto line_dist = [](const Point<2>& p, const Point<2>& a, const Point<2>& b) {
          const double len = (b - a).norm();
          return len > 0 ? cross2(b - a, p - a) / len : 0.0;
        };
        const double o1 = line_dist(g[0], f[0], f[1]), o2 = line_dist(g[1], f[0], f[1]);
        const double o3 = line_dist(f[0], g[0], g[1]), o4 = line_dist(f[1], g[0], g[1]);
        if (!(o1 * o2 < 0 && o3 * o4 < 0)) continue;
        const double margin = std::min({std::abs(o1), std::abs(o2), std::abs(o3), std::abs(o4)});
        if (margin > 2.0 * eps_min) {
          v.verdict = Verdict::Fails;
          v.summary = "boundary image crosses itself transversally";
          v.evidence["witness_facets"] = Json::array({i, j});
          v.evidence["crossing_margin"] = margin;
          return out;
        }
      }
  }
  v.verdict = Verdict::Inconclusive;
  v.summary = "no injective push-off sequence found";
  return out;
}

// ---------------------------------------------------------------------------
// AI: injectivity of the closed map.

/// Pairs of image simplices whose interiors overlap.
template <int D>
std::vector<std::pair<int, int>> image_overlaps(const PLMap<D>& map, std::size_t limit = 16) {
  std::vector<std::pair<int, int>> out;
  const std::size_t n = map.mesh().simplex_count();
  std::vector<BoundingBox<D>> boxes(n);
  for (std::size_t s = 0; s < n; ++s) boxes[s] = bounding_box<D>(map.image_simplex(static_cast<int>(s)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return boxes[a].lo(0) < boxes[b].lo(0); });
  const double tol = map.tau_geom();
  for (std::size_t oi = 0; oi < n && out.size() < limit; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < n && boxes[order[oj]].lo(0) < boxes[i].hi(0); ++oj) {
      const std::size_t j = order[oj];
      bool meet = true;
      for (int k = 1; k < D; ++k) meet = meet && boxes[j].lo(k) < boxes[i].hi(k) && boxes[i].lo(k) < boxes[j].hi(k);
      if (!meet) continue;
      if (simplices_overlap<D>(map.image_simplex(static_cast<int>(i)), map.image_simplex(static_cast<int>(j)), tol))
        out.emplace_back(static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j)));
      if (out.size() >= limit) break;
    }
  }
  return out;
}

/// Holds when every determinant is positive, image simplices have disjoint
/// interiors and the boundary trace is injective (the map itself is then an
/// injective approximant); Fails on a positive-measure overlap.
template <int D>
ConditionVerdict check_AI(const PLMap<D>& map) {
  ConditionVerdict v;
  v.condition = Condition::AI;
  const auto overlaps = image_overlaps(map, 1);
  if (!overlaps.empty()) {
    v.verdict = Verdict::Fails;
    v.summary = "image simplices overlap";
    v.evidence["witness_simplices"] = Json::array({overlaps[0].first, overlaps[0].second});
    return v;
  }
  const bool positive = map.all_positive();
  const auto rec = boundary_injectivity<D>(map.mesh().boundary_facets(), map.images(), 0.0, true);
  v.evidence["positive_determinants"] = positive;
  v.evidence["boundary_injective"] = rec.injective;
  if (positive && rec.injective) {
    v.verdict = Verdict::Holds;
    v.summary = "the map is injective on the closed domain";
  } else {
    v.verdict = Verdict::Inconclusive;
    v.summary = "no overlap, but the map is not certified injective";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sigma theorem.

struct SigmaReport {
  Sigma sigma;
  bool holds = false;
  std::vector<int> degrees;
};

/// All nonzero degrees without any hypothesis check.
template <int D>
SigmaReport observe_sigma(const PLMap<D>& map, int resolution = default_grid_resolution<D>()) {
  SigmaReport r;
  const auto field = degree_field(map, resolution);
  r.degrees = field.nonzero_degrees();
  r.sigma = field.sigma;
  r.holds = r.sigma.kind == SigmaKind::Empty || (r.sigma.kind == SigmaKind::Uniform && std::abs(r.sigma.value) == 1);
  return r;
}

/// With two complement components and an AIB certificate every nonzero
/// degree equals one sigma in {+1, -1}.
template <int D>
SigmaReport verify_sigma_theorem(const PLMap<D>& map, const AIBCertificate<D>& cert,
                                 int resolution = default_grid_resolution<D>()) {
  const int count = complement_components(map.mesh(), resolution).component_count();
  if (count != 2)
    throw Error(ErrorCode::HypothesisViolated,
                "complement of the domain boundary has " + std::to_string(count) + " components, not 2");
  if (!cert.valid()) throw Error(ErrorCode::HypothesisViolated, "AIB certificate is not valid");
  return observe_sigma(map, resolution);
}

// ---------------------------------------------------------------------------
// Change of variables.

struct ChangeOfVariables {
  double lhs = 0.0;       // integral over A of f(y) det
  double rhs = 0.0;       // integral of f times deg(y; A; .)
  double residual = 0.0;
  double area_lhs = 0.0;  // integral over A of |det|
  double area_rhs = 0.0;  // integral of the preimage count
  double area_residual = 0.0;
};

/// Both sides of the degree change of variables. In 2D the right side comes
/// from the winding sweep of y(boundary of A), which equals the degree, and
/// is exact for polynomials up to degree 4; in 3D it is a grid sum over the
/// regions of the degree field.
template <int D>
ChangeOfVariables change_of_variables_check(const PLMap<D>& map, const Submesh<D>& sub,
                                            const std::function<double(const Point<D>&)>& f,
                                            int resolution = default_grid_resolution<D>()) {
  ChangeOfVariables out;
  for (int s : sub.simplices) {
    // The pullback integral on s equals the oriented integral over y(s).
    const auto img = map.image_simplex(s);
    const double vol = signed_volume<D>(img);
    if (vol == 0.0) continue;
    const double unsigned_integral = integrate_simplex<D>(img, f);
    out.lhs += (vol > 0 ? 1.0 : -1.0) * unsigned_integral;
    out.area_lhs += std::abs(vol);
  }
  if constexpr (D == 2) {
    std::vector<OrientedSegment> boundary;
    for (const auto& fct : image_boundary(map, sub)) boundary.push_back({fct[0], fct[1]});
    out.rhs = winding_integral(winding_trapezoids(boundary), [](int w) { return double(w); }, f);
    std::vector<OrientedSegment> coverage;
    for (int s : sub.simplices) {
      auto t = map.image_simplex(s);
      const double vol = signed_volume<2>(t);
      if (vol == 0.0) continue;
      if (vol < 0) std::swap(t[1], t[2]);
      for (int i = 0; i < 3; ++i) coverage.push_back({t[i], t[(i + 1) % 3]});
    }
    out.area_rhs = winding_area(winding_trapezoids(coverage), [](int w) { return double(w); });
  } else {
    const auto field = degree_field(map, sub, resolution);
    const auto& dec = field.decomposition;
    out.rhs = dec.integrate_cells([&](int label, const Point<D>& c) {
      return field.regions[label].degree * f(c);
    });
    const ImageBins<D> bins(map, sub);
    out.area_rhs = dec.integrate_cells([&](int, const Point<D>& c) {
      return static_cast<double>(bins.covering(c, 0.0).size());
    });
  }
  out.residual = std::abs(out.lhs - out.rhs);
  out.area_residual = std::abs(out.area_lhs - out.area_rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence ledger.

template <int D>
struct LedgerFixture {
  std::string name;
  PLMap<D> map;
};

struct LedgerOptions {
  SampleOptions samples{200000, 1};
  InvOptions inv{40, 5, 1, 0};
  int covering_levels = 8;
  int resolution = 0;  // 0 = default grid resolution
};

enum class LedgerStatus { Agree, Contradiction, Unresolved, NotApplicable };

inline std::string_view to_string(LedgerStatus s) {
  switch (s) {
    case LedgerStatus::Agree: return "agree";
    case LedgerStatus::Contradiction: return "contradiction";
    case LedgerStatus::Unresolved: return "unresolved";
    case LedgerStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

struct LedgerRow {
  std::string fixture;
  std::string row;  // a, b, c, g
  LedgerStatus status = LedgerStatus::NotApplicable;
  std::string note;
};

struct LedgerReport {
  std::vector<LedgerRow> rows;
  std::map<std::string, std::map<std::string, ConditionVerdict>> verdicts;  // fixture -> condition -> verdict
  int contradictions = 0;
  int unresolved = 0;

  Json to_json() const {
    Json j;
    Json rows_json = Json::array();
    for (const auto& r : rows)
      rows_json.push_back(Json{{"fixture", r.fixture}, {"row", r.row}, {"status", std::string(to_string(r.status))},
                               {"note", r.note}});
    j["rows"] = rows_json;
    for (const auto& [fixture, per] : verdicts)
      for (const auto& [cond, v] : per) j["verdicts"][fixture][cond] = v.to_json();
    j["contradictions"] = contradictions;
    j["unresolved"] = unresolved;
    return j;
  }
};

/// Runs every checker on each fixture and compares the rows
///   a: AIB implies DEG1 (positive determinants, two complement components),
///   b: CNC iff DEG1 (positive determinants),
///   c: DEG1 iff DEG1_loc,
///   g: INV iff DEG1_loc (positive determinants).
/// A disagreement between decisive verdicts is a contradiction; an
/// Inconclusive Monte-Carlo verdict leaves the row unresolved.
template <int D>
LedgerReport cross_equivalences(const std::vector<LedgerFixture<D>>& fixtures, const LedgerOptions& opt = {}) {
  LedgerReport report;
  const int res = opt.resolution > 0 ? opt.resolution : default_grid_resolution<D>();
  for (const auto& fx : fixtures) {
    const auto& map = fx.map;
    auto& per = report.verdicts[fx.name];
    const auto covering = inner_covering(map.mesh(), opt.covering_levels, res);
    per["DEG1"] = check_DEG1(map, res);
    per["DEG1_loc"] = check_DEG1_loc(map, covering, res);
    per["CNC"] = check_CNC(map, opt.samples);
    per["InjectiveAE"] = check_injective_ae(map, opt.samples);
    per["INV"] = check_INV(map, opt.inv);
    per["AIB"] = check_AIB(map).verdict;
    const bool positive = map.all_positive();
    const bool two = covering.parent_complement_count == 2;

    auto equivalence = [&](const std::string& row, const ConditionVerdict& p, const ConditionVerdict& q,
                           bool applicable, const std::string& why_not) {
      LedgerRow r{fx.name, row, LedgerStatus::NotApplicable, why_not};
      if (applicable) {
        if (p.verdict == Verdict::Inconclusive || q.verdict == Verdict::Inconclusive) {
          r.status = LedgerStatus::Unresolved;
          r.note = std::string(to_string(p.condition)) + " or " + std::string(to_string(q.condition)) + " inconclusive";
        } else if (p.verdict == q.verdict) {
          r.status = LedgerStatus::Agree;
          r.note = std::string(to_string(p.verdict));
        } else {
          r.status = LedgerStatus::Contradiction;
          r.note = std::string(to_string(p.condition)) + " " + std::string(to_string(p.verdict)) + ", " +
                   std::string(to_string(q.condition)) + " " + std::string(to_string(q.verdict));
        }
      }
      report.rows.push_back(r);
    };

    {
      LedgerRow r{fx.name, "a", LedgerStatus::NotApplicable, ""};
      if (!positive || !two) {
        r.note = !positive ? "nonpositive determinants" : "complement has more than two components";
      } else if (!per["AIB"].holds()) {
        r.status = LedgerStatus::Agree;
        r.note = "AIB " + std::string(to_string(per["AIB"].verdict)) + ", implication vacuous";
      } else if (per["DEG1"].holds()) {
        r.status = LedgerStatus::Agree;
        r.note = "AIB and DEG1 hold";
      } else {
        r.status = LedgerStatus::Contradiction;
        r.note = "AIB holds but DEG1 fails";
      }
      report.rows.push_back(r);
    }
    equivalence("b", per["CNC"], per["DEG1"], positive, "nonpositive determinants");
    equivalence("c", per["DEG1"], per["DEG1_loc"], true, "");
    equivalence("g", per["INV"], per["DEG1_loc"], positive, "nonpositive determinants");
  }
  for (const auto& r : report.rows) {
    report.contradictions += r.status == LedgerStatus::Contradiction;
    report.unresolved += r.status == LedgerStatus::Unresolved;
  }
  return report;
}

}  // namespace pldeg
