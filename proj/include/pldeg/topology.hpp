#pragma once

// Topological image, localized image, preimage components, component
// isolation and the reduced domain of a PL map.

#include "pldeg/degree.hpp"
#include "pldeg/random.hpp"

#include <set>

namespace pldeg {

/// Values of nonzero degree: membership is decided exactly with
/// degree_boundary, the region list comes from the background grid.
template <int D>
struct TopologicalImage {
  Submesh<D> domain;
  DegreeReport<D> field;

  std::vector<const RegionDegree<D>*> regions() const {
    std::vector<const RegionDegree<D>*> out;
    for (const auto& r : field.regions)
      if (r.degree != 0) out.push_back(&r);
    return out;
  }
  double measure() const {
    double m = 0.0;
    for (const auto* r : regions()) m += r->measure;
    return m;
  }
};

template <int D>
TopologicalImage<D> topological_image(const PLMap<D>& map, const Submesh<D>& sub,
                                      int resolution = default_grid_resolution<D>()) {
  return {sub, degree_field(map, sub, resolution)};
}

/// z in im_T(y; A): off the image boundary with nonzero degree.
template <int D>
bool in_topological_image(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  if (!(image_boundary_distance(map, sub, z) > map.tau_deg())) return false;
  return degree_boundary(map, sub, z) != 0;
}

template <int D>
struct LocalizedImage {
  std::vector<TopologicalImage<D>> levels;

  bool contains(const PLMap<D>& map, const Point<D>& z) const {
    for (const auto& l : levels)
      if (in_topological_image(map, l.domain, z)) return true;
    return false;
  }
  /// Grid measure of im_T of each level; nondecreasing for nested levels.
  std::vector<double> level_measures() const {
    std::vector<double> out;
    for (const auto& l : levels) out.push_back(l.measure());
    return out;
  }
};

template <int D>
LocalizedImage<D> localized_image(const PLMap<D>& map, const InnerCovering<D>& covering,
                                  int resolution = default_grid_resolution<D>()) {
  LocalizedImage<D> out;
  for (const auto& level : covering.levels) out.levels.push_back(topological_image(map, level.submesh, resolution));
  return out;
}

// ---------------------------------------------------------------------------
// Preimage components.

template <int D>
struct PreimagePiece {
  std::vector<int> simplices;
  bool touches_boundary = false;
};

template <int D>
struct PreimageComponents {
  Point<D> value;
  double eta = 0.0;
  std::vector<PreimagePiece<D>> pieces;
};

namespace detail {

template <int D>
double max_edge(const SimplexPoints<D>& p) {
  double m = 0.0;
  for (int i = 0; i <= D; ++i)
    for (int j = i + 1; j <= D; ++j) m = std::max(m, (p[i] - p[j]).norm());
  return m;
}

}  // namespace detail

/// Twice the longest image edge among simplices whose closed image contains
/// z (the longest image edge overall when there are none).
template <int D>
double default_eta(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  double local = 0.0, global = 0.0;
  for (int s : sub.simplices) {
    const auto p = map.image_simplex(s);
    const double e = detail::max_edge<D>(p);
    global = std::max(global, e);
    if (!detail::outside_box<D>(p, z, map.tau_geom()) && simplex_distance<D>(z, p) <= map.tau_geom())
      local = std::max(local, e);
  }
  return 2.0 * (local > 0.0 ? local : global);
}

/// Facet-connected components of {S in U : dist(z, y(S)) <= eta}. A piece
/// touches the boundary when one of its boundary facets of U has an image
/// within eta of z.
template <int D>
PreimageComponents<D> preimage_components(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z,
                                          double eta) {
  PreimageComponents<D> out;
  out.value = z;
  out.eta = eta;
  const auto& mesh = map.mesh();
  std::vector<char> near(mesh.simplex_count(), 0);
  bool any = false;
  for (int s : sub.simplices) {
    const auto p = map.image_simplex(s);
    if (detail::outside_box<D>(p, z, eta)) continue;
    if (simplex_distance<D>(z, p) <= eta) near[s] = any = 1;
  }
  if (!any) throw Error(ErrorCode::EmptyPreimage, "no simplex image within " + std::to_string(eta) + " of the value");
  std::vector<char> seen(mesh.simplex_count(), 0);
  for (int start : sub.simplices) {
    if (!near[start] || seen[start]) continue;
    PreimagePiece<D> piece;
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      piece.simplices.push_back(s);
      for (int i = 0; i <= D; ++i) {
        const int n = mesh.neighbors()[s][i];
        if (n >= 0 && sub.contains(n)) {
          if (near[n] && !seen[n]) {
            seen[n] = 1;
            stack.push_back(n);
          }
        } else if (!piece.touches_boundary) {
          const auto f = oriented_facet<D>(mesh.simplices()[s], i);
          piece.touches_boundary = facet_distance<D>(z, map.image_facet(f)) <= eta;
        }
      }
    }
    std::sort(piece.simplices.begin(), piece.simplices.end());
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

template <int D>
PreimageComponents<D> preimage_components(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  return preimage_components(map, sub, z, default_eta(map, sub, z));
}

// ---------------------------------------------------------------------------
// Component isolation.

template <int D>
struct Isolation {
  Submesh<D> submesh;                 // A_n
  std::vector<Point<D>> preimages;    // C_z as exact preimage points
  int degree = 0;
  double slack = 0.0;                 // max distance of vertices of A_n to C_z
  double boundary_distance = 0.0;     // dist(z, y(boundary of A_n))
};

/// Submesh A_n around one preimage piece with z off y(boundary of A_n) and
/// positive degree, built from the simplices within 1/n of the piece's exact
/// preimages that do not reach another preimage.
template <int D>
Isolation<D> isolate_component(const PLMap<D>& map, const Submesh<D>& sub, const PreimageComponents<D>& comps,
                               std::size_t piece_index, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "tightness index must be >= 1");
  if (piece_index >= comps.pieces.size()) throw Error(ErrorCode::InvalidInput, "piece index out of range");
  const auto& piece = comps.pieces[piece_index];
  if (piece.touches_boundary) throw Error(ErrorCode::InvalidInput, "piece touches the boundary");
  if (!map.all_positive()) throw Error(ErrorCode::HypothesisViolated, "map has nonpositive determinants");
  const auto& mesh = map.mesh();
  const Point<D>& z = comps.value;
  const double tol = map.tau_geom();

  auto contains_value = [&](int s) {
    const auto p = map.image_simplex(s);
    return !detail::outside_box<D>(p, z, tol) && simplex_distance<D>(z, p) <= tol;
  };
  std::vector<char> in_piece(mesh.simplex_count(), 0);
  for (int s : piece.simplices) in_piece[s] = 1;
  std::vector<int> core;
  for (int s : piece.simplices)
    if (contains_value(s)) core.push_back(s);
  if (core.empty()) throw Error(ErrorCode::CannotSeparate, "piece holds no exact preimage");

  // The core must be a single facet-connected cluster.
  {
    std::vector<char> is_core(mesh.simplex_count(), 0), seen(mesh.simplex_count(), 0);
    for (int s : core) is_core[s] = 1;
    std::vector<int> stack{core[0]};
    seen[core[0]] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      for (int nb : mesh.neighbors()[s])
        if (nb >= 0 && is_core[nb] && !seen[nb]) {
          seen[nb] = 1;
          ++reached;
          stack.push_back(nb);
        }
    }
    if (reached != core.size())
      throw Error(ErrorCode::CannotSeparate, "piece holds several preimage clusters; shrink eta");
  }

  Isolation<D> iso;
  for (int s : core) {
    const auto lambda = barycentric<D>(z, map.image_simplex(s));
    const auto ref = mesh.simplex_points(s);
    Point<D> x = Point<D>::Zero();
    for (int i = 0; i <= D; ++i) x += lambda(i) * ref[i];
    iso.preimages.push_back(x);
  }
  auto dist_to_core = [&](const Point<D>& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : iso.preimages) d = std::min(d, (x - c).norm());
    return d;
  };

  const double radius = 1.0 / n;
  std::vector<char> candidate(mesh.simplex_count(), 0);
  for (int s : core) candidate[s] = 1;
  for (int s : sub.simplices) {
    if (candidate[s]) continue;
    if (!in_piece[s] && contains_value(s)) continue;  // another preimage
    bool close = true;
    for (int v : mesh.simplices()[s]) close = close && dist_to_core(mesh.vertices()[v]) <= radius;
    if (close) candidate[s] = 1;
  }
  std::vector<char> kept(mesh.simplex_count(), 0);
  std::vector<int> stack(core.begin(), core.end()), chosen;
  for (int s : core) kept[s] = 1;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    chosen.push_back(s);
    for (int nb : mesh.neighbors()[s])
      if (nb >= 0 && sub.contains(nb) && candidate[nb] && !kept[nb]) {
        kept[nb] = 1;
        stack.push_back(nb);
      }
  }
  iso.submesh = make_submesh(mesh, std::move(chosen));
  for (int v : submesh_vertices(mesh, iso.submesh)) iso.slack = std::max(iso.slack, dist_to_core(mesh.vertices()[v]));
  iso.boundary_distance = image_boundary_distance(map, iso.submesh, z);
  if (!(iso.boundary_distance > map.tau_deg()))
    throw Error(ErrorCode::CannotSeparate, "value lies on the image of the isolating boundary");
  iso.degree = degree_boundary(map, iso.submesh, z);
  if (iso.degree < 1) throw Error(ErrorCode::CannotSeparate, "isolating submesh has degree " + std::to_string(iso.degree));
  return iso;
}

// ---------------------------------------------------------------------------
// Reduced domain.

enum class VertexClass { Outside, Boundary, Included, Excluded };

template <int D>
struct ReducedDomain {
  std::vector<VertexClass> vertex_class;   // per mesh vertex
  Submesh<D> included;                     // simplices of the reduced domain
  std::vector<int> excluded_simplices;
  std::vector<FacetIndices<D>> slits;      // interior facets removed from the open set
  std::vector<Point<D>> boundary_touching_values;

  std::vector<int> excluded_vertices() const {
    std::vector<int> out;
    for (std::size_t v = 0; v < vertex_class.size(); ++v)
      if (vertex_class[v] == VertexClass::Excluded) out.push_back(static_cast<int>(v));
    return out;
  }
};

/// Vertices of the boundary of a submesh.
template <int D>
std::vector<char> submesh_boundary_vertices(const SimplicialMesh<D>& mesh, const Submesh<D>& sub) {
  std::vector<char> out(mesh.vertex_count(), 0);
  for (const auto& f : sub.boundary)
    for (int v : f) out[v] = 1;
  return out;
}

/// Interior vertex x of U is excluded when the exact preimage component of
/// y(x) through x reaches the boundary of U. A simplex is excluded when all
/// of its vertices are excluded or on the boundary and at least one is
/// excluded; interior facets of that kind become slits.
template <int D>
ReducedDomain<D> reduced_domain(const PLMap<D>& map, const Submesh<D>& sub) {
  const auto& mesh = map.mesh();
  ReducedDomain<D> out;
  out.vertex_class.assign(mesh.vertex_count(), VertexClass::Outside);
  const auto on_boundary = submesh_boundary_vertices(mesh, sub);
  for (int v : submesh_vertices(mesh, sub)) {
    if (on_boundary[v]) {
      out.vertex_class[v] = VertexClass::Boundary;
      continue;
    }
    const Point<D> z = map.images()[v];
    const auto comps = preimage_components(map, sub, z, map.tau_geom());
    bool touches = false;
    for (const auto& piece : comps.pieces) {
      bool has_v = false;
      for (int s : piece.simplices)
        for (int w : mesh.simplices()[s]) has_v = has_v || w == v;
      if (has_v) touches = touches || piece.touches_boundary;
    }
    out.vertex_class[v] = touches ? VertexClass::Excluded : VertexClass::Included;
    if (touches) out.boundary_touching_values.push_back(z);
  }
  auto removable = [&](auto&& indices) {
    bool any = false;
    for (int v : indices) {
      if (out.vertex_class[v] == VertexClass::Included) return false;
      any = any || out.vertex_class[v] == VertexClass::Excluded;
    }
    return any;
  };
  std::vector<int> keep;
  for (int s : sub.simplices) {
    if (removable(mesh.simplices()[s]))
      out.excluded_simplices.push_back(s);
    else
      keep.push_back(s);
  }
  out.included = make_submesh(mesh, std::move(keep));
  for (int s : out.included.simplices)
    for (int i = 0; i <= D; ++i) {
      const int nb = mesh.neighbors()[s][i];
      if (nb < s || !out.included.contains(nb)) continue;  // each interior facet once
      const auto f = oriented_facet<D>(mesh.simplices()[s], i);
      if (removable(f)) out.slits.push_back(f);
    }
  return out;
}

/// Interior vertices whose classification disagrees with
/// "excluded iff y(x) lies on y(boundary of U)".
template <int D>
std::vector<int> boundary_image_mismatches(const PLMap<D>& map, const Submesh<D>& sub, const ReducedDomain<D>& rd) {
  std::vector<int> out;
  for (std::size_t v = 0; v < rd.vertex_class.size(); ++v) {
    const auto c = rd.vertex_class[v];
    if (c != VertexClass::Included && c != VertexClass::Excluded) continue;
    const bool on_image = image_boundary_distance(map, sub, map.images()[v]) <= map.tau_geom();
    if (on_image != (c == VertexClass::Excluded)) out.push_back(static_cast<int>(v));
  }
  return out;
}

struct RestrictCheck {
  bool holds = true;
  int compared = 0;
  int skipped = 0;
  std::vector<std::string> failures;
};

/// Degree on U equals the degree on the reduced domain at admissible values:
/// the region representatives of the degree field of U plus `extra_values`.
template <int D>
RestrictCheck restrict_check(const PLMap<D>& map, const Submesh<D>& sub, const ReducedDomain<D>& rd,
                             const std::vector<Point<D>>& extra_values = {},
                             int resolution = default_grid_resolution<D>()) {
  RestrictCheck out;
  std::vector<Point<D>> values = extra_values;
  for (const auto& r : degree_field(map, sub, resolution).regions)
    for (const auto& z : r.representatives) values.push_back(z);
  std::vector<FacetPoints<D>> slit_images;
  for (const auto& f : rd.slits) slit_images.push_back(map.image_facet(f));
  for (const auto& z0 : values) {
    if (rd.included.empty()) break;
    double d = std::min(image_boundary_distance(map, sub, z0), image_boundary_distance(map, rd.included, z0));
    for (const auto& f : slit_images) d = std::min(d, facet_distance<D>(z0, f));
    if (!(d > map.tau_deg())) {
      ++out.skipped;
      continue;
    }
    const int on_u = degree_boundary(map, sub, z0);
    const int on_lambda = degree_boundary(map, rd.included, z0);
    int by_sum = on_lambda;
    try {
      by_sum = degree_regular_sum(map, rd.included, nearby_regular_value(map, rd.included, z0));
    } catch (const Error&) {
    }
    ++out.compared;
    if (on_u != on_lambda || on_u != by_sum) {
      out.holds = false;
      std::ostringstream msg;
      msg << "degree " << on_u << " on U but " << on_lambda << " / " << by_sum << " on the reduced domain";
      out.failures.push_back(msg.str());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strict orientation preservation.

enum class Strictness { Strict, NotStrict };

inline std::string_view to_string(Strictness s) { return s == Strictness::Strict ? "Strict" : "NotStrict"; }

template <int D>
struct StrictnessVerdict {
  Strictness verdict = Strictness::Strict;
  std::string reason;
  int center_vertex = -1;
  double radius = 0.0;
  std::optional<Point<D>> witness_value;
  int sampled_sets = 0;
};

/// Simplices with every vertex within r of a.
template <int D>
Submesh<D> ball_submesh(const SimplicialMesh<D>& mesh, const Point<D>& a, double r) {
  std::vector<int> in;
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    bool all = true;
    for (int v : mesh.simplices()[s]) all = all && (mesh.vertices()[v] - a).norm() < r;
    if (all) in.push_back(static_cast<int>(s));
  }
  return make_submesh(mesh, std::move(in));
}

/// Positive determinants certify strictness directly. Otherwise balls of
/// three dyadic radii around `centers` seeded interior vertices are tested:
/// a negative degree at a region representative, or a ball without any
/// nonzero-degree value, refutes strictness.
template <int D>
StrictnessVerdict<D> check_strictly_orientation_preserving(const PLMap<D>& map, std::uint64_t seed = 1,
                                                           int centers = 20, int resolution = 64) {
  StrictnessVerdict<D> out;
  if (map.all_positive()) {
    out.reason = "every simplex determinant is positive";
    return out;
  }
  const auto& mesh = map.mesh();
  std::vector<int> interior;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.is_boundary_vertex(static_cast<int>(v))) interior.push_back(static_cast<int>(v));
  Rng rng(seed);
  for (int c = 0; c < centers && !interior.empty(); ++c) {
    const int v = interior[rng.index(interior.size())];
    const Point<D> a = mesh.vertices()[v];
    const double da = mesh.boundary_distance(a);
    for (int j = 0; j < 3; ++j) {
      const double r = da * std::pow(0.5, j);
      const auto ball = ball_submesh(mesh, a, r);
      if (ball.empty()) continue;
      ++out.sampled_sets;
      const auto field = degree_field(map, ball, resolution);
      bool nonzero = false;
      for (const auto& region : field.regions) {
        if (region.degree < 0) {
          out.verdict = Strictness::NotStrict;
          out.reason = "negative degree " + std::to_string(region.degree);
          out.center_vertex = v;
          out.radius = r;
          out.witness_value = region.representatives.front();
          return out;
        }
        nonzero = nonzero || region.degree != 0;
      }
      if (!nonzero) {
        out.verdict = Strictness::NotStrict;
        out.reason = "no value of nonzero degree on a sampled ball";
        out.center_vertex = v;
        out.radius = r;
        return out;
      }
    }
  }
  out.reason = "no sampled set refutes strictness";
  return out;
}

}  // namespace pldeg
