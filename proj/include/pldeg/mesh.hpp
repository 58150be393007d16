#pragma once

#include "pldeg/error.hpp"
#include "pldeg/geometry.hpp"
#include "pldeg/grid.hpp"

#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace pldeg {

template <int D>
using SimplexIndices = std::array<int, D + 1>;

template <int D>
using FacetIndices = std::array<int, D>;

/// Facet of s opposite local vertex i, oriented so that its normal points out
/// of s when s is positively oriented: the i-th term of the simplicial
/// boundary (-1)^i [v_0 .. v_i^ .. v_D].
template <int D>
FacetIndices<D> oriented_facet(const SimplexIndices<D>& s, int i) {
  FacetIndices<D> f;
  int k = 0;
  for (int j = 0; j <= D; ++j)
    if (j != i) f[k++] = s[j];
  if (i % 2 == 1) std::swap(f[D - 2], f[D - 1]);
  return f;
}

template <int D>
FacetIndices<D> sorted_key(FacetIndices<D> f) {
  std::sort(f.begin(), f.end());
  return f;
}

template <int D>
class SimplicialMesh;

template <int D>
SimplicialMesh<D> build_mesh(std::vector<Point<D>> vertices, std::vector<SimplexIndices<D>> simplices);

/// Immutable simplicial complex representing a bounded polyhedral domain.
template <int D>
class SimplicialMesh {
 public:
  static constexpr int dim = D;

  const std::vector<Point<D>>& vertices() const { return vertices_; }
  const std::vector<SimplexIndices<D>>& simplices() const { return simplices_; }
  /// Outward-oriented boundary facets.
  const std::vector<FacetIndices<D>>& boundary_facets() const { return boundary_facets_; }
  /// Simplex owning each boundary facet.
  const std::vector<int>& boundary_facet_owner() const { return boundary_owner_; }
  /// neighbors()[s][i] is the simplex across the facet opposite local vertex i, -1 on the boundary.
  const std::vector<std::array<int, D + 1>>& neighbors() const { return neighbors_; }
  bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
  int interior_facet_count() const { return interior_facets_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t simplex_count() const { return simplices_.size(); }

  double diameter() const { return diameter_; }
  double tau_geom() const { return 1e-9 * diameter_; }
  double tau_vol() const { return 1e-12 * std::pow(diameter_, D); }

  SimplexPoints<D> simplex_points(int s) const {
    SimplexPoints<D> p;
    for (int i = 0; i <= D; ++i) p[i] = vertices_[simplices_[s][i]];
    return p;
  }
  FacetPoints<D> facet_points(const FacetIndices<D>& f) const {
    FacetPoints<D> p;
    for (int i = 0; i < D; ++i) p[i] = vertices_[f[i]];
    return p;
  }
  double volume(int s) const { return signed_volume<D>(simplex_points(s)); }
  double total_volume() const {
    double v = 0.0;
    for (std::size_t s = 0; s < simplices_.size(); ++s) v += volume(static_cast<int>(s));
    return v;
  }
  Point<D> centroid(int s) const {
    Point<D> c = Point<D>::Zero();
    for (int v : simplices_[s]) c += vertices_[v];
    return c / (D + 1);
  }

  /// Distance of a point to the polyhedral boundary.
  double boundary_distance(const Point<D>& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : boundary_facets_) best = std::min(best, facet_distance<D>(p, facet_points(f)));
    return best;
  }

  friend SimplicialMesh build_mesh<D>(std::vector<Point<D>>, std::vector<SimplexIndices<D>>);

 private:
  std::vector<Point<D>> vertices_;
  std::vector<SimplexIndices<D>> simplices_;
  std::vector<FacetIndices<D>> boundary_facets_;
  std::vector<int> boundary_owner_;
  std::vector<std::array<int, D + 1>> neighbors_;
  std::vector<char> boundary_vertex_;
  int interior_facets_ = 0;
  double diameter_ = 0.0;
};

/// Validates and normalizes a simplicial mesh: each simplex is reordered to
/// positive signed volume, then boundary and facet adjacency are derived.
template <int D>
SimplicialMesh<D> build_mesh(std::vector<Point<D>> vertices, std::vector<SimplexIndices<D>> simplices) {
  static_assert(D == 2 || D == 3, "only d = 2 and d = 3 are supported");
  if (simplices.empty()) throw Error(ErrorCode::InvalidInput, "mesh has no simplices");
  const int nv = static_cast<int>(vertices.size());
  for (const auto& s : simplices)
    for (int v : s)
      if (v < 0 || v >= nv) throw Error(ErrorCode::InvalidInput, "simplex index out of range");

  SimplicialMesh<D> mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.simplices_ = std::move(simplices);
  mesh.diameter_ = bounding_box<D>(mesh.vertices_).diagonal();
  const double tau_vol = mesh.tau_vol();

  for (std::size_t s = 0; s < mesh.simplices_.size(); ++s) {
    auto& idx = mesh.simplices_[s];
    double vol = mesh.volume(static_cast<int>(s));
    if (!(std::abs(vol) >= tau_vol) || vol == 0.0)
      throw Error(ErrorCode::DegenerateSimplex, "simplex " + std::to_string(s) + " has volume " + std::to_string(vol));
    if (vol < 0) std::swap(idx[0], idx[1]);
  }

  const std::size_t ns = mesh.simplices_.size();
  mesh.neighbors_.assign(ns, {});
  for (auto& n : mesh.neighbors_) n.fill(-1);
  std::map<FacetIndices<D>, std::vector<std::pair<int, int>>> incidence;
  for (std::size_t s = 0; s < ns; ++s)
    for (int i = 0; i <= D; ++i)
      incidence[sorted_key<D>(oriented_facet<D>(mesh.simplices_[s], i))].emplace_back(static_cast<int>(s), i);

  mesh.boundary_vertex_.assign(mesh.vertices_.size(), 0);
  for (const auto& [key, owners] : incidence) {
    if (owners.size() > 2)
      throw Error(ErrorCode::NonManifold, "facet shared by " + std::to_string(owners.size()) + " simplices");
    if (owners.size() == 2) {
      mesh.neighbors_[owners[0].first][owners[0].second] = owners[1].first;
      mesh.neighbors_[owners[1].first][owners[1].second] = owners[0].first;
      ++mesh.interior_facets_;
    } else {
      const auto [s, i] = owners[0];
      mesh.boundary_facets_.push_back(oriented_facet<D>(mesh.simplices_[s], i));
      mesh.boundary_owner_.push_back(s);
      for (int v : key) mesh.boundary_vertex_[v] = 1;
    }
  }

  std::vector<char> seen(ns, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int n : mesh.neighbors_[s])
      if (n >= 0 && !seen[n]) {
        seen[n] = 1;
        ++reached;
        stack.push_back(n);
      }
  }
  if (reached != ns)
    throw Error(ErrorCode::Disconnected,
                std::to_string(ns - reached) + " simplices unreachable through facet adjacency");
  return mesh;
}

// ---------------------------------------------------------------------------
// Submeshes: subsets of simplices of a parent mesh with their own boundary.

template <int D>
struct Submesh {
  std::vector<int> simplices;              // sorted, unique
  std::vector<FacetIndices<D>> boundary;   // outward-oriented facets of the subset
  std::vector<char> mask;                  // mask[s] != 0 iff s belongs to the subset

  bool contains(int s) const { return mask[s] != 0; }
  bool empty() const { return simplices.empty(); }
};

template <int D>
Submesh<D> make_submesh(const SimplicialMesh<D>& mesh, std::vector<int> simplices) {
  Submesh<D> sub;
  std::sort(simplices.begin(), simplices.end());
  simplices.erase(std::unique(simplices.begin(), simplices.end()), simplices.end());
  sub.mask.assign(mesh.simplex_count(), 0);
  for (int s : simplices) {
    if (s < 0 || s >= static_cast<int>(mesh.simplex_count()))
      throw Error(ErrorCode::InvalidInput, "submesh simplex index out of range");
    sub.mask[s] = 1;
  }
  for (int s : simplices)
    for (int i = 0; i <= D; ++i) {
      const int n = mesh.neighbors()[s][i];
      if (n < 0 || !sub.mask[n]) sub.boundary.push_back(oriented_facet<D>(mesh.simplices()[s], i));
    }
  sub.simplices = std::move(simplices);
  return sub;
}

template <int D>
Submesh<D> whole(const SimplicialMesh<D>& mesh) {
  std::vector<int> all(mesh.simplex_count());
  std::iota(all.begin(), all.end(), 0);
  return make_submesh(mesh, std::move(all));
}

/// Vertices used by the simplices of a submesh.
template <int D>
std::vector<int> submesh_vertices(const SimplicialMesh<D>& mesh, const Submesh<D>& sub) {
  std::vector<int> out;
  for (int s : sub.simplices)
    for (int v : mesh.simplices()[s]) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Standalone mesh made from a subset of simplices (vertices renumbered).
/// The subset must be facet-connected.
template <int D>
SimplicialMesh<D> extract_mesh(const SimplicialMesh<D>& mesh, const Submesh<D>& sub) {
  const auto used = submesh_vertices(mesh, sub);
  std::vector<int> remap(mesh.vertex_count(), -1);
  std::vector<Point<D>> verts;
  for (int v : used) {
    remap[v] = static_cast<int>(verts.size());
    verts.push_back(mesh.vertices()[v]);
  }
  std::vector<SimplexIndices<D>> simp;
  for (int s : sub.simplices) {
    SimplexIndices<D> t = mesh.simplices()[s];
    for (int& v : t) v = remap[v];
    simp.push_back(t);
  }
  return build_mesh<D>(std::move(verts), std::move(simp));
}

// ---------------------------------------------------------------------------
// Queries.

/// Regions of R^D minus the polyhedral boundary of the mesh (or of a submesh).
template <int D>
ComplementDecomposition<D> complement_components(const SimplicialMesh<D>& mesh,
                                                 int resolution = default_grid_resolution<D>()) {
  std::vector<FacetPoints<D>> facets;
  facets.reserve(mesh.boundary_facets().size());
  for (const auto& f : mesh.boundary_facets()) facets.push_back(mesh.facet_points(f));
  return decompose_complement<D>(facets, resolution);
}

template <int D>
ComplementDecomposition<D> complement_components(const SimplicialMesh<D>& mesh, const Submesh<D>& sub,
                                                 int resolution = default_grid_resolution<D>()) {
  std::vector<FacetPoints<D>> facets;
  facets.reserve(sub.boundary.size());
  for (const auto& f : sub.boundary) facets.push_back(mesh.facet_points(f));
  return decompose_complement<D>(facets, resolution);
}

struct Location {
  int simplex = -1;  // -1: outside
  bool on_boundary_facet = false;

  bool outside() const { return simplex < 0; }
};

/// Lowest-index simplex whose closed hull contains z. The flag is set when z
/// lies within tau_geom of a boundary facet of the mesh.
template <int D>
Location locate_point(const SimplicialMesh<D>& mesh, const Point<D>& z) {
  Location loc;
  const double tol = mesh.tau_geom();
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    const auto p = mesh.simplex_points(static_cast<int>(s));
    const auto lambda = barycentric<D>(z, p);
    if (lambda.minCoeff() >= -1e-12 || simplex_distance<D>(z, p) <= tol) {
      loc.simplex = static_cast<int>(s);
      break;
    }
  }
  loc.on_boundary_facet = mesh.boundary_distance(z) <= tol;
  return loc;
}

// ---------------------------------------------------------------------------
// Regular inner coverings.

template <int D>
struct CoveringLevel {
  Submesh<D> submesh;
  double offset = 0.0;                 // delta_m
  int complement_count = 0;            // regions of R^D minus the level boundary
  bool inherits_two_components = true; // meaningful when the parent has two
};

template <int D>
struct InnerCovering {
  std::vector<CoveringLevel<D>> levels;
  double max_boundary_distance = 0.0;  // D = max vertex distance to the boundary
  int parent_complement_count = 0;
};

/// Nested submeshes Omega_1 ⊂ Omega_2 ⊂ ... strictly inside Omega. Level m
/// keeps every simplex whose closure is at least delta_m = D/(m+1) away from
/// the boundary.
template <int D>
InnerCovering<D> inner_covering(const SimplicialMesh<D>& mesh, int level_count,
                                int resolution = default_grid_resolution<D>()) {
  if (level_count < 1) throw Error(ErrorCode::InvalidInput, "level_count must be >= 1");
  InnerCovering<D> cov;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    cov.max_boundary_distance = std::max(cov.max_boundary_distance, mesh.boundary_distance(mesh.vertices()[v]));

  std::vector<double> closure_distance(mesh.simplex_count(), std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    const auto p = mesh.simplex_points(static_cast<int>(s));
    bool touches = false;
    for (int v : mesh.simplices()[s]) touches = touches || mesh.is_boundary_vertex(v);
    if (touches) {
      closure_distance[s] = 0.0;
      continue;
    }
    for (const auto& f : mesh.boundary_facets())
      closure_distance[s] = std::min(closure_distance[s], simplex_facet_distance<D>(p, mesh.facet_points(f)));
  }

  cov.parent_complement_count = complement_components(mesh, resolution).component_count();
  for (int m = 1; m <= level_count; ++m) {
    CoveringLevel<D> level;
    level.offset = cov.max_boundary_distance / (m + 1);
    std::vector<int> keep;
    for (std::size_t s = 0; s < mesh.simplex_count(); ++s)
      if (closure_distance[s] > 0.0 && closure_distance[s] >= level.offset) keep.push_back(static_cast<int>(s));
    if (keep.empty())
      throw Error(ErrorCode::EmptyLevel, "no simplex at distance >= " + std::to_string(level.offset) +
                                             " from the boundary at level " + std::to_string(m));
    level.submesh = make_submesh(mesh, std::move(keep));
    level.complement_count = complement_components(mesh, level.submesh, resolution).component_count();
    level.inherits_two_components = cov.parent_complement_count != 2 || level.complement_count == 2;
    cov.levels.push_back(std::move(level));
  }
  return cov;
}

}  // namespace pldeg
