#pragma once

// Brouwer degree of piecewise-affine maps.
//
// Three independent routes are provided:
//  * degree_regular_sum: signed count of preimages of a regular value,
//  * degree_boundary:    winding number / solid angle of the image boundary,
//  * degree_integral:    integral of a normalized bump pulled back by the map.
// degree_field classifies every region of R^D minus the image boundary.

#include "pldeg/error.hpp"
#include "pldeg/geometry.hpp"
#include "pldeg/grid.hpp"
#include "pldeg/mesh.hpp"
#include "pldeg/quadrature.hpp"
#include "pldeg/random.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace pldeg {

template <int D>
struct Differential {
  Matrix<D> gradient;
  double det = 0.0;
  Matrix<D> cofactor;
};

template <int D>
Differential<D> affine_differential(const SimplexPoints<D>& reference, const SimplexPoints<D>& image) {
  Differential<D> d;
  d.gradient = edge_matrix<D>(image) * edge_matrix<D>(reference).inverse();
  d.det = d.gradient.determinant();
  d.cofactor = cofactor<D>(d.gradient);
  return d;
}

/// Continuous map that is affine on every simplex, given by vertex images.
template <int D>
class PLMap {
 public:
  PLMap(std::shared_ptr<const SimplicialMesh<D>> mesh, std::vector<Point<D>> images)
      : mesh_(std::move(mesh)), images_(std::move(images)) {
    if (!mesh_) throw Error(ErrorCode::InvalidInput, "PLMap requires a mesh");
    if (images_.size() != mesh_->vertex_count())
      throw Error(ErrorCode::InvalidInput, "expected " + std::to_string(mesh_->vertex_count()) +
                                               " vertex images, got " + std::to_string(images_.size()));
    differentials_.reserve(mesh_->simplex_count());
    for (std::size_t s = 0; s < mesh_->simplex_count(); ++s)
      differentials_.push_back(
          affine_differential<D>(mesh_->simplex_points(static_cast<int>(s)), image_simplex(static_cast<int>(s))));
    image_diameter_ = bounding_box<D>(images_).diagonal();
    if (image_diameter_ <= 0.0) image_diameter_ = mesh_->diameter();
  }

  const SimplicialMesh<D>& mesh() const { return *mesh_; }
  const std::shared_ptr<const SimplicialMesh<D>>& mesh_ptr() const { return mesh_; }
  const std::vector<Point<D>>& images() const { return images_; }
  const std::vector<Differential<D>>& differentials() const { return differentials_; }
  const Differential<D>& differential(int s) const { return differentials_[s]; }

  SimplexPoints<D> image_simplex(int s) const {
    SimplexPoints<D> p;
    for (int i = 0; i <= D; ++i) p[i] = images_[mesh_->simplices()[s][i]];
    return p;
  }
  FacetPoints<D> image_facet(const FacetIndices<D>& f) const {
    FacetPoints<D> p;
    for (int i = 0; i < D; ++i) p[i] = images_[f[i]];
    return p;
  }
  /// Image of a point given by its barycentric coordinates in simplex s.
  Point<D> evaluate(int s, const Eigen::Matrix<double, D + 1, 1>& lambda) const {
    Point<D> x = Point<D>::Zero();
    for (int i = 0; i <= D; ++i) x += lambda(i) * images_[mesh_->simplices()[s][i]];
    return x;
  }

  double image_diameter() const { return image_diameter_; }
  /// Minimum admissible distance of a query value to the image boundary.
  double tau_deg() const { return 1e-6 * image_diameter_; }
  double tau_geom() const { return 1e-9 * image_diameter_; }
  double tau_vol() const { return 1e-12 * std::pow(image_diameter_, D); }

  double min_det() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& d : differentials_) m = std::min(m, d.det);
    return m;
  }
  bool all_positive() const { return min_det() > 0.0; }

 private:
  std::shared_ptr<const SimplicialMesh<D>> mesh_;
  std::vector<Point<D>> images_;
  std::vector<Differential<D>> differentials_;
  double image_diameter_ = 0.0;
};

template <int D>
PLMap<D> identity_map(std::shared_ptr<const SimplicialMesh<D>> mesh) {
  auto images = mesh->vertices();
  return PLMap<D>(std::move(mesh), std::move(images));
}

/// Per-simplex gradient, determinant and cofactor.
template <int D>
const std::vector<Differential<D>>& pl_differentials(const PLMap<D>& map) {
  return map.differentials();
}

template <int D>
std::vector<FacetPoints<D>> image_boundary(const PLMap<D>& map, const Submesh<D>& sub) {
  std::vector<FacetPoints<D>> out;
  out.reserve(sub.boundary.size());
  for (const auto& f : sub.boundary) out.push_back(map.image_facet(f));
  return out;
}

template <int D>
double image_boundary_distance(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : sub.boundary) best = std::min(best, facet_distance<D>(z, map.image_facet(f)));
  return best;
}

namespace detail {

template <int D>
void require_off_image_boundary(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  const double d = image_boundary_distance(map, sub, z);
  if (!(d > map.tau_deg()))
    throw Error(ErrorCode::OnImageBoundary,
                "query value at distance " + std::to_string(d) + " from the image boundary");
}

template <int D>
bool outside_box(const SimplexPoints<D>& p, const Point<D>& z, double tol) {
  for (int k = 0; k < D; ++k) {
    double lo = p[0](k), hi = p[0](k);
    for (int i = 1; i <= D; ++i) {
      lo = std::min(lo, p[i](k));
      hi = std::max(hi, p[i](k));
    }
    if (z(k) < lo - tol || z(k) > hi + tol) return true;
  }
  return false;
}

}  // namespace detail

/// Degree as the signed count of preimages of a regular value.
template <int D>
int degree_regular_sum(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  detail::require_off_image_boundary(map, sub, z);
  const double tol = map.tau_geom();
  int degree = 0;
  for (int s : sub.simplices) {
    const auto p = map.image_simplex(s);
    if (detail::outside_box<D>(p, z, tol)) continue;
    for (int i = 0; i <= D; ++i) {
      const auto f = oriented_facet<D>(map.mesh().simplices()[s], i);
      if (facet_distance<D>(z, map.image_facet(f)) <= tol)
        throw Error(ErrorCode::NotRegularValue, "query value lies on the image of facet of simplex " +
                                                    std::to_string(s));
    }
    // A degenerate image simplex coincides with the union of its facet
    // images, which z avoids.
    if (std::abs(signed_volume<D>(p)) < map.tau_vol()) continue;
    const auto lambda = barycentric<D>(z, p);
    if (lambda.minCoeff() > 0.0) degree += map.differential(s).det > 0 ? 1 : -1;
  }
  return degree;
}

template <int D>
int degree_regular_sum(const PLMap<D>& map, const Point<D>& z) {
  return degree_regular_sum(map, whole(map.mesh()), z);
}

/// First regular value in a fixed sequence of small offsets of z that stays
/// well inside the region of z. Degree queries never perturb silently; this
/// is for callers that own the perturbation policy.
template <int D>
Point<D> nearby_regular_value(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  const double room = image_boundary_distance(map, sub, z);
  const double step = std::min(0.25 * room, 1e-3 * map.image_diameter());
  for (int k = 0; k < 64; ++k) {
    Point<D> offset;
    for (int i = 0; i < D; ++i) offset(i) = counter_uniform(0x5eed + i, k) - 0.5;
    const Point<D> w = k == 0 ? z : Point<D>(z + step * offset);
    try {
      degree_regular_sum(map, sub, w);
      return w;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotRegularValue) throw;
    }
  }
  throw Error(ErrorCode::NotRegularValue, "no regular value found near the query");
}

/// Normalized winding sum of the image boundary around z (unrounded).
template <int D>
double winding_sum(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  double total = 0.0;
  for (const auto& f : sub.boundary) total += subtended_angle<D>(z, map.image_facet(f));
  return total / full_angle<D>();
}

/// Degree from the image of the boundary alone: winding number in 2D, sum of
/// signed solid angles in 3D.
template <int D>
int degree_boundary(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z) {
  detail::require_off_image_boundary(map, sub, z);
  const double w = winding_sum(map, sub, z);
  const double k = std::round(w);
  if (std::abs(w - k) >= 0.25)
    throw Error(ErrorCode::NumericallyAmbiguous, "winding sum " + std::to_string(w) + " is not near an integer");
  return static_cast<int>(k);
}

template <int D>
int degree_boundary(const PLMap<D>& map, const Point<D>& z) {
  return degree_boundary(map, whole(map.mesh()), z);
}

/// Radial hat function (1 - |u - center| / radius)_+ normalized to unit integral.
template <int D>
struct MollifierSpec {
  Point<D> center;
  double radius = 0.0;

  double normalization() const { return 3.0 / (std::numbers::pi * std::pow(radius, D)); }
  double operator()(const Point<D>& u) const {
    const double t = 1.0 - (u - center).norm() / radius;
    return t > 0.0 ? normalization() * t : 0.0;
  }
};

struct IntegralOptions {
  double max_piece_fraction = 1.0 / 8.0;  // pieces meeting the support are refined to radius * this
  int kink_levels = 2;                    // extra bisections where the hat is not smooth
};

namespace detail {

template <int D>
double integrate_hat(const SimplexPoints<D>& p, const MollifierSpec<D>& h, const IntegralOptions& opt,
                     int kink_depth) {
  Point<D> c = Point<D>::Zero();
  for (const auto& v : p) c += v;
  c /= (D + 1);
  double rad = 0.0, diam = 0.0;
  for (int i = 0; i <= D; ++i) {
    rad = std::max(rad, (p[i] - c).norm());
    for (int j = i + 1; j <= D; ++j) diam = std::max(diam, (p[i] - p[j]).norm());
  }
  const double dc = (c - h.center).norm();
  if (dc - rad >= h.radius) return 0.0;
  bool split = diam > opt.max_piece_fraction * h.radius;
  if (!split && kink_depth < opt.kink_levels) {
    const bool straddles_rim = dc + rad > h.radius;
    const bool holds_apex = dc < rad;
    split = straddles_rim || holds_apex;
    if (split) ++kink_depth;
  }
  if (split) {
    const auto halves = bisect_longest_edge<D>(p);
    return integrate_hat<D>(halves[0], h, opt, kink_depth) + integrate_hat<D>(halves[1], h, opt, kink_depth);
  }
  return integrate_simplex<D>(p, h);
}

}  // namespace detail

/// Quadrature value of the integral of h(y(x)) det grad y(x) over the submesh.
/// Each simplex is pulled forward to its image, where the integrand is h
/// itself times the orientation sign.
template <int D>
double degree_integral(const PLMap<D>& map, const Submesh<D>& sub, const MollifierSpec<D>& h,
                       const IntegralOptions& opt = {}) {
  if (!(h.radius > 0.0)) throw Error(ErrorCode::InvalidInput, "mollifier radius must be positive");
  const double d = image_boundary_distance(map, sub, h.center);
  if (!(d > h.radius + map.tau_deg()))
    throw Error(ErrorCode::SupportCrossesImageBoundary,
                "support radius " + std::to_string(h.radius) + " exceeds boundary distance " + std::to_string(d));
  double total = 0.0;
  for (int s : sub.simplices) {
    const double det = map.differential(s).det;
    if (det == 0.0) continue;
    const auto p = map.image_simplex(s);
    if (detail::outside_box<D>(p, h.center, h.radius)) continue;
    total += (det > 0 ? 1.0 : -1.0) * detail::integrate_hat<D>(p, h, opt, 0);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Preimages.

template <int D>
struct Preimage {
  int simplex = -1;
  Eigen::Matrix<double, D + 1, 1> lambda;
  Point<D> point;
};

/// Simplices of the submesh whose closed image contains z, with the
/// barycentric location of the preimage (first solution for degenerate images).
template <int D>
std::vector<Preimage<D>> enumerate_preimages(const PLMap<D>& map, const Submesh<D>& sub, const Point<D>& z,
                                             double tol) {
  std::vector<Preimage<D>> out;
  for (int s : sub.simplices) {
    const auto p = map.image_simplex(s);
    if (detail::outside_box<D>(p, z, tol)) continue;
    if (simplex_distance<D>(z, p) > tol && std::abs(signed_volume<D>(p)) >= map.tau_vol()) continue;
    Preimage<D> pre;
    pre.simplex = s;
    if (std::abs(signed_volume<D>(p)) >= map.tau_vol()) {
      pre.lambda = barycentric<D>(z, p);
      pre.lambda = pre.lambda.cwiseMax(0.0);
      pre.lambda /= pre.lambda.sum();
    } else {
      // Degenerate image: take the vertex whose image is nearest to z unless
      // no part of the image is within tolerance.
      double best = std::numeric_limits<double>::infinity();
      int bi = 0;
      bool hit = false;
      for (int i = 0; i <= D; ++i) {
        FacetPoints<D> f;
        int k = 0;
        for (int j = 0; j <= D; ++j)
          if (j != i) f[k++] = p[j];
        hit = hit || facet_distance<D>(z, f) <= tol;
      }
      if (!hit) continue;
      for (int i = 0; i <= D; ++i)
        if ((p[i] - z).norm() < best) {
          best = (p[i] - z).norm();
          bi = i;
        }
      pre.lambda.setZero();
      pre.lambda(bi) = 1.0;
    }
    pre.point = Point<D>::Zero();
    const auto ref = map.mesh().simplex_points(s);
    for (int i = 0; i <= D; ++i) pre.point += pre.lambda(i) * ref[i];
    out.push_back(pre);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degree field.

enum class SigmaKind { Uniform, Mixed, Empty };

struct Sigma {
  SigmaKind kind = SigmaKind::Empty;
  int value = 0;  // common nonzero degree when kind == Uniform
};

inline std::string_view to_string(SigmaKind k) {
  switch (k) {
    case SigmaKind::Uniform: return "Uniform";
    case SigmaKind::Mixed: return "Mixed";
    case SigmaKind::Empty: return "Empty";
  }
  return "?";
}

template <int D>
struct RegionDegree {
  int label = -1;
  bool bounded = true;
  double measure = 0.0;
  std::vector<Point<D>> representatives;
  int degree = 0;
};

template <int D>
struct DegreeReport {
  std::vector<RegionDegree<D>> regions;
  Sigma sigma;
  ComplementDecomposition<D> decomposition;

  /// Degree of the region containing z according to the grid, nullopt when z
  /// falls in a blocked cell.
  std::optional<int> degree_at(const Point<D>& z) const {
    const int l = decomposition.label_at(z);
    if (l < 0) return std::nullopt;
    return regions[l].degree;
  }
  std::vector<int> nonzero_degrees() const {
    std::vector<int> out;
    for (const auto& r : regions)
      if (r.degree != 0) out.push_back(r.degree);
    return out;
  }
  int max_degree() const {
    int m = 0;
    for (const auto& r : regions) m = std::max(m, r.degree);
    return m;
  }
};

inline Sigma summarize_sigma(const std::vector<int>& degrees) {
  Sigma s;
  for (int d : degrees) {
    if (d == 0) continue;
    if (s.kind == SigmaKind::Empty) {
      s.kind = SigmaKind::Uniform;
      s.value = d;
    } else if (d != s.value) {
      s.kind = SigmaKind::Mixed;
      s.value = 0;
    }
  }
  return s;
}

/// Degree on every region of R^D minus y(boundary of sub), evaluated at the
/// region representatives farthest from the image boundary.
template <int D>
DegreeReport<D> degree_field(const PLMap<D>& map, const Submesh<D>& sub,
                             int resolution = default_grid_resolution<D>()) {
  DegreeReport<D> report;
  const auto facets = image_boundary(map, sub);
  report.decomposition = decompose_complement<D>(facets, resolution);
  std::vector<int> degrees;
  for (const auto& region : report.decomposition.regions()) {
    RegionDegree<D> rd;
    rd.label = region.label;
    rd.bounded = region.bounded;
    rd.measure = region.measure;
    rd.representatives = region.representatives;
    std::optional<int> value;
    for (const auto& z : region.representatives) {
      int d = 0;
      try {
        d = degree_boundary(map, sub, z);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::OnImageBoundary || e.code() == ErrorCode::NumericallyAmbiguous) continue;
        throw;
      }
      if (value && *value != d)
        throw Error(ErrorCode::InconsistentRegion, "representatives of region " + std::to_string(region.label) +
                                                       " disagree (" + std::to_string(*value) + " vs " +
                                                       std::to_string(d) + ")");
      value = d;
    }
    if (!value)
      throw Error(ErrorCode::InconsistentRegion,
                  "region " + std::to_string(region.label) + " has no admissible representative");
    if (!region.bounded && *value != 0)
      throw Error(ErrorCode::InconsistentRegion, "unbounded region has degree " + std::to_string(*value));
    rd.degree = *value;
    degrees.push_back(rd.degree);
    report.regions.push_back(std::move(rd));
  }
  report.sigma = summarize_sigma(degrees);
  return report;
}

template <int D>
DegreeReport<D> degree_field(const PLMap<D>& map, int resolution = default_grid_resolution<D>()) {
  return degree_field(map, whole(map.mesh()), resolution);
}

}  // namespace pldeg
