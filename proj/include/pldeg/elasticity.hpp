#pragma once

// Polyconvex energies of PL deformations in a rigid box, projected descent
// under a global invertibility constraint, and certification of the result.

#include "pldeg/conditions.hpp"
#include "pldeg/topology.hpp"

#include <chrono>
#include <complex>

namespace pldeg {

// ---------------------------------------------------------------------------
// Convex polytope (the box Lambda).

template <int D>
struct HalfSpace {
  Point<D> normal;  // unit outward normal
  double offset = 0.0;  // normal . x <= offset
};

template <int D>
class ConvexPolytope {
 public:
  ConvexPolytope() = default;

  static ConvexPolytope box(const Point<D>& lo, const Point<D>& hi) {
    std::vector<Point<D>> verts;
    for (int mask = 0; mask < (1 << D); ++mask) {
      Point<D> p;
      for (int i = 0; i < D; ++i) p(i) = (mask >> i) & 1 ? hi(i) : lo(i);
      verts.push_back(p);
    }
    return from_vertices(verts);
  }

  /// Convex hull of the given points.
  static ConvexPolytope from_vertices(const std::vector<Point<D>>& points) {
    ConvexPolytope out;
    if (points.size() < D + 1) throw Error(ErrorCode::InvalidInput, "polytope needs at least D + 1 vertices");
    const auto bb = bounding_box<D>(points);
    const double scale = std::max(bb.diagonal(), 1e-300);
    if constexpr (D == 2) {
      auto pts = points;
      std::sort(pts.begin(), pts.end(),
                [](const auto& a, const auto& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
      std::vector<Point<2>> hull;
      for (int pass = 0; pass < 2; ++pass) {
        const std::size_t start = hull.size();
        for (const auto& p : pts) {
          while (hull.size() >= start + 2 &&
                 cross2(hull[hull.size() - 1] - hull[hull.size() - 2], p - hull[hull.size() - 2]) <= 1e-12 * scale * scale)
            hull.pop_back();
          hull.push_back(p);
        }
        hull.pop_back();
        std::reverse(pts.begin(), pts.end());
      }
      if (hull.size() < 3) throw Error(ErrorCode::InvalidInput, "polytope vertices are degenerate");
      out.vertices_ = hull;
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point<2> a = hull[i], b = hull[(i + 1) % hull.size()];
        Point<2> n(b.y() - a.y(), a.x() - b.x());
        n.normalize();
        out.faces_.push_back({n, n.dot(a)});
      }
    } else {
      // Small vertex lists: every supporting plane through three points.
      const std::size_t n = points.size();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          for (std::size_t k = j + 1; k < n; ++k) {
            Point<3> nrm = (points[j] - points[i]).cross(points[k] - points[i]);
            if (nrm.norm() <= 1e-12 * scale * scale) continue;
            nrm.normalize();
            int above = 0, below = 0;
            for (const auto& p : points) {
              const double s = nrm.dot(p - points[i]);
              above += s > 1e-12 * scale;
              below += s < -1e-12 * scale;
            }
            if (above && below) continue;
            if (above) nrm = -nrm;
            const double off = nrm.dot(points[i]);
            bool dup = false;
            for (const auto& f : out.faces_) dup = dup || ((f.normal - nrm).norm() < 1e-12 && std::abs(f.offset - off) <= 1e-12 * scale);
            if (!dup) out.faces_.push_back({nrm, off});
          }
      if (out.faces_.size() < 4) throw Error(ErrorCode::InvalidInput, "polytope vertices are degenerate");
      out.vertices_ = points;
    }
    out.diameter_ = scale;
    out.axis_aligned_ = true;
    for (const auto& f : out.faces_)
      out.axis_aligned_ = out.axis_aligned_ && (f.normal.cwiseAbs().maxCoeff() == 1.0);
    out.lo_ = bb.lo;
    out.hi_ = bb.hi;
    return out;
  }

  const std::vector<Point<D>>& vertices() const { return vertices_; }
  const std::vector<HalfSpace<D>>& faces() const { return faces_; }
  double diameter() const { return diameter_; }

  double violation(const Point<D>& p) const {
    double v = 0.0;
    for (const auto& f : faces_) v = std::max(v, f.normal.dot(p) - f.offset);
    return v;
  }
  bool contains(const Point<D>& p, double tol = 0.0) const { return violation(p) <= tol; }

  /// Euclidean projection: a clamp for axis-aligned boxes, Dykstra's
  /// alternating projections otherwise.
  Point<D> project(const Point<D>& p) const {
    if (contains(p)) return p;
    if (axis_aligned_) return p.cwiseMax(lo_).cwiseMin(hi_);
    Point<D> x = p;
    std::vector<Point<D>> inc(faces_.size(), Point<D>::Zero());
    for (int it = 0; it < 2000; ++it) {
      double change = 0.0;
      for (std::size_t i = 0; i < faces_.size(); ++i) {
        const Point<D> y = x + inc[i];
        const double excess = faces_[i].normal.dot(y) - faces_[i].offset;
        const Point<D> nx = excess > 0 ? Point<D>(y - excess * faces_[i].normal) : y;
        inc[i] = y - nx;
        change = std::max(change, (nx - x).norm());
        x = nx;
      }
      if (change <= 1e-15 * diameter_) break;
    }
    // Remove the residual violation left by the iteration.
    for (int it = 0; it < 50 && !contains(x); ++it)
      for (const auto& f : faces_) {
        const double excess = f.normal.dot(x) - f.offset;
        if (excess > 0) x -= excess * f.normal;
      }
    return x;
  }

 private:
  std::vector<Point<D>> vertices_;
  std::vector<HalfSpace<D>> faces_;
  double diameter_ = 0.0;
  bool axis_aligned_ = false;
  Point<D> lo_ = Point<D>::Zero(), hi_ = Point<D>::Zero();
};

// ---------------------------------------------------------------------------
// Energy model.

enum class EnergyFamily { W1, W2, W3 };

inline std::string_view to_string(EnergyFamily f) {
  switch (f) {
    case EnergyFamily::W1: return "W1";
    case EnergyFamily::W2: return "W2";
    case EnergyFamily::W3: return "W3";
  }
  return "?";
}

template <int D>
struct EnergyModel {
  EnergyFamily family = EnergyFamily::W1;
  double p = D;
  double r = 1.0;
  double s = 1.0;
  double c = 1.0;
  double q = 2.0;
  std::vector<Point<D>> force;  // per vertex; empty means zero
  ConvexPolytope<D> box;

  void validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidInput, "energy model: " + what); };
    if (!(p >= D)) bad("p must be >= d");
    if (!(r > 0)) bad("r must be > 0");
    if (family != EnergyFamily::W1 && !(s >= 1)) bad("s must be >= 1");
    if (!(c > 0)) bad("c must be > 0");
    if (!(q > 1)) bad("q must be > 1");
  }

  /// W >= c |cof F|^3 / det^2 holds for these parameters.
  bool controls_inner_distortion() const {
    if (family == EnergyFamily::W1) return p > 6 && r >= 2 * p / (p - 6);
    return p >= 3 && r > 2 && s >= 3 * r / (r - 2);
  }
  /// W >= c (|F|^6 / det^2 + |cof F|^{3q} / det^{2q}) holds for these parameters.
  bool controls_outer_distortion() const {
    if (family == EnergyFamily::W1) return p > 6 && r > 2 * p / (p - 6);
    if (family == EnergyFamily::W3) return p >= 3 && r > 2 && s > 3 * r / (r - 2);
    return false;
  }
  /// Constant in W >= c |cof F|^3 / det^2 from Young's inequality.
  double inner_distortion_constant() const {
    if (family == EnergyFamily::W1) {
      // |cof F|^3 det^-2 <= |F|^6 det^-2 / 3^{3/2} in 3D; Young with p/6 and r/2.
      return 1.0 / std::max(6.0 / p, 2.0 / r);
    }
    return 1.0 / std::max(3.0 / s, 2.0 / r);
  }
};

template <int D>
std::vector<Point<D>> uniform_force(std::size_t vertex_count, const Point<D>& g) {
  return std::vector<Point<D>>(vertex_count, g);
}

/// |F|^{d-1} >= c(d) |cof F| with the best constant: 1 in 2D, sqrt(3) in 3D.
template <int D>
constexpr double cofactor_constant() {
  return D == 2 ? 1.0 : 1.7320508075688772;
}

/// (K^O)^{d-1} >= c(d) K^I: 1 in 2D, 3^{3/2} in 3D.
template <int D>
double distortion_constant() {
  return std::pow(cofactor_constant<D>(), D);
}

template <int D>
Matrix<D> cofactor_norm_gradient_half(const Matrix<D>& f) {
  // Gradient of |cof F|^2 / 2.
  if constexpr (D == 2) {
    return f;
  } else {
    return f.squaredNorm() * f - f * f.transpose() * f;
  }
}

/// W(F); +infinity when det F <= 0.
template <int D>
double energy_density(const EnergyModel<D>& m, const Matrix<D>& f) {
  const double det = f.determinant();
  if (!(det > 0)) return std::numeric_limits<double>::infinity();
  const double nf = f.norm();
  double w = std::pow(nf, m.p) + std::pow(det, -m.r);
  if (m.family != EnergyFamily::W1) w += std::pow(cofactor<D>(f).norm(), m.s);
  if (m.family == EnergyFamily::W3) w += std::pow(nf, 6) / (det * det);
  return w;
}

/// dW/dF for det F > 0.
template <int D>
Matrix<D> energy_density_gradient(const EnergyModel<D>& m, const Matrix<D>& f) {
  const double det = f.determinant();
  if (!(det > 0)) throw Error(ErrorCode::NonpositiveDeterminant, "density gradient needs det F > 0");
  const Matrix<D> cof = cofactor<D>(f);
  const double nf = f.norm();
  Matrix<D> g = m.p * std::pow(nf, m.p - 2) * f - m.r * std::pow(det, -m.r - 1) * cof;
  if (m.family != EnergyFamily::W1) {
    const double nc = cof.norm();
    if (nc > 0) g += m.s * std::pow(nc, m.s - 2) * cofactor_norm_gradient_half<D>(f);
  }
  if (m.family == EnergyFamily::W3)
    g += 6 * std::pow(nf, 4) / (det * det) * f - 2 * std::pow(nf, 6) / (det * det * det) * cof;
  return g;
}

// ---------------------------------------------------------------------------
// Energies on PL maps.

namespace detail {

template <int D>
Matrix<D> reference_inverse(const SimplicialMesh<D>& mesh, int s) {
  return edge_matrix<D>(mesh.simplex_points(s)).inverse();
}

template <int D>
Matrix<D> gradient_from(const SimplicialMesh<D>& mesh, const std::vector<Point<D>>& y, int s,
                        const Matrix<D>& ref_inv) {
  SimplexPoints<D> p;
  for (int i = 0; i <= D; ++i) p[i] = y[mesh.simplices()[s][i]];
  return edge_matrix<D>(p) * ref_inv;
}

}  // namespace detail

/// Elastic part, load part and total of the energy of vertex images y.
struct EnergyParts {
  double elastic = 0.0;
  double load = 0.0;
  double total() const { return elastic + load; }
};

template <int D>
EnergyParts energy_parts(const EnergyModel<D>& m, const SimplicialMesh<D>& mesh, const std::vector<Point<D>>& y) {
  const auto chunks = parallel_chunks<EnergyParts>(mesh.simplex_count(), 16, [&](std::size_t b, std::size_t e, std::size_t) {
    EnergyParts part;
    for (std::size_t s = b; s < e; ++s) {
      const int si = static_cast<int>(s);
      const double vol = mesh.volume(si);
      const Matrix<D> f = detail::gradient_from<D>(mesh, y, si, detail::reference_inverse<D>(mesh, si));
      part.elastic += vol * energy_density<D>(m, f);
      if (!m.force.empty())
        for (int v : mesh.simplices()[s]) part.load += vol / (D + 1) * m.force[v].dot(y[v]);
    }
    return part;
  });
  EnergyParts total;
  for (const auto& c : chunks) {
    total.elastic += c.elastic;
    total.load += c.load;
  }
  return total;
}

/// Sum of vol W(grad y) plus the lumped integral of g . y; +infinity when a
/// determinant is nonpositive.
template <int D>
double total_energy(const EnergyModel<D>& m, const PLMap<D>& map) {
  return energy_parts(m, map.mesh(), map.images()).total();
}

/// Gradient of total_energy with respect to every vertex image.
template <int D>
std::vector<Point<D>> energy_gradient(const EnergyModel<D>& m, const SimplicialMesh<D>& mesh,
                                      const std::vector<Point<D>>& y) {
  std::vector<Point<D>> g(mesh.vertex_count(), Point<D>::Zero());
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    const int si = static_cast<int>(s);
    const double vol = mesh.volume(si);
    const Matrix<D> ref_inv = detail::reference_inverse<D>(mesh, si);
    const Matrix<D> f = detail::gradient_from<D>(mesh, y, si, ref_inv);
    const Matrix<D> cols = vol * energy_density_gradient<D>(m, f) * ref_inv.transpose();
    const auto& idx = mesh.simplices()[s];
    for (int i = 1; i <= D; ++i) {
      g[idx[i]] += cols.col(i - 1);
      g[idx[0]] -= cols.col(i - 1);
    }
    if (!m.force.empty())
      for (int v : idx) g[v] += vol / (D + 1) * m.force[v];
  }
  return g;
}

template <int D>
std::vector<Point<D>> energy_gradient(const EnergyModel<D>& m, const PLMap<D>& map) {
  return energy_gradient(m, map.mesh(), map.images());
}

// ---------------------------------------------------------------------------
// Distortion.

template <int D>
struct DistortionField {
  std::vector<double> outer;
  std::vector<double> inner;

  /// Simplices violating (K^O)^{d-1} >= c(d) K^I beyond rounding.
  std::vector<int> inequality_violations() const {
    std::vector<int> out;
    const double c = distortion_constant<D>();
    for (std::size_t s = 0; s < outer.size(); ++s)
      if (std::pow(outer[s], D - 1) < c * inner[s] * (1 - 1e-12)) out.push_back(static_cast<int>(s));
    return out;
  }
};

template <int D>
DistortionField<D> distortions(const PLMap<D>& map) {
  DistortionField<D> out;
  for (const auto& d : map.differentials()) {
    if (!(d.det > 0)) throw Error(ErrorCode::NonpositiveDeterminant, "distortion needs det > 0");
    out.outer.push_back(std::pow(d.gradient.norm(), D) / d.det);
    out.inner.push_back(std::pow(d.cofactor.norm(), D) * std::pow(d.det, 1 - D));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimization.

namespace detail {

// Smallest t > 0 with a0 + a1 t + a2 t^2 + a3 t^3 = 0, or +infinity.
inline double smallest_positive_root(double a0, double a1, double a2, double a3) {
  const double inf = std::numeric_limits<double>::infinity();
  const double scale = std::max({std::abs(a0), std::abs(a1), std::abs(a2), std::abs(a3)});
  if (scale == 0.0) return inf;
  std::vector<double> roots;
  if (std::abs(a3) <= 1e-14 * scale) {
    if (std::abs(a2) <= 1e-14 * scale) {
      if (a1 != 0.0) roots.push_back(-a0 / a1);
    } else {
      const double disc = a1 * a1 - 4 * a2 * a0;
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        const double qq = -0.5 * (a1 + (a1 >= 0 ? sq : -sq));
        if (qq != 0.0) roots.push_back(a0 / qq);
        roots.push_back(qq / a2);
      }
    }
  } else {
    // Depressed cubic t = u - b/3 for t^3 + b t^2 + c t + d.
    const double b = a2 / a3, c = a1 / a3, d = a0 / a3;
    const double pp = c - b * b / 3, qq = 2 * b * b * b / 27 - b * c / 3 + d;
    const double disc = qq * qq / 4 + pp * pp * pp / 27;
    if (disc > 0) {
      const double sq = std::sqrt(disc);
      roots.push_back(std::cbrt(-qq / 2 + sq) + std::cbrt(-qq / 2 - sq) - b / 3);
    } else {
      const double rr = std::sqrt(std::max(0.0, -pp / 3));
      const double arg = rr > 0 ? std::clamp(-qq / (2 * rr * rr * rr), -1.0, 1.0) : 0.0;
      const double phi = std::acos(arg);
      for (int k = 0; k < 3; ++k) roots.push_back(2 * rr * std::cos((phi - 2 * std::numbers::pi * k) / 3) - b / 3);
    }
  }
  double best = inf;
  for (double t : roots)
    if (t > 0 && t < best) best = t;
  return best;
}

// Coefficients of det(E + t V) in t.
template <int D>
std::array<double, 4> det_polynomial(const Matrix<D>& e, const Matrix<D>& v) {
  if constexpr (D == 2) {
    return {e.determinant(), (cofactor<2>(e).array() * v.array()).sum(), v.determinant(), 0.0};
  } else {
    return {e.determinant(), (cofactor<3>(e).array() * v.array()).sum(), (cofactor<3>(v).array() * e.array()).sum(),
            v.determinant()};
  }
}

}  // namespace detail

/// Largest step along `dir` before some simplex determinant vanishes.
template <int D>
double first_degenerate_step(const SimplicialMesh<D>& mesh, const std::vector<Point<D>>& y,
                             const std::vector<Point<D>>& dir) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < mesh.simplex_count(); ++s) {
    SimplexPoints<D> p, q;
    for (int i = 0; i <= D; ++i) {
      p[i] = y[mesh.simplices()[s][i]];
      q[i] = dir[mesh.simplices()[s][i]];
    }
    const auto a = detail::det_polynomial<D>(edge_matrix<D>(p), edge_matrix<D>(q));
    best = std::min(best, detail::smallest_positive_root(a[0], a[1], a[2], a[3]));
  }
  return best;
}

enum class ConstraintKind { Deg1Loc, CNCPenalty };

inline std::string_view to_string(ConstraintKind k) { return k == ConstraintKind::Deg1Loc ? "deg1loc" : "cncpenalty"; }

struct MinimizeOptions {
  int budget = 2000;
  double gradient_tol = 1e-9;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
  int covering_levels = 3;
  int gate_resolution = 128;
  double penalty_mu = 1.0;
};

template <int D>
struct MinimizationRecord {
  std::vector<double> energies;  // total energy of every accepted iterate, starting with the initial map
  std::vector<double> merits;    // energy plus penalty for CNCPenalty
  std::optional<PLMap<D>> final_map;
  ConstraintKind constraint = ConstraintKind::Deg1Loc;
  Json constraint_log = Json::array();
  int iterations = 0;
  int rejected_by_constraint = 0;
  std::string stop_reason;
  double final_gradient_norm = 0.0;
};

/// Projected gradient descent with Armijo backtracking. A trial is accepted
/// only with every determinant positive, every vertex image in the box and
/// the global constraint intact. The determinant safeguard caps the step at
/// half the first determinant-vanishing step; the CNC penalty enters the
/// merit function but not the search direction.
template <int D>
MinimizationRecord<D> minimize(const EnergyModel<D>& model, const PLMap<D>& initial, ConstraintKind constraint,
                               const MinimizeOptions& opt = {}) {
  model.validate();
  const auto& mesh = initial.mesh();
  const double diam = std::max(model.box.diameter(), initial.image_diameter());
  const double box_tol = 1e-9 * diam;
  if (!initial.all_positive()) throw Error(ErrorCode::InfeasibleInitial, "initial map has a nonpositive determinant");
  for (const auto& p : initial.images())
    if (!model.box.contains(p, box_tol)) throw Error(ErrorCode::InfeasibleInitial, "initial map leaves the box");
  if (!model.force.empty() && model.force.size() != mesh.vertex_count())
    throw Error(ErrorCode::InvalidInput, "force field size does not match the mesh");

  MinimizationRecord<D> rec;
  rec.constraint = constraint;
  const auto covering = inner_covering(mesh, opt.covering_levels, opt.gate_resolution);
  double mu = opt.penalty_mu;

  auto cnc_excess = [&](const PLMap<D>& map) {
    if constexpr (D == 2) {
      const auto sub = whole(mesh);
      return std::max(0.0, integral_det(map, sub) - image_area(map, sub) - (1e-9 * integral_det(map, sub) + map.tau_vol()));
    } else {
      const auto v = check_CNC(map, SampleOptions{20000, 1});
      return v.fails() ? std::max(map.tau_vol(), v.evidence["slack"].template get<double>()) : 0.0;
    }
  };
  auto constraint_ok = [&](const PLMap<D>& map) {
    if (constraint == ConstraintKind::Deg1Loc) return check_DEG1_loc(map, covering, opt.gate_resolution).holds();
    return true;
  };
  auto merit = [&](const PLMap<D>& map, double energy) {
    if (constraint == ConstraintKind::Deg1Loc) return energy;
    const double ex = cnc_excess(map);
    return energy + mu * ex * ex;
  };

  if (!constraint_ok(initial)) throw Error(ErrorCode::InfeasibleInitial, "initial map violates DEG1_loc");
  if (constraint == ConstraintKind::CNCPenalty && cnc_excess(initial) > 0)
    throw Error(ErrorCode::InfeasibleInitial, "initial map violates CNC");

  std::vector<Point<D>> y = initial.images();
  double energy = energy_parts(model, mesh, y).total();
  double current = merit(initial, energy);
  rec.energies.push_back(energy);
  rec.merits.push_back(current);
  double h_min = std::numeric_limits<double>::infinity();
  for (const auto& s : mesh.simplices())
    for (int i = 0; i <= D; ++i)
      for (int j = i + 1; j <= D; ++j) h_min = std::min(h_min, (mesh.vertices()[s[i]] - mesh.vertices()[s[j]]).norm());
  double step = -1.0;

  rec.stop_reason = "budget";
  for (int it = 0; it < opt.budget; ++it) {
    const auto grad = energy_gradient(model, mesh, y);
    // Projected gradient as the stationarity measure.
    double pg = 0.0, gmax = 0.0;
    std::vector<Point<D>> dir(y.size());
    for (std::size_t v = 0; v < y.size(); ++v) {
      dir[v] = -grad[v];
      gmax = std::max(gmax, grad[v].norm());
      pg = std::max(pg, (model.box.project(y[v] - grad[v] * (h_min / std::max(gmax, 1e-300))) - y[v]).norm());
    }
    rec.final_gradient_norm = gmax;
    if (gmax < opt.gradient_tol) {
      rec.stop_reason = "gradient";
      break;
    }
    if (step < 0) step = 0.1 * h_min / gmax;
    const double t_cap = 0.5 * first_degenerate_step(mesh, y, dir);
    double t = std::min(2.0 * step, t_cap);
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt, t *= opt.shrink) {
      std::vector<Point<D>> trial(y.size());
      double predicted = 0.0;
      for (std::size_t v = 0; v < y.size(); ++v) {
        trial[v] = model.box.project(y[v] + t * dir[v]);
        predicted += grad[v].dot(trial[v] - y[v]);
      }
      const auto parts = energy_parts(model, mesh, trial);
      if (!std::isfinite(parts.total())) continue;
      PLMap<D> trial_map(initial.mesh_ptr(), trial);
      if (!trial_map.all_positive()) continue;
      const double trial_merit = merit(trial_map, parts.total());
      if (!(trial_merit <= current + opt.armijo * predicted) || !(trial_merit < current)) continue;
      if (!constraint_ok(trial_map)) {
        ++rec.rejected_by_constraint;
        rec.constraint_log.push_back(Json{{"iteration", it}, {"step", t}, {"event", "rejected"}});
        continue;
      }
      if (constraint == ConstraintKind::CNCPenalty) {
        const double ex = cnc_excess(trial_map);
        if (ex > 0) {
          mu *= 10;
          rec.constraint_log.push_back(Json{{"iteration", it}, {"excess", ex}, {"event", "mu"}, {"mu", mu}});
        }
      }
      y = std::move(trial);
      energy = parts.total();
      current = merit(trial_map, energy);
      rec.energies.push_back(energy);
      rec.merits.push_back(current);
      step = t;
      accepted = true;
      break;
    }
    rec.iterations = it + 1;
    if (!accepted) {
      rec.stop_reason = "line search";
      break;
    }
    (void)pg;
  }
  rec.final_map.emplace(initial.mesh_ptr(), y);
  return rec;
}

// ---------------------------------------------------------------------------
// Certification.

template <int D>
struct MinimizerCertificate {
  ConditionVerdict injective_ae;  // (a)
  std::optional<bool> globally_injective;                 // (b), when W controls K^O
  std::vector<std::pair<int, int>> overlap_witnesses;
  std::optional<bool> injective_on_reduced_domain;        // (c), when W controls K^I only
  std::vector<int> excluded_vertices;

  bool issued_a() const { return injective_ae.holds(); }

  Json to_json() const {
    Json j;
    j["a_injective_ae"] = injective_ae.to_json();
    if (globally_injective) j["b_globally_injective"] = *globally_injective;
    if (injective_on_reduced_domain) {
      j["c_injective_on_reduced_domain"] = *injective_on_reduced_domain;
      j["c_excluded_vertices"] = excluded_vertices;
    }
    Json w = Json::array();
    for (const auto& [a, b] : overlap_witnesses) w.push_back(Json::array({a, b}));
    j["overlap_witnesses"] = w;
    return j;
  }
};

/// (a) injectivity a.e. by sampling; (b) global injectivity by the exact
/// pairwise overlap test when the energy controls the outer distortion;
/// (c) otherwise injectivity on the reduced domain when it controls the
/// inner distortion, with the excluded vertices reported.
template <int D>
MinimizerCertificate<D> certify_minimizer(const EnergyModel<D>& model, const PLMap<D>& map,
                                          const SampleOptions& samples = {}) {
  MinimizerCertificate<D> cert;
  cert.injective_ae = check_injective_ae(map, samples);
  if (model.controls_outer_distortion()) {
    cert.overlap_witnesses = image_overlaps(map);
    cert.globally_injective = cert.overlap_witnesses.empty();
  } else {
    const auto rd = reduced_domain(map, whole(map.mesh()));
    cert.excluded_vertices = rd.excluded_vertices();
    bool ok = true;
    // Overlaps among simplices of the reduced domain.
    for (const auto& [a, b] : image_overlaps(map, 1u << 20))
      if (rd.included.contains(a) && rd.included.contains(b)) {
        ok = false;
        cert.overlap_witnesses.emplace_back(a, b);
      }
    cert.injective_on_reduced_domain = ok;
  }
  return cert;
}

template <int D>
MinimizerCertificate<D> certify_minimizer(const EnergyModel<D>& model, const MinimizationRecord<D>& rec,
                                          const SampleOptions& samples = {}) {
  if (!rec.final_map) throw Error(ErrorCode::InvalidInput, "record has no final map");
  return certify_minimizer(model, *rec.final_map, samples);
}

}  // namespace pldeg
