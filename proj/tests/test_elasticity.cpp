#include "pldeg/elasticity.hpp"
#include "pldeg/random_maps.hpp"

#include <gtest/gtest.h>

using namespace pldeg;

namespace {

template <int D>
EnergyModel<D> model(EnergyFamily f, double p, double r, double s = 1.0) {
  EnergyModel<D> m;
  m.family = f;
  m.p = p;
  m.r = r;
  m.s = s;
  Point<D> lo = Point<D>::Constant(-10), hi = Point<D>::Constant(10);
  m.box = ConvexPolytope<D>::box(lo, hi);
  return m;
}

template <int D>
Matrix<D> random_positive_matrix(Rng& rng) {
  while (true) {
    Matrix<D> f;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) f(i, j) = (i == j ? 1.0 : 0.0) + 0.5 * rng.normal();
    if (f.determinant() > 0.05) return f;
  }
}

}  // namespace

TEST(EnergyDensity, IdentityValues) {
  const auto m3 = model<3>(EnergyFamily::W1, 3, 2);
  EXPECT_NEAR(energy_density<3>(m3, Matrix<3>::Identity()), std::pow(3.0, 1.5) + 1.0, 1e-14);
  const auto w2 = model<2>(EnergyFamily::W2, 2, 1, 2);
  EXPECT_NEAR(energy_density<2>(w2, Matrix<2>::Identity()), 2 + 1 + 2, 1e-14);
  const auto w3 = model<2>(EnergyFamily::W3, 2, 1, 2);
  EXPECT_NEAR(energy_density<2>(w3, Matrix<2>::Identity()), 5 + 8, 1e-13);
}

TEST(EnergyDensity, InfiniteWithoutOrientation) {
  const auto m = model<2>(EnergyFamily::W1, 2, 1);
  Matrix<2> f;
  f << 1, 0, 0, -1;
  EXPECT_TRUE(std::isinf(energy_density<2>(m, f)));
  EXPECT_TRUE(std::isinf(energy_density<2>(m, Matrix<2>::Zero())));
  EXPECT_THROW(energy_density_gradient<2>(m, f), Error);
}

TEST(TotalEnergy, IdentityOnUnitSquare) {
  auto mesh = share(rectangle_mesh(4, 4));
  auto m = model<2>(EnergyFamily::W1, 2, 1);
  const auto id = identity_map(mesh);
  EXPECT_NEAR(total_energy(m, id), 3.0, 1e-13);
  m.force = uniform_force<2>(mesh->vertex_count(), Point<2>(0, -1));
  EXPECT_NEAR(total_energy(m, id), 2.5, 1e-13);
}

TEST(TotalEnergy, InfiniteForFoldedMap) {
  auto mesh = share(rectangle_mesh(2, 2));
  auto y = mesh->vertices();
  for (auto& p : y) p.x() = -p.x();
  const auto m = model<2>(EnergyFamily::W1, 2, 1);
  EXPECT_TRUE(std::isinf(total_energy(m, PLMap<2>(mesh, y))));
}

TEST(Distortion, TwoDimensionalValues) {
  auto mesh = share(rectangle_mesh(1, 1));
  auto apply = [&](const Matrix<2>& a) {
    return PLMap<2>(mesh, map_vertices<2>(*mesh, [&](const Point<2>& x) -> Point<2> { return a * x; }));
  };
  Matrix<2> conformal;
  conformal << 3 * std::cos(0.4), -3 * std::sin(0.4), 3 * std::sin(0.4), 3 * std::cos(0.4);
  Matrix<2> stretch;
  stretch << 2, 0, 0, 1;
  EXPECT_NEAR(distortions(apply(Matrix<2>::Identity())).outer[0], 2.0, 1e-14);
  EXPECT_NEAR(distortions(apply(conformal)).outer[0], 2.0, 1e-13);
  const auto d = distortions(apply(stretch));
  EXPECT_NEAR(d.outer[0], 2.5, 1e-14);
  EXPECT_NEAR(d.inner[0], 2.5, 1e-14);
}

TEST(Distortion, InequalityOnRandomMaps) {
  Rng rng(7);
  for (int k = 0; k < 5; ++k) {
    auto mesh = share(box_mesh(2, 2, 2));
    const auto map = random_orientation_preserving<3>(mesh, rng);
    EXPECT_TRUE(distortions(map).inequality_violations().empty());
  }
  // Equality for conformal matrices in 3D.
  const Matrix<3> id = 2.0 * Matrix<3>::Identity();
  const double ko = std::pow(id.norm(), 3) / id.determinant();
  const double ki = std::pow(cofactor<3>(id).norm(), 3) / (id.determinant() * id.determinant());
  EXPECT_NEAR(ko * ko, distortion_constant<3>() * ki, 1e-12);
}

TEST(EnergyModel, DistortionControl) {
  const auto w2 = model<3>(EnergyFamily::W2, 3, 3, 9);
  EXPECT_TRUE(w2.controls_inner_distortion());
  EXPECT_FALSE(w2.controls_outer_distortion());
  EXPECT_NEAR(w2.inner_distortion_constant(), 1.5, 1e-15);
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const Matrix<3> f = random_positive_matrix<3>(rng);
    const double det = f.determinant();
    EXPECT_GE(energy_density<3>(w2, f) * (1 + 1e-12),
              w2.inner_distortion_constant() * std::pow(cofactor<3>(f).norm(), 3) / (det * det));
  }
  EXPECT_TRUE(model<3>(EnergyFamily::W3, 3, 3, 10).controls_outer_distortion());
  EXPECT_FALSE(model<3>(EnergyFamily::W3, 3, 3, 9).controls_outer_distortion());
  EXPECT_TRUE(model<3>(EnergyFamily::W1, 8, 9).controls_outer_distortion());
  EXPECT_TRUE(model<3>(EnergyFamily::W1, 8, 8).controls_inner_distortion());
  EXPECT_FALSE(model<3>(EnergyFamily::W1, 8, 8).controls_outer_distortion());
}

TEST(EnergyModel, Validation) {
  auto m = model<3>(EnergyFamily::W1, 2, 1);
  EXPECT_THROW(m.validate(), Error);
  m.p = 3;
  m.r = 0;
  EXPECT_THROW(m.validate(), Error);
}

TEST(EnergyDensity, FrameIndifference) {
  Rng rng(11);
  const auto m = model<3>(EnergyFamily::W3, 3, 3, 9);
  for (int k = 0; k < 50; ++k) {
    const Matrix<3> f = random_positive_matrix<3>(rng);
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    const Matrix<3> r = q.normalized().toRotationMatrix();
    const double w = energy_density<3>(m, f);
    EXPECT_LT(std::abs(energy_density<3>(m, r * f) - w) / w, 1e-12);
  }
}

template <int D>
double gradient_fd_error(const EnergyModel<D>& m, const PLMap<D>& map) {
  const auto g = energy_gradient(m, map);
  const double h = 1e-6 * map.image_diameter();
  double err = 0.0, scale = 0.0;
  auto y = map.images();
  for (std::size_t v = 0; v < y.size(); ++v)
    for (int i = 0; i < D; ++i) {
      const double keep = y[v](i);
      y[v](i) = keep + h;
      const double ep = energy_parts(m, map.mesh(), y).total();
      y[v](i) = keep - h;
      const double em = energy_parts(m, map.mesh(), y).total();
      y[v](i) = keep;
      err = std::max(err, std::abs((ep - em) / (2 * h) - g[v](i)));
      scale = std::max(scale, std::abs(g[v](i)));
    }
  return err / scale;
}

TEST(EnergyGradient, MatchesFiniteDifferences2D) {
  Rng rng(5);
  for (auto fam : {EnergyFamily::W1, EnergyFamily::W2, EnergyFamily::W3}) {
    auto m = model<2>(fam, 3, 2, 4);
    auto mesh = share(rectangle_mesh(3, 3));
    m.force = uniform_force<2>(mesh->vertex_count(), Point<2>(0.3, -1));
    const auto map = random_orientation_preserving<2>(mesh, rng);
    EXPECT_LT(gradient_fd_error(m, map), 1e-5) << to_string(fam);
  }
}

TEST(EnergyGradient, MatchesFiniteDifferences3D) {
  Rng rng(6);
  for (auto fam : {EnergyFamily::W1, EnergyFamily::W2, EnergyFamily::W3}) {
    const auto m = model<3>(fam, 3, 3, 9);
    auto mesh = share(box_mesh(2, 2, 1));
    const auto map = random_orientation_preserving<3>(mesh, rng);
    EXPECT_LT(gradient_fd_error(m, map), 1e-5) << to_string(fam);
  }
}

TEST(Polytope, BoxClampAndGeneralProjection) {
  const auto box = ConvexPolytope<2>::box(Point<2>(0, 0), Point<2>(2, 1));
  EXPECT_EQ(box.faces().size(), 4u);
  EXPECT_TRUE((box.project(Point<2>(3, -1)) - Point<2>(2, 0)).norm() < 1e-15);
  const auto tri = ConvexPolytope<2>::from_vertices({Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1), Point<2>(0.2, 0.2)});
  EXPECT_EQ(tri.faces().size(), 3u);
  EXPECT_LT((tri.project(Point<2>(1, 1)) - Point<2>(0.5, 0.5)).norm(), 1e-9);
  EXPECT_LT((tri.project(Point<2>(2, -1)) - Point<2>(1, 0)).norm(), 1e-9);
  const auto cube = ConvexPolytope<3>::box(Point<3>(0, 0, 0), Point<3>(1, 1, 1));
  EXPECT_EQ(cube.faces().size(), 6u);
  const auto tet = ConvexPolytope<3>::from_vertices(
      {Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0), Point<3>(0, 0, 1)});
  const Point<3> pr = tet.project(Point<3>(1, 1, 1));
  EXPECT_LT((pr - Point<3>::Constant(1.0 / 3)).norm(), 1e-9);
}

TEST(DeterminantSafeguard, FirstDegenerateStep) {
  EXPECT_NEAR(detail::smallest_positive_root(2, -3, 1, 0), 1.0, 1e-14);
  EXPECT_NEAR(detail::smallest_positive_root(-6, 11, -6, 1), 1.0, 1e-12);
  EXPECT_NEAR(detail::smallest_positive_root(6, -11, 6, -1), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(detail::smallest_positive_root(1, 1, 0, 0)));
  // Squashing the top row of a unit square degenerates at t = 1.
  auto mesh = share(rectangle_mesh(1, 1));
  std::vector<Point<2>> dir(mesh->vertex_count(), Point<2>::Zero());
  for (std::size_t v = 0; v < dir.size(); ++v)
    if (mesh->vertices()[v].y() > 0.5) dir[v] = Point<2>(0, -1);
  EXPECT_NEAR(first_degenerate_step<2>(*mesh, mesh->vertices(), dir), 1.0, 1e-14);
  auto mesh3 = share(box_mesh(1, 1, 1));
  std::vector<Point<3>> d3(mesh3->vertex_count());
  for (std::size_t v = 0; v < d3.size(); ++v) d3[v] = -0.5 * mesh3->vertices()[v];
  EXPECT_NEAR(first_degenerate_step<3>(*mesh3, mesh3->vertices(), d3), 2.0, 1e-12);
}

namespace {

struct Scenario {
  EnergyModel<2> model;
  PLMap<2> initial;
};

Scenario falling_square(int n) {
  auto mesh = share(rectangle_mesh(n, n));
  EnergyModel<2> m;
  m.family = EnergyFamily::W2;
  m.p = 3;
  m.r = 3;
  m.s = 9;
  m.box = ConvexPolytope<2>::box(Point<2>(0, 0), Point<2>(2, 2));
  m.force = uniform_force<2>(mesh->vertex_count(), Point<2>(0, -1));
  PLMap<2> init(mesh, map_vertices<2>(*mesh, [](const Point<2>& x) -> Point<2> { return x + Point<2>(0.5, 0.5); }));
  return {m, init};
}

}  // namespace

TEST(Minimize, DescendsInsideTheBox) {
  auto sc = falling_square(4);
  MinimizeOptions opt;
  opt.budget = 150;
  const auto rec = minimize(sc.model, sc.initial, ConstraintKind::Deg1Loc, opt);
  ASSERT_TRUE(rec.final_map);
  ASSERT_GE(rec.energies.size(), 2u);
  for (std::size_t i = 1; i < rec.energies.size(); ++i) EXPECT_LE(rec.energies[i], rec.energies[i - 1]);
  EXPECT_LT(rec.energies.back(), rec.energies.front());
  EXPECT_TRUE(rec.final_map->all_positive());
  for (const auto& p : rec.final_map->images()) EXPECT_TRUE(sc.model.box.contains(p, 1e-12));
  EXPECT_TRUE(check_DEG1_loc(*rec.final_map, inner_covering(rec.final_map->mesh(), 3, 128), 128).holds());
  const auto cert = certify_minimizer(sc.model, rec, SampleOptions{20000, 1});
  EXPECT_TRUE(cert.issued_a());
  ASSERT_TRUE(cert.injective_on_reduced_domain);
  EXPECT_TRUE(*cert.injective_on_reduced_domain);
  EXPECT_FALSE(cert.globally_injective);
}

TEST(Minimize, PenaltyMode) {
  auto sc = falling_square(3);
  MinimizeOptions opt;
  opt.budget = 40;
  const auto rec = minimize(sc.model, sc.initial, ConstraintKind::CNCPenalty, opt);
  for (std::size_t i = 1; i < rec.merits.size(); ++i) EXPECT_LE(rec.merits[i], rec.merits[i - 1]);
  EXPECT_EQ(check_CNC(*rec.final_map, SampleOptions{0, 1}).verdict, Verdict::Holds);
}

TEST(Minimize, InfeasibleInitial) {
  auto sc = falling_square(2);
  auto y = sc.initial.images();
  y[0] = Point<2>(-1, 0.5);
  EXPECT_THROW(
      {
        try {
          minimize(sc.model, PLMap<2>(sc.initial.mesh_ptr(), y), ConstraintKind::Deg1Loc);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::InfeasibleInitial);
          throw;
        }
      },
      Error);
  auto flipped = sc.initial.images();
  for (auto& p : flipped) p.x() = 2.0 - p.x();
  EXPECT_THROW(minimize(sc.model, PLMap<2>(sc.initial.mesh_ptr(), flipped), ConstraintKind::Deg1Loc), Error);
}

TEST(Certify, OuterControlChecksGlobalInjectivity) {
  auto mesh = share(rectangle_mesh(3, 3));
  const auto m = model<2>(EnergyFamily::W3, 3, 3, 10);
  const auto cert = certify_minimizer(m, identity_map(mesh), SampleOptions{5000, 1});
  ASSERT_TRUE(cert.globally_injective);
  EXPECT_TRUE(*cert.globally_injective);
  EXPECT_FALSE(cert.injective_on_reduced_domain);
}
