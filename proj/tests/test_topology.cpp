#include "pldeg/fixtures.hpp"
#include "pldeg/random_maps.hpp"
#include "pldeg/topology.hpp"

#include <gtest/gtest.h>

using namespace pldeg;

TEST(TopologicalImage, IdentityIsTheDomain) {
  const auto map = identity_map(share(rectangle_mesh(6, 6)));
  const auto im = topological_image(map, whole(map.mesh()), 128);
  ASSERT_EQ(im.regions().size(), 1u);
  EXPECT_NEAR(im.measure(), 1.0, 0.05);
  EXPECT_TRUE(in_topological_image(map, whole(map.mesh()), Point<2>(0.3, 0.4)));
  EXPECT_FALSE(in_topological_image(map, whole(map.mesh()), Point<2>(1.3, 0.4)));
  EXPECT_FALSE(in_topological_image(map, whole(map.mesh()), Point<2>(1.0, 0.4)));
}

TEST(LocalizedImage, LevelsGrow) {
  const auto map = identity_map(share(rectangle_mesh(12, 12)));
  const auto cov = inner_covering(map.mesh(), 3, 64);
  const auto loc = localized_image(map, cov, 128);
  const auto m = loc.level_measures();
  ASSERT_EQ(m.size(), 3u);
  for (std::size_t i = 1; i < m.size(); ++i) EXPECT_GE(m[i], m[i - 1]);
  EXPECT_TRUE(loc.contains(map, Point<2>(0.5, 0.5)));
  EXPECT_FALSE(loc.contains(map, Point<2>(0.02, 0.5)));
}

TEST(LocalizedImage, ContactEnlargesTheImage) {
  // The end of the overlapping strip lands inside the doubly covered band:
  // that value lies on y(boundary) but inner levels cover it.
  const auto f = fixture_wrap(16, 4, 8);
  const auto cov = inner_covering(*f.mesh, 3, 64);
  const auto loc = localized_image(f.map, cov, 128);
  const Point<2> end(0.0, -1.5);
  EXPECT_FALSE(in_topological_image(f.map, whole(*f.mesh), end));
  EXPECT_TRUE(loc.contains(f.map, end));
}

TEST(Preimages, AngleDoublingHasTwoPieces) {
  const auto f = fixture_angle_doubling(32);
  const Point<2> z(0.31, 0.17);
  const auto comps = preimage_components(f.map, whole(*f.mesh), z, f.map.tau_geom());
  ASSERT_EQ(comps.pieces.size(), 2u);
  for (const auto& p : comps.pieces) EXPECT_FALSE(p.touches_boundary);
  int total = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto iso = isolate_component(f.map, whole(*f.mesh), comps, i, 8);
    EXPECT_EQ(iso.degree, 1);
    EXPECT_GT(iso.boundary_distance, f.map.tau_deg());
    total += iso.degree;
  }
  EXPECT_EQ(total, degree_boundary(f.map, z));
}

TEST(Preimages, CoarseEtaMergesPieces) {
  const auto f = fixture_angle_doubling(32);
  const Point<2> z(0.05, 0.02);
  const auto coarse = preimage_components(f.map, whole(*f.mesh), z, 0.5);
  ASSERT_EQ(coarse.pieces.size(), 1u);
  try {
    isolate_component(f.map, whole(*f.mesh), coarse, 0, 4);
    FAIL() << "expected CannotSeparate";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CannotSeparate);
  }
  EXPECT_EQ(preimage_components(f.map, whole(*f.mesh), z, 1e-9).pieces.size(), 2u);
}

TEST(Preimages, EmptyPreimageThrows) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  try {
    preimage_components(map, whole(map.mesh()), Point<2>(3, 3), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPreimage);
  }
}

TEST(Preimages, DefaultEtaScalesWithLocalEdges) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  EXPECT_NEAR(default_eta(map, whole(map.mesh()), Point<2>(0.3, 0.3)), 2.0 * std::sqrt(2.0) / 4, 1e-12);
}

TEST(Isolation, RandomOrientationPreservingMaps) {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mesh = share(rectangle_mesh(12, 12));
    const auto map = random_orientation_preserving<2>(mesh, rng);
    const auto sub = whole(*mesh);
    const Point<2> x(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8));
    const auto loc = locate_point(*mesh, x);
    Point<2> z = Point<2>::Zero();
    const auto p = map.image_simplex(loc.simplex);
    const auto lambda = barycentric<2>(x, mesh->simplex_points(loc.simplex));
    for (int i = 0; i < 3; ++i) z += lambda(i) * p[i];
    const auto comps = preimage_components(map, sub, z, map.tau_geom());
    ASSERT_EQ(comps.pieces.size(), 1u);
    for (int n : {1, 4, 16}) {
      const auto iso = isolate_component(map, sub, comps, 0, n);
      EXPECT_EQ(iso.degree, 1);
      const double h = 1.0 / 12 * std::sqrt(2.0);
      EXPECT_LE(iso.slack, std::max(1.0 / n, 2 * h) + 1e-12);
    }
  }
}

TEST(Isolation, RejectsBoundaryPieces) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  const auto comps = preimage_components(map, whole(map.mesh()), Point<2>(0.0, 0.5), 1e-9);
  ASSERT_TRUE(comps.pieces.front().touches_boundary);
  EXPECT_THROW(isolate_component(map, whole(map.mesh()), comps, 0, 4), Error);
}

TEST(ReducedDomain, PositiveMapExcludesNothing) {
  const auto f = fixture_angle_doubling(32);
  const auto rd = reduced_domain(f.map, whole(*f.mesh));
  EXPECT_TRUE(rd.excluded_vertices().empty());
  EXPECT_TRUE(rd.excluded_simplices.empty());
  EXPECT_TRUE(rd.slits.empty());
}

TEST(ReducedDomain, CollapsedSegmentIsExcluded) {
  const auto f = fixture_collapse();
  const auto sub = whole(*f.mesh);
  const auto rd = reduced_domain(f.map, sub);
  const auto ex = rd.excluded_vertices();
  ASSERT_EQ(ex.size(), 2u);
  for (int v : ex) {
    EXPECT_NEAR(f.mesh->vertices()[v].x(), 1.0, 1e-12);
    EXPECT_LE(f.mesh->vertices()[v].y(), 0.25 + 1e-12);
  }
  EXPECT_FALSE(rd.excluded_simplices.empty());
  EXPECT_EQ(rd.slits.size(), 1u);
  EXPECT_TRUE(boundary_image_mismatches(f.map, sub, rd).empty());
  const auto check = restrict_check(f.map, sub, rd, {Point<2>(0.61, 0.37), Point<2>(1.02, 0.3)}, 128);
  EXPECT_TRUE(check.holds);
  EXPECT_GT(check.compared, 0);
}

TEST(ReducedDomain, FoldedMapsSatisfyRestriction) {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto mesh = share(rectangle_mesh(6, 6));
    const auto map = random_folded<2>(mesh, rng, 0.08);
    const auto sub = whole(*mesh);
    const auto rd = reduced_domain(map, sub);
    const auto check = restrict_check(map, sub, rd, {}, 96);
    EXPECT_TRUE(check.holds) << (check.failures.empty() ? "" : check.failures.front());
  }
}

TEST(Strictness, PositiveDeterminantsAreStrict) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  EXPECT_EQ(check_strictly_orientation_preserving(map).verdict, Strictness::Strict);
}

TEST(Strictness, ReflectionIsNotStrict) {
  const auto mesh = share(rectangle_mesh(6, 6));
  const PLMap<2> map(mesh, map_vertices<2>(*mesh, [](const Point<2>& x) { return Point<2>(-x.x(), x.y()); }));
  const auto v = check_strictly_orientation_preserving(map);
  EXPECT_EQ(v.verdict, Strictness::NotStrict);
  EXPECT_TRUE(v.witness_value.has_value());
}

TEST(Strictness, ConstantPatchIsNotStrict) {
  const auto mesh = share(rectangle_mesh(12, 12));
  const Point<2> c(0.5, 0.5);
  const PLMap<2> map(mesh, map_vertices<2>(*mesh, [&](const Point<2>& x) -> Point<2> {
                       return (x - c).norm() < 0.3 ? c : x;
                     }));
  const auto v = check_strictly_orientation_preserving(map);
  EXPECT_EQ(v.verdict, Strictness::NotStrict);
  EXPECT_FALSE(v.witness_value.has_value());
}
