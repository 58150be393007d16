#include "pldeg/random_maps.hpp"

#include <gtest/gtest.h>

using namespace pldeg;

namespace {

PLMap<2> scaled_square(double sx, double sy) {
  auto mesh = share(rectangle_mesh(4, 4));
  return PLMap<2>(mesh, map_vertices<2>(*mesh, [&](const Point<2>& x) { return Point<2>(sx * x.x(), sy * x.y()); }));
}

}  // namespace

TEST(Differentials, Identity) {
  const auto map = identity_map(share(rectangle_mesh(3, 3)));
  for (const auto& d : pl_differentials(map)) {
    EXPECT_NEAR((d.gradient - Matrix<2>::Identity()).norm(), 0.0, 1e-14);
    EXPECT_NEAR(d.det, 1.0, 1e-14);
    EXPECT_NEAR((d.cofactor - Matrix<2>::Identity()).norm(), 0.0, 1e-14);
  }
}

TEST(Differentials, Scaling) {
  for (const auto& d : pl_differentials(scaled_square(2, 2))) {
    EXPECT_NEAR(d.det, 4.0, 1e-13);
    EXPECT_NEAR((d.cofactor - 2.0 * Matrix<2>::Identity()).norm(), 0.0, 1e-13);
  }
}

TEST(Differentials, CofactorIdentityOnRandom3DMap) {
  Rng rng(21);
  const auto map = random_orientation_preserving<3>(share(box_mesh(2, 2, 2)), rng);
  for (const auto& d : pl_differentials(map)) {
    const Matrix<3> r = d.cofactor.transpose() * d.gradient - d.det * Matrix<3>::Identity();
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-9 * d.gradient.squaredNorm());
  }
}

TEST(Degree, IdentityCentroid) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  const Point<2> z(0.5 + 1e-3, 0.5 + 2e-3);
  EXPECT_EQ(degree_regular_sum(map, z), 1);
  EXPECT_EQ(degree_boundary(map, z), 1);
  EXPECT_EQ(degree_boundary(map, Point<2>(3, 3)), 0);
}

TEST(Degree, ReflectionGivesMinusOne) {
  const auto map = scaled_square(1, -1);
  const Point<2> z(0.37, -0.41);
  EXPECT_EQ(degree_regular_sum(map, z), -1);
  EXPECT_EQ(degree_boundary(map, z), -1);
}

TEST(Degree, QueriesOnTheImageBoundaryAreRejected) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  for (auto fn : {0, 1}) {
    try {
      if (fn == 0) degree_boundary(map, Point<2>(0.0, 0.3));
      else degree_regular_sum(map, Point<2>(1.0, 0.3));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OnImageBoundary);
    }
  }
  try {
    degree_regular_sum(map, Point<2>(0.25, 0.3));  // on an interior grid line
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRegularValue);
  }
}

TEST(Degree, BoundaryAgreesWithRegularSumOnRandomMaps) {
  Rng rng(1234);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto map = random_orientation_preserving<2>(share(random_rectangle_mesh(rng)), rng);
    for (int k = 0; k < 20; ++k) {
      const auto z = random_value(map, rng);
      try {
        const int a = degree_regular_sum(map, z);
        EXPECT_EQ(a, degree_boundary(map, z));
        ++compared;
      } catch (const Error&) {
      }
    }
  }
  EXPECT_GT(compared, 400);
}

TEST(Degree, BoundaryAgreesWithRegularSumOnFoldedMaps) {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto map = random_folded<2>(share(rectangle_mesh(5, 5)), rng, 0.3);
    for (int k = 0; k < 20; ++k) {
      const auto z = random_value(map, rng);
      try {
        EXPECT_EQ(degree_regular_sum(map, z), degree_boundary(map, z));
      } catch (const Error&) {
      }
    }
  }
}

TEST(Degree, ThreeDimensionalAgreement) {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto map = random_orientation_preserving<3>(share(box_mesh(2, 2, 2)), rng);
    for (int k = 0; k < 10; ++k) {
      const auto z = random_value(map, rng);
      try {
        EXPECT_EQ(degree_regular_sum(map, z), degree_boundary(map, z));
      } catch (const Error&) {
      }
    }
  }
}

TEST(DegreeIntegral, IdentityCentroid) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  MollifierSpec<2> h{Point<2>(0.5, 0.5), 0.1};
  EXPECT_NEAR(degree_integral(map, whole(map.mesh()), h), 1.0, 1e-3);
}

TEST(DegreeIntegral, UnboundedRegionIsZero) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  MollifierSpec<2> h{Point<2>(2.5, 0.5), 0.5};
  EXPECT_NEAR(degree_integral(map, whole(map.mesh()), h), 0.0, 1e-3);
}

TEST(DegreeIntegral, ReflectionAndThreeD) {
  MollifierSpec<2> h{Point<2>(0.5, -0.5), 0.3};
  const auto r = scaled_square(1, -1);
  EXPECT_NEAR(degree_integral(r, whole(r.mesh()), h), -1.0, 1e-3);
  const auto cube = identity_map(share(box_mesh(2, 2, 2)));
  MollifierSpec<3> h3{Point<3>(0.5, 0.5, 0.5), 0.3};
  EXPECT_NEAR(degree_integral(cube, whole(cube.mesh()), h3), 1.0, 1e-3);
}

TEST(DegreeIntegral, SupportCrossingBoundaryIsRejected) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  MollifierSpec<2> h{Point<2>(0.5, 0.5), 0.6};
  try {
    degree_integral(map, whole(map.mesh()), h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportCrossesImageBoundary);
  }
}

TEST(DegreeIntegral, HatIsNormalized) {
  // Exact integral of the normalized hat over a large square containing its support.
  MollifierSpec<2> h{Point<2>(0.1, -0.2), 0.37};
  const auto map = identity_map(share(rectangle_mesh(3, 3, Point<2>(-1, -1), Point<2>(1, 1))));
  EXPECT_NEAR(degree_integral(map, whole(map.mesh()), h), 1.0, 1e-4);
}

TEST(DegreeField, IdentitySquare) {
  const auto rep = degree_field(identity_map(share(rectangle_mesh(4, 4))));
  ASSERT_EQ(rep.regions.size(), 2u);
  std::vector<int> d;
  for (const auto& r : rep.regions) d.push_back(r.degree);
  std::sort(d.begin(), d.end());
  EXPECT_EQ(d, (std::vector<int>{0, 1}));
  EXPECT_EQ(rep.sigma.kind, SigmaKind::Uniform);
  EXPECT_EQ(rep.sigma.value, 1);
}

TEST(DegreeField, Reflection) {
  const auto rep = degree_field(scaled_square(1, -1));
  EXPECT_EQ(rep.sigma.kind, SigmaKind::Uniform);
  EXPECT_EQ(rep.sigma.value, -1);
}

TEST(Sigma, Summary) {
  EXPECT_EQ(summarize_sigma({0, 0}).kind, SigmaKind::Empty);
  EXPECT_EQ(summarize_sigma({0, 2, 2}).value, 2);
  EXPECT_EQ(summarize_sigma({0, 1, -1}).kind, SigmaKind::Mixed);
}

TEST(Preimages, IdentityCentroid) {
  const auto map = identity_map(share(rectangle_mesh(4, 4)));
  const Point<2> z(0.4, 0.3);
  const auto pre = enumerate_preimages(map, whole(map.mesh()), z, 1e-12);
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_NEAR((pre[0].point - z).norm(), 0.0, 1e-14);
}
