#include "pldeg/fixtures.hpp"

#include <gtest/gtest.h>

using namespace pldeg;

namespace {

int preimage_count(const PLMap<2>& map, const Point<2>& z) {
  const auto sub = whole(map.mesh());
  return static_cast<int>(enumerate_preimages(map, sub, nearby_regular_value(map, sub, z), 0.0).size());
}

void check_expectations(const Fixture& f) {
  const auto sub = whole(*f.mesh);
  for (const auto& e : f.expectations) {
    if (e.kind == "degree") {
      EXPECT_EQ(degree_boundary(f.map, e.query), e.expected) << f.name << ": " << e.note;
      EXPECT_EQ(degree_regular_sum(f.map, sub, nearby_regular_value(f.map, sub, e.query)), e.expected)
          << f.name << ": " << e.note;
    } else {
      EXPECT_EQ(preimage_count(f.map, e.query), e.expected) << f.name << ": " << e.note;
    }
  }
}

}  // namespace

TEST(Fixtures, AllExpectationsHold) {
  for (const auto& name : fixture_names())
    for (int n : {32, 64}) check_expectations(make_fixture(name, n));
}

TEST(Fixtures, ComplementComponentCounts) {
  const std::map<std::string, int> expected{{"identity", 2},  {"angle-doubling", 2}, {"annulus", 3},
                                            {"cone-flip", 3}, {"stacked", 4},        {"wrap", 2},
                                            {"collapse", 2}};
  for (const auto& [name, count] : expected)
    EXPECT_EQ(complement_components(*make_fixture(name, 64).mesh).component_count(), count) << name;
}

TEST(Fixtures, StackedHolesReachTarget) {
  for (int target : {-3, -1, 1, 2, 3}) {
    const auto f = fixture_stacked_holes(std::abs(target), target, 32);
    EXPECT_EQ(degree_boundary(f.map, f.expectations.front().query), target);
    EXPECT_EQ(complement_components(*f.mesh).component_count(), std::abs(target) + 2);
  }
}

TEST(Fixtures, AngleDoublingIsOrientationPreserving) {
  EXPECT_GT(fixture_angle_doubling(32).map.min_det(), 0.0);
}

TEST(Fixtures, FlippedFixturesHaveNegativeDeterminants) {
  EXPECT_LT(fixture_annulus_translation(32).map.min_det(), 0.0);
  EXPECT_LT(fixture_cone_flip(32, false).map.min_det(), 0.0);
}

TEST(Fixtures, WrapTouchesItselfWithPositiveDeterminant) {
  const auto f = fixture_wrap(16);
  EXPECT_GT(f.map.min_det(), 0.0);
  // First and last columns share images.
  const int nx = 16;
  for (int j = 0; j <= 2; ++j)
    EXPECT_NEAR((f.map.images()[j * (nx + 1)] - f.map.images()[j * (nx + 1) + nx]).norm(), 0.0, 1e-15);
}

TEST(Fixtures, CollapseHasZeroDeterminants) {
  const auto f = fixture_collapse();
  EXPECT_NEAR(f.map.min_det(), 0.0, 1e-12);
}

TEST(Fixtures, UnknownNameRejected) {
  EXPECT_THROW(make_fixture("nope", 32), Error);
  EXPECT_THROW(fixture_angle_doubling(15), Error);
}
