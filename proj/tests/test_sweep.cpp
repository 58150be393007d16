#include "pldeg/fixtures.hpp"
#include "pldeg/sweep.hpp"

#include <gtest/gtest.h>

using namespace pldeg;

namespace {

std::vector<SimplexPoints<2>> square(double x0, double y0, double s) {
  const Point<2> a(x0, y0), b(x0 + s, y0), c(x0 + s, y0 + s), d(x0, y0 + s);
  return {{a, b, c}, {a, c, d}};
}

std::vector<SimplexPoints<2>> image_triangles(const PLMap<2>& map) {
  std::vector<SimplexPoints<2>> out;
  for (std::size_t s = 0; s < map.mesh().simplex_count(); ++s) out.push_back(map.image_simplex(static_cast<int>(s)));
  return out;
}

double covered_with_multiplicity(const PLMap<2>& map) {
  double total = 0.0;
  for (const auto& t : image_triangles(map)) total += std::abs(signed_volume<2>(t));
  return total;
}

}  // namespace

TEST(Sweep, UnitSquare) { EXPECT_NEAR(union_area(square(0, 0, 1)), 1.0, 1e-15); }

TEST(Sweep, OrientationDoesNotMatter) {
  auto t = square(0, 0, 1);
  std::swap(t[0][1], t[0][2]);
  EXPECT_NEAR(union_area(t), 1.0, 1e-15);
}

TEST(Sweep, RepeatedTrianglesCountOnce) {
  auto t = square(0, 0, 1);
  const auto u = square(0, 0, 1);
  t.insert(t.end(), u.begin(), u.end());
  EXPECT_NEAR(union_area(t), 1.0, 1e-15);
}

TEST(Sweep, OverlappingSquares) {
  auto t = square(0, 0, 1);
  const auto u = square(0.5, 0.5, 1);
  t.insert(t.end(), u.begin(), u.end());
  EXPECT_NEAR(union_area(t), 1.75, 1e-14);
}

TEST(Sweep, DisjointAndCrossingTriangles) {
  const std::vector<SimplexPoints<2>> star{
      {Point<2>(0, 0), Point<2>(2, 0), Point<2>(1, 2)},
      {Point<2>(0, 1.2), Point<2>(1, -0.8), Point<2>(2, 1.2)},
  };
  // Hexagram: two triangles of area 2 whose intersection is a hexagon.
  const double single = 2.0;
  const double area = union_area(star);
  EXPECT_GT(area, single);
  EXPECT_LT(area, 2 * single);
  auto far = star;
  far.push_back({Point<2>(10, 0), Point<2>(11, 0), Point<2>(10, 1)});
  EXPECT_NEAR(union_area(far), area + 0.5, 1e-13);
}

TEST(Sweep, WindingIntegralOfPolynomial) {
  std::vector<OrientedSegment> segs;
  for (const auto& t : square(0, 0, 1))
    for (int i = 0; i < 3; ++i) segs.push_back({t[i], t[(i + 1) % 3]});
  const auto traps = winding_trapezoids(segs);
  const auto f = [](const Point<2>& x) { return x.x() * x.x() + x.x() * x.y(); };
  EXPECT_NEAR(winding_integral(traps, [](int w) { return double(w); }, f), 1.0 / 3.0 + 0.25, 1e-14);
}

TEST(Sweep, NegativeOrientationGivesNegativeWinding) {
  const std::vector<OrientedSegment> cw{{Point<2>(0, 0), Point<2>(0, 1)},
                                        {Point<2>(0, 1), Point<2>(1, 1)},
                                        {Point<2>(1, 1), Point<2>(1, 0)},
                                        {Point<2>(1, 0), Point<2>(0, 0)}};
  const auto traps = winding_trapezoids(cw);
  EXPECT_NEAR(winding_area(traps, [](int w) { return double(w); }), -1.0, 1e-15);
}

TEST(Sweep, AngleDoublingCoversTwice) {
  for (int n : {16, 64, 128}) {
    const auto f = fixture_angle_doubling(n);
    const double ratio = covered_with_multiplicity(f.map) / union_area(image_triangles(f.map));
    EXPECT_NEAR(ratio, 2.0, 1e-12) << n;
  }
}

TEST(Sweep, WrapOverlapSlack) {
  for (int extra : {0, 1, 3}) {
    const auto f = fixture_wrap(16, extra);
    const double slack = covered_with_multiplicity(f.map) - union_area(image_triangles(f.map));
    EXPECT_NEAR(slack, wrap_overlap_area(16, extra), 1e-12) << extra;
  }
}
