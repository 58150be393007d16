#include "pldeg/geometry.hpp"
#include "pldeg/quadrature.hpp"
#include "pldeg/random.hpp"

#include <gtest/gtest.h>

using namespace pldeg;

namespace {

// Integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double monomial_triangle(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double monomial_tet(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

}  // namespace

TEST(Quadrature, TriangleRuleIsExactToDegreeFour) {
  const SimplexPoints<2> ref{Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)};
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      const double q = integrate_simplex<2>(ref, [&](const Point<2>& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); });
      EXPECT_NEAR(q, monomial_triangle(a, b), 1e-14) << a << "," << b;
    }
}

TEST(Quadrature, TetRuleIsExactToDegreeFive) {
  const SimplexPoints<3> ref{Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0), Point<3>(0, 0, 1)};
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b)
      for (int c = 0; a + b + c <= 5; ++c) {
        const double q = integrate_simplex<3>(
            ref, [&](const Point<3>& x) { return std::pow(x.x(), a) * std::pow(x.y(), b) * std::pow(x.z(), c); });
        EXPECT_NEAR(q, monomial_tet(a, b, c), 1e-14) << a << "," << b << "," << c;
      }
}

TEST(Quadrature, WeightsSumToOne) {
  double s2 = 0, s3 = 0;
  for (const auto& n : simplex_rule<2>()) s2 += n.weight;
  for (const auto& n : simplex_rule<3>()) s3 += n.weight;
  EXPECT_NEAR(s2, 1.0, 1e-14);
  EXPECT_NEAR(s3, 1.0, 1e-14);
}

TEST(Quadrature, BisectionPreservesVolume) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    SimplexPoints<3> p;
    for (auto& v : p) v = Point<3>(rng.normal(), rng.normal(), rng.normal());
    const auto halves = bisect_longest_edge<3>(p);
    EXPECT_NEAR(signed_volume<3>(halves[0]) + signed_volume<3>(halves[1]), signed_volume<3>(p), 1e-12);
    EXPECT_NEAR(signed_volume<3>(halves[0]), signed_volume<3>(halves[1]), 1e-12);
  }
}

TEST(Geometry, CofactorIdentity) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix<3> f;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f(i, j) = rng.normal();
    const Matrix<3> r = cofactor<3>(f).transpose() * f - f.determinant() * Matrix<3>::Identity();
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12 * f.squaredNorm());
    Matrix<2> g;
    g << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    const Matrix<2> r2 = cofactor<2>(g).transpose() * g - g.determinant() * Matrix<2>::Identity();
    EXPECT_LT(r2.cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Geometry, SignedVolume) {
  EXPECT_DOUBLE_EQ(signed_volume<2>({Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)}), 0.5);
  EXPECT_DOUBLE_EQ(signed_volume<2>({Point<2>(0, 0), Point<2>(0, 1), Point<2>(1, 0)}), -0.5);
  EXPECT_NEAR(signed_volume<3>({Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0), Point<3>(0, 0, 1)}),
              1.0 / 6.0, 1e-16);
}

TEST(Geometry, SubtendedAnglesSumToFullAngleInsideClosedSurface) {
  // Outward-oriented boundary of the unit tetrahedron.
  const Point<3> a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
  const std::array<FacetPoints<3>, 4> faces{
      {{b, c, d}, {a, d, c}, {a, b, d}, {a, c, b}}};
  const Point<3> inside(0.1, 0.2, 0.3), outside(1, 1, 1);
  double in = 0, out = 0;
  for (const auto& f : faces) {
    in += subtended_angle<3>(inside, f);
    out += subtended_angle<3>(outside, f);
  }
  EXPECT_NEAR(in / full_angle<3>(), 1.0, 1e-12);
  EXPECT_NEAR(out / full_angle<3>(), 0.0, 1e-12);

  const std::array<FacetPoints<2>, 3> edges{{{Point<2>(0, 0), Point<2>(1, 0)},
                                             {Point<2>(1, 0), Point<2>(0, 1)},
                                             {Point<2>(0, 1), Point<2>(0, 0)}}};
  double w = 0;
  for (const auto& e : edges) w += subtended_angle<2>(Point<2>(0.2, 0.2), e);
  EXPECT_NEAR(w / full_angle<2>(), 1.0, 1e-12);
}

TEST(Geometry, Barycentric) {
  const SimplexPoints<2> p{Point<2>(0, 0), Point<2>(2, 0), Point<2>(0, 2)};
  const auto l = barycentric<2>(Point<2>(0.5, 0.5), p);
  EXPECT_NEAR(l(0), 0.5, 1e-15);
  EXPECT_NEAR(l(1), 0.25, 1e-15);
  EXPECT_NEAR(l(2), 0.25, 1e-15);
}

TEST(Geometry, Distances) {
  const FacetPoints<3> tri{Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0)};
  EXPECT_NEAR(facet_distance<3>(Point<3>(0.2, 0.2, 3), tri), 3.0, 1e-14);
  EXPECT_NEAR(facet_distance<3>(Point<3>(-1, 0, 0), tri), 1.0, 1e-14);
  EXPECT_NEAR(segment_distance<2>(Point<2>(0, 0), Point<2>(1, 0), Point<2>(0.5, 1), Point<2>(0.5, 2)), 1.0, 1e-14);
  const SimplexPoints<2> s{Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)};
  EXPECT_EQ(simplex_distance<2>(Point<2>(0.1, 0.1), s), 0.0);
  EXPECT_NEAR(simplex_distance<2>(Point<2>(1, 1), s), std::sqrt(0.5), 1e-14);
}

TEST(Geometry, SegmentIntersection) {
  EXPECT_TRUE(segments_intersect(Point<2>(0, 0), Point<2>(1, 1), Point<2>(0, 1), Point<2>(1, 0), 0.0));
  EXPECT_FALSE(segments_intersect(Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1), Point<2>(1, 1), 1e-9));
  EXPECT_TRUE(segments_intersect(Point<2>(0, 0), Point<2>(1, 0), Point<2>(1, 0), Point<2>(2, 1), 1e-12));
}

TEST(Geometry, TriangleIntersection) {
  const FacetPoints<3> t1{Point<3>(0, 0, 0), Point<3>(1, 0, 0), Point<3>(0, 1, 0)};
  const FacetPoints<3> t2{Point<3>(0.2, 0.2, -1), Point<3>(0.2, 0.2, 1), Point<3>(0.3, 0.4, 0)};
  const FacetPoints<3> t3{Point<3>(0, 0, 1), Point<3>(1, 0, 1), Point<3>(0, 1, 1)};
  EXPECT_TRUE(triangles_intersect(t1, t2, 1e-12));
  EXPECT_FALSE(triangles_intersect(t1, t3, 1e-12));
}

TEST(Geometry, SimplexOverlap) {
  const SimplexPoints<2> a{Point<2>(0, 0), Point<2>(1, 0), Point<2>(0, 1)};
  const SimplexPoints<2> b{Point<2>(1, 1), Point<2>(0, 1), Point<2>(1, 0)};
  const SimplexPoints<2> c{Point<2>(0.1, 0.1), Point<2>(0.5, 0.1), Point<2>(0.1, 0.5)};
  EXPECT_FALSE(simplices_overlap<2>(a, b, 1e-12));  // share an edge only
  EXPECT_TRUE(simplices_overlap<2>(a, c, 1e-12));
}

TEST(Geometry, FacetHitsBox) {
  const FacetPoints<2> seg{Point<2>(-1, 0.5), Point<2>(2, 0.5)};
  EXPECT_TRUE(facet_hits_box<2>(seg, Point<2>(0, 0), Point<2>(1, 1)));
  EXPECT_FALSE(facet_hits_box<2>(seg, Point<2>(0, 0.6), Point<2>(1, 1)));
  const FacetPoints<3> tri{Point<3>(-1, -1, 0.5), Point<3>(3, -1, 0.5), Point<3>(-1, 3, 0.5)};
  EXPECT_TRUE(facet_hits_box<3>(tri, Point<3>(0, 0, 0), Point<3>(1, 1, 1)));
  EXPECT_FALSE(facet_hits_box<3>(tri, Point<3>(0, 0, 0.6), Point<3>(1, 1, 1)));
}

TEST(Random, CounterStreamsAreDeterministic) {
  EXPECT_EQ(counter_uniform(7, 123), counter_uniform(7, 123));
  EXPECT_NE(counter_uniform(7, 123), counter_uniform(8, 123));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
}
