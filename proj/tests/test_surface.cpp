#include <gtest/gtest.h>

#include "test_util.hpp"
#include "willmore/surface.hpp"

using namespace willmore;

TEST(SurfaceGeometry, ModuleChecks) { test_support::expect_no_failures(checks::surface_checks({})); }

TEST(SurfaceGeometry, SchwarzschildSphereMeanCurvature) {
  const auto b = geometry_bundle(GraphSurface::sphere(SphereChart::build(Vec3::Zero(), 10.0, 16)), MetricSpec::schwarzschild(2.0));
  for (const auto& n : b.nodes) EXPECT_NEAR(n.H, 0.13523666416228397, 1e-14);
}

// H of the translated sphere from the conformal transformation law, evaluated pointwise.
TEST(SurfaceGeometry, TranslatedSphereMatchesConformalFormula) {
  for (double xi : {0.5, 0.9})
    for (double lam : {20.0, 200.0}) {
      const Vec3 x0(xi, 0.0, 0.0);
      const auto b = geometry_bundle(GraphSurface::sphere(SphereChart::build(x0, lam, 24)), MetricSpec::schwarzschild(2.0));
      for (const auto& n : b.nodes) {
        const double r = n.position.norm();
        const double xnu = n.position.dot(n.euclid_normal);
        const double expect = std::pow(1.0 + 1.0 / r, -2) * 2.0 / lam - 4.0 * std::pow(1.0 + 1.0 / r, -3) * xnu / (r * r * r);
        EXPECT_NEAR(n.H, expect, 1e-13 * std::abs(expect));
      }
    }
}

TEST(SurfaceGeometry, SteepGraphIsRejected) {
  const auto c = SphereChart::build(Vec3::Zero(), 1.0, 16);
  HarmonicCoeffs u(16);
  u(6, 2) = 2.0;
  try {
    require_graph_condition(GraphSurface(c, u));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GraphConditionViolated);
  }
}

TEST(SurfaceGeometry, SurfaceJsonRoundTrip) {
  const auto c = SphereChart::build(Vec3(0.1, 0.2, 0.3), 5.0, 12);
  HarmonicCoeffs u(12);
  u(2, 1) = 0.01;
  u(5, -4) = -0.003;
  const GraphSurface s(c, u);
  const GraphSurface back = surface_from_json(surface_to_json(s));
  EXPECT_EQ(back.chart->band_limit(), 12);
  EXPECT_EQ(back.u.a, s.u.a);
  EXPECT_EQ(back.chart->offset(), c->offset());
}
