#include <gtest/gtest.h>

#include "test_util.hpp"
#include "willmore/functionals.hpp"

using namespace willmore;

TEST(Functionals, ModuleChecks) { test_support::expect_no_failures(checks::functional_checks({})); }

TEST(Functionals, RoundEuclideanSphere) {
  const auto b = geometry_bundle(GraphSurface::sphere(SphereChart::build(Vec3(0.4, 0, 0), 3.0, 16)), MetricSpec::euclidean());
  EXPECT_NEAR(willmore_energy(b), 16.0 * checks::pi, 1e-12);
  EXPECT_NEAR(hawking_mass(b), 0.0, 1e-14);
}

TEST(Functionals, CentredSchwarzschildKappa) {
  const auto b = geometry_bundle(GraphSurface::sphere(SphereChart::build(Vec3::Zero(), 20.0, 16)), MetricSpec::schwarzschild(2.0));
  EXPECT_NEAR(lagrange_estimate(b) / oracles::schwarzschild_round_sphere(2.0, 20.0).kappa, 1.0, 1e-10);
}

TEST(Functionals, FluxSplittingOnAnOffsetGraph) {
  const auto c = SphereChart::build(Vec3(0.3, -0.2, 0.1), 15.0, 32);
  HarmonicCoeffs u(32);
  u(2, 0) = 0.2;
  u(3, 1) = -0.1;
  const auto b = geometry_bundle(GraphSurface(c, u), MetricSpec::schwarzschild(2.0));
  const FluxReport r = translation_variation_decomposed(b, Vec3(0.6, 0.0, 0.8));
  EXPECT_LT(r.relative_defect(), 1e-9);
  EXPECT_NEAR(r.translation_variation, translation_variation(b, Vec3(0.6, 0.0, 0.8), r.kappa), 1e-14 * r.scale);
}

TEST(Functionals, NewtonianFluxEnclosure) {
  EXPECT_TRUE(checks::newtonian_flux_at(0.5, 32).encloses_origin);
  EXPECT_FALSE(checks::newtonian_flux_at(1.5, 32).encloses_origin);
}
