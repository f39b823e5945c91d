#include <gtest/gtest.h>

#include "test_util.hpp"
#include "willmore/sphere.hpp"

using namespace willmore;

TEST(SphereDomain, ModuleChecks) { test_support::expect_no_failures(checks::sphere_checks({})); }

TEST(SphereDomain, UnderresolvedRunSkipsOnlyConvergenceChecks) {
  checks::Options o;
  o.band_limit = 8;
  const auto rs = checks::sphere_checks(o);
  test_support::expect_no_failures(rs);
  const auto* g = test_support::find(rs, "gradient estimate constant for |x|^-2");
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->status, checks::Status::Skipped);
}

TEST(SphereDomain, BandLimitBelowEightIsRejected) {
  try {
    SphereChart::build(Vec3::Zero(), 1.0, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidBandLimit);
  }
}

TEST(SphereDomain, RoundTripOfRandomCoefficients) {
  Rng rng(7);
  const auto c = SphereChart::build(Vec3(0.2, 0, 0), 3.0, 16);
  const HarmonicCoeffs a = checks::random_coeffs(rng, 16);
  const HarmonicCoeffs b = analyze(synthesize(a, c));
  for (size_t k = 0; k < a.a.size(); ++k) EXPECT_NEAR(a.a[k], b.a[k], 1e-13);
}

TEST(SphereDomain, LaplacianEigenvalue) {
  const auto c = SphereChart::build(Vec3::Zero(), 2.0, 16);
  const ScalarField y = checks::harmonic(c, 4, -3);
  const ScalarField l = sphere_laplacian(y);
  for (int i = 0; i < c->size(); ++i) EXPECT_NEAR(l[i], -20.0 / 4.0 * y[i], 1e-12);
}

TEST(SphereDomain, PoissonRejectsNonzeroMean) {
  const auto c = SphereChart::build(Vec3::Zero(), 1.0, 8);
  ScalarField f(c);
  for (double& v : f.values) v = 1.0;
  try {
    poisson_solve(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonzeroMean);
  }
}

TEST(SphereDomain, FieldsOnDifferentChartsDoNotMix) {
  const auto a = SphereChart::build(Vec3::Zero(), 1.0, 8);
  EXPECT_THROW(ScalarField(a, std::vector<double>(3, 0.0)), Error);
}
