#include <gtest/gtest.h>

#include "test_util.hpp"
#include "willmore/metrics.hpp"

using namespace willmore;

TEST(Metrics, ModuleChecks) { test_support::expect_no_failures(checks::metric_checks({})); }

TEST(Metrics, OriginIsRejected) {
  try {
    metric_jet(MetricSpec::schwarzschild(2.0), Vec3::Zero());
    FAIL() << "expected PointAtOrigin";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PointAtOrigin);
  }
}

TEST(Metrics, SchwarzschildIsConformallyFlat) {
  const Vec3 x(3.0, -1.0, 2.0);
  const MetricJet j = metric_jet(MetricSpec::schwarzschild(2.0), x);
  const double psi = 1.0 + 1.0 / x.norm();
  EXPECT_NEAR((j.g - std::pow(psi, 4) * Mat3::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(Metrics, SchwarzschildScalarCurvatureVanishes) {
  for (double r : {2.0, 10.0, 300.0})
    EXPECT_NEAR(curvature(MetricSpec::schwarzschild(2.0), Vec3(0.3, 0.4, 0.866) * r).scalar, 0.0, 1e-12 / (r * r * r));
}

TEST(Metrics, EuclideanHasNoCurvature) {
  const CurvatureData c = curvature(MetricSpec::euclidean(), Vec3(1, 2, 3));
  EXPECT_EQ(c.ricci.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(c.scalar, 0.0);
}

TEST(Metrics, StaticPotentialValues) {
  EXPECT_NEAR(potential_jet(Vec3(10, 0, 0)).N, 9.0 / 11.0, 1e-15);
  EXPECT_NEAR(potential_jet(Vec3(0, 0, 1)).N, 0.0, 1e-15);
}

TEST(Metrics, SpecJsonRoundTrip) {
  PerturbationFamily fam;
  fam.amplitude = 0.01;
  fam.profile = {{2, 0, 1.0}, {3, -1, 0.25}};
  const MetricSpec s = MetricSpec::perturbed(2.0, fam);
  const nlohmann::json j = s;
  const MetricSpec back = j.get<MetricSpec>();
  EXPECT_EQ(back.kind, MetricKind::Perturbed);
  EXPECT_EQ(back.perturbation.profile.size(), 2u);
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(Metrics, UnknownKindIsAConfigError) {
  try {
    nlohmann::json{{"kind", "kerr"}}.get<MetricSpec>();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}
