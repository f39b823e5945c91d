#include <gtest/gtest.h>

#include "test_util.hpp"
#include "willmore/solver.hpp"

using namespace willmore;

TEST(Solver, ModuleChecks) { test_support::expect_no_failures(checks::solver_checks({})); }

TEST(Solver, ConfigValidation) {
  SolverConfig c;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_THROW(nlohmann::json({{"tolerance", -1.0}}).get<SolverConfig>(), Error);
}

TEST(Solver, ConfigJsonRoundTrip) {
  SolverConfig c;
  c.tolerance = 1e-9;
  c.max_iterations = 17;
  c.pin_translations = true;
  const nlohmann::json j = c;
  EXPECT_EQ(nlohmann::json(j.get<SolverConfig>()), j);
}

TEST(Solver, IterationCapKeepsTheTrace) {
  SolverConfig cfg;
  cfg.max_iterations = 3;
  cfg.tolerance = 1e-14;
  try {
    solve_acw(MetricSpec::schwarzschild(2.0), checks::l2_bump(20.0, 16, 0.02), cfg);
    FAIL() << "expected MaxIterations";
  } catch (const SolveFailure& f) {
    EXPECT_EQ(f.kind(), ErrorKind::MaxIterations);
    EXPECT_EQ(f.partial().trace.rows.size(), 3u);
    EXPECT_TRUE(f.partial().surface.chart != nullptr);
  }
}

TEST(Solver, ContinuationNeedsMonotoneRadii) {
  EXPECT_THROW(continuation(MetricSpec::schwarzschild(2.0), {10.0, 20.0, 15.0}, SolverConfig{}, 16), Error);
}

TEST(Solver, AreaRadiusInversion) {
  const double r = coordinate_radius_for_area_radius(2.0, 12.1);
  EXPECT_NEAR(r, 10.0, 1e-12);
}
