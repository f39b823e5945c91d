#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "willmore/oracles.hpp"

using namespace willmore;

#ifndef WILLMORE_TEST_DATA
#define WILLMORE_TEST_DATA "."
#endif

namespace {
const std::string golden = std::string(WILLMORE_TEST_DATA) + "/golden/closed_forms.json";
}

TEST(Oracles, ModuleChecks) {
  checks::Options o;
  o.golden_path = golden;
  const auto rs = checks::oracle_checks(o);
  test_support::expect_no_failures(rs);
  const auto* g = test_support::find(rs, "golden table");
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->status, checks::Status::Pass);
}

TEST(Oracles, Examples) {
  EXPECT_DOUBLE_EQ(oracles::sphere_moment(1, 0.3), 4.0 * checks::pi);
  EXPECT_NEAR(oracles::sphere_moment(3, 0.5), 16.75516, 1e-5);
  EXPECT_NEAR(oracles::sphere_moment(3, 2.0), 2.09440, 1e-5);
  EXPECT_NEAR(oracles::radial4_leading(0.5).exact, 7.0598, 1e-4);
}

TEST(Oracles, UnitOffsetIsOutsideTheDomain) {
  for (int k = 1; k <= 6; ++k) EXPECT_THROW(oracles::sphere_moment(k, 1.0), Error);
  EXPECT_THROW(oracles::radial4_leading(1.2), Error);
}

TEST(Oracles, GoldenTableMatches) { EXPECT_NO_THROW(checks::verify_golden(golden)); }

TEST(Oracles, CorruptedGoldenNamesTheIdentity) {
  auto j = checks::read_json_file(golden);
  for (auto& e : j["entries"])
    if (e["identity"] == "sphere_moment_k5" && e["xi"] == 0.9) e["value"] = e["value"].get<double>() * (1.0 + 1e-6);
  const auto path = std::filesystem::temp_directory_path() / "willmore_corrupted_golden.json";
  std::ofstream(path) << j.dump();
  try {
    checks::verify_golden(path.string());
    FAIL() << "expected GoldenMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GoldenMismatch);
    EXPECT_NE(std::string(e.what()).find("sphere_moment_k5"), std::string::npos) << e.what();
  }
}
