#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "willmore/config.hpp"
#include "willmore/report.hpp"

using namespace willmore;

TEST(Toml, TablesKeysAndValues) {
  const auto j = parse_toml(R"(# comment
command = "solve"
seed = 0xC0FFEE
big = 1_000
neg = -3
x = 1.5e-3
flag = true
list = [1.0, 2,
        3.5]  # trailing
[metric]
kind = 'schwarzschild'
perturbation = { amplitude = 0.01, profile = [[2, 0, 1.0]] }
[a.b]
c = "q\"uote"
)");
  EXPECT_EQ(j["command"], "solve");
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 0xC0FFEEu);
  EXPECT_EQ(j["big"], 1000);
  EXPECT_EQ(j["neg"], -3);
  EXPECT_DOUBLE_EQ(j["x"].get<double>(), 1.5e-3);
  EXPECT_EQ(j["flag"], true);
  EXPECT_EQ(j["list"].size(), 3u);
  EXPECT_EQ(j["metric"]["kind"], "schwarzschild");
  EXPECT_EQ(j["metric"]["perturbation"]["profile"][0][2], 1.0);
  EXPECT_EQ(j["a"]["b"]["c"], "q\"uote");
}

TEST(Toml, Errors) {
  for (const char* bad : {"a = ", "a = 1\na = 2", "[[tables]]", "a = \"open", "a = [1, 2", "a = 1 b"}) {
    try {
      parse_toml(bad);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ConfigError) << bad;
    }
  }
}

TEST(Csv, QuotingAndFullPrecision) {
  report::Table t{"t", {{"a", ""}, {"b", ""}}, {}};
  t.add_row({report::num(0.1), "x, \"y\""});
  EXPECT_EQ(t.csv(), "a,b\r\n0.10000000000000001,\"x, \"\"y\"\"\"\r\n");
  EXPECT_THROW(t.add_row({"only one"}), Error);
}

TEST(Csv, ReadBackAndPlot) {
  const auto dir = std::filesystem::temp_directory_path() / "willmore_csv_test";
  std::filesystem::create_directories(dir);
  report::Table t{"t", {{"x", ""}, {"y", ""}, {"note", ""}}, {}};
  for (int i = 1; i <= 4; ++i) t.add_row({report::num(i * 1.0), report::num(-1.0 / i), "a,b"});
  t.write((dir / "t.csv").string());
  const auto [header, rows] = report::read_csv((dir / "t.csv").string());
  ASSERT_EQ(header.size(), 3u);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1][2], "a,b");
  EXPECT_EQ(std::stod(rows[3][1]), -0.25);
  const std::string svg = report::svg_from_csv((dir / "t.csv").string(), {"t", "x", {"y"}, true, true, true});
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_THROW(report::svg_from_csv((dir / "t.csv").string(), {"t", "x", {"missing"}}), Error);
}
