/// \file experiments.hpp
/// \brief The four `willmore-lab` commands. Each writes manifest.json first
/// (config echo, version, column schema), then CSV tables and SVG plots, and
/// rewrites the manifest with timings at the end.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "willmore/checks.hpp"
#include "willmore/config.hpp"
#include "willmore/version.hpp"

namespace willmore::lab {

using nlohmann::json;
using checks::CheckResult;
using checks::Status;
namespace fs = std::filesystem;

enum ExitCode : int { exit_ok = 0, exit_numeric_failure = 2, exit_config_error = 3 };

// ---------------------------------------------------------------------------
// configuration

struct ExperimentConfig {
  std::string command;
  MetricSpec metric = MetricSpec::schwarzschild(2.0);
  int band_limit = 32;
  Vec3 offset = Vec3::Zero();
  SolverConfig solver;
  double initial_l2_fraction = 0.0;
  std::vector<double> area_radii;  // solve
  std::vector<double> lambdas;     // asymptotics, flux
  std::vector<double> xis;         // offsets |xi|
  std::vector<double> radial4_xis;
  Vec3 direction = Vec3::UnitX();
  std::string output_dir = "out";
  std::uint64_t seed = default_seed;
  std::string golden;  // verify
  int corpus_size = 30;
  bool plots = true;
  json expect = json::object();
  json echo;  // the parsed file, after overrides
};

struct Overrides {
  std::optional<std::string> out;
  std::optional<int> band_limit;
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::uint64_t parse_seed(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) throw Error(ErrorKind::ConfigError, "seed must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    try {
      size_t used = 0;
      const std::string s = j.get<std::string>();
      const std::uint64_t v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorKind::ConfigError, "seed must be an integer or an integer string such as \"0xC0FFEE\"");
}

inline Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::ConfigError, what + " must be a three-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, where + " must be a table");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw Error(ErrorKind::ConfigError, "unknown key '" + k + "' in " + where);
}

}  // namespace detail

/// `base_dir` resolves relative file references (the golden table).
inline ExperimentConfig parse_config(const json& j, const std::string& command, const fs::path& base_dir = {},
                                     const Overrides& ov = {}) {
  static const std::set<std::string> commands = {"verify", "solve", "asymptotics", "flux"};
  if (!commands.count(command)) throw Error(ErrorKind::ConfigError, "unknown command '" + command + "'");
  ExperimentConfig c;
  c.command = command;
  try {
    detail::require_keys(j, {"command", "seed", "output_dir", "metric", "chart", "solver", "initial", "sweep",
                             "verify", "expect", "plots"},
                         "config");
    if (j.contains("command") && j["command"].get<std::string>() != command)
      throw Error(ErrorKind::ConfigError,
                  "config is for '" + j["command"].get<std::string>() + "', not '" + command + "'");
    if (j.contains("seed")) c.seed = detail::parse_seed(j["seed"]);
    c.output_dir = j.value("output_dir", std::string("out/") + command);
    if (j.contains("metric")) c.metric = j["metric"].get<MetricSpec>();
    if (j.contains("chart")) {
      const auto& ch = j["chart"];
      detail::require_keys(ch, {"band_limit", "offset"}, "[chart]");
      c.band_limit = ch.value("band_limit", c.band_limit);
      if (ch.contains("offset")) c.offset = detail::parse_vec3(ch["offset"], "chart.offset");
    }
    if (j.contains("solver")) c.solver = j["solver"].get<SolverConfig>();
    if (j.contains("initial")) {
      detail::require_keys(j["initial"], {"l2_fraction"}, "[initial]");
      c.initial_l2_fraction = j["initial"].value("l2_fraction", 0.0);
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      detail::require_keys(s, {"area_radii", "coordinate_radii", "lambdas", "xi", "radial4_xi", "direction"}, "[sweep]");
      if (s.contains("area_radii") && s.contains("coordinate_radii"))
        throw Error(ErrorKind::ConfigError, "give either sweep.area_radii or sweep.coordinate_radii");
      if (s.contains("area_radii")) c.area_radii = s["area_radii"].get<std::vector<double>>();
      if (s.contains("coordinate_radii")) {
        // areas of the centred coordinate spheres of the background
        const double m = c.metric.background_mass();
        for (double r : s["coordinate_radii"].get<std::vector<double>>()) {
          if (!(r > 0.5 * m)) throw Error(ErrorKind::ConfigError, "coordinate radius must exceed m/2");
          c.area_radii.push_back(r * std::pow(1.0 + 0.5 * m / r, 2));
        }
      }
      c.lambdas = s.value("lambdas", std::vector<double>{});
      c.xis = s.value("xi", std::vector<double>{});
      c.radial4_xis = s.value("radial4_xi", std::vector<double>{});
      if (s.contains("direction")) {
        c.direction = detail::parse_vec3(s["direction"], "sweep.direction");
        if (!(c.direction.norm() > 0.0)) throw Error(ErrorKind::ConfigError, "sweep.direction must be nonzero");
        c.direction.normalize();
      }
    }
    if (j.contains("verify")) {
      detail::require_keys(j["verify"], {"golden", "corpus_size"}, "[verify]");
      c.golden = j["verify"].value("golden", std::string());
      c.corpus_size = j["verify"].value("corpus_size", c.corpus_size);
    }
    if (j.contains("expect")) c.expect = j["expect"];
    c.plots = j.value("plots", true);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if (ov.out) c.output_dir = *ov.out;
  if (ov.band_limit) c.band_limit = *ov.band_limit;
  if (ov.seed) c.seed = *ov.seed;
  if (c.band_limit < 8) throw Error(ErrorKind::ConfigError, "band limit must be >= 8");
  if (c.corpus_size < 1) throw Error(ErrorKind::ConfigError, "verify.corpus_size must be positive");
  if (!c.golden.empty() && fs::path(c.golden).is_relative() && !base_dir.empty())
    c.golden = (base_dir / c.golden).lexically_normal().string();
  for (double x : c.xis)
    if (!(x >= 0.0) || x == 1.0) throw Error(ErrorKind::ConfigError, "sweep.xi entries must be >= 0 and != 1");
  for (double l : c.lambdas)
    if (!(l > 0.0)) throw Error(ErrorKind::ConfigError, "sweep.lambdas entries must be positive");

  c.echo = j;
  c.echo["command"] = command;
  c.echo["seed"] = c.seed;
  c.echo["output_dir"] = c.output_dir;
  c.echo["chart"]["band_limit"] = c.band_limit;
  if (!c.golden.empty()) c.echo["verify"]["golden"] = c.golden;
  return c;
}

inline ExperimentConfig load_config(const std::string& path, const std::string& command, const Overrides& ov = {}) {
  return parse_config(load_config_file(path), command, fs::path(path).parent_path(), ov);
}

// ---------------------------------------------------------------------------
// run bookkeeping

/// A column schema entry for a family of files, e.g. "trace_*.csv".
struct TableSchema {
  std::string pattern;
  std::string description;
  std::vector<report::Column> columns;
};

class Run {
 public:
  Run(const ExperimentConfig& cfg, std::vector<TableSchema> schema) : cfg_(cfg), schema_(std::move(schema)) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorKind::ConfigError, "cannot create " + cfg.output_dir + ": " + ec.message());
    start_ = std::chrono::steady_clock::now();
    write_manifest("running");
  }

  std::string path(const std::string& file) const { return (fs::path(cfg_.output_dir) / file).string(); }

  void write(const report::Table& t) {
    const std::string file = t.name + ".csv";
    bool known = false;
    for (const auto& s : schema_) known = known || matches(s, file, t);
    if (!known) throw Error(ErrorKind::ConfigError, "table " + file + " has no schema entry");
    t.write(path(file));
    files_.push_back(file);
  }

  void plot(const std::string& csv, const std::string& svg, const report::PlotSpec& spec) {
    if (!cfg_.plots) return;
    report::write_svg(path(csv), path(svg), spec);
    files_.push_back(svg);
  }

  void time(const std::string& phase, double seconds) { timings_[phase] = seconds; }

  void finish(const std::string& status, const json& summary = json::object()) {
    summary_ = summary;
    write_manifest(status);
  }

  double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  static bool matches(const TableSchema& s, const std::string& file, const report::Table& t) {
    const auto star = s.pattern.find('*');
    const bool name_ok = star == std::string::npos
                             ? s.pattern == file
                             : file.size() >= s.pattern.size() - 1 && file.compare(0, star, s.pattern, 0, star) == 0 &&
                                   file.compare(file.size() - (s.pattern.size() - star - 1), std::string::npos,
                                                s.pattern, star + 1) == 0;
    if (!name_ok) return false;
    if (s.columns.size() != t.columns.size()) return false;
    for (size_t i = 0; i < s.columns.size(); ++i)
      if (s.columns[i].name != t.columns[i].name) return false;
    return true;
  }

  void write_manifest(const std::string& status) const {
    json schema = json::object();
    for (const auto& s : schema_) {
      json cols = json::array();
      for (const auto& c : s.columns) cols.push_back({{"name", c.name}, {"description", c.description}});
      schema[s.pattern] = {{"description", s.description}, {"columns", cols}};
    }
    json m = {{"tool", "willmore-lab"},
              {"version", version_string},
              {"command", cfg_.command},
              {"status", status},
              {"config", cfg_.echo},
              {"schema", schema},
              {"files", files_},
              {"timings_seconds", timings_},
              {"summary", summary_}};
    m["timings_seconds"]["total"] = elapsed();
    std::ofstream f(path("manifest.json"), std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write manifest in " + cfg_.output_dir);
    f << m.dump(2) << "\n";
  }

  const ExperimentConfig& cfg_;
  std::vector<TableSchema> schema_;
  std::vector<std::string> files_;
  std::map<std::string, double> timings_;
  json summary_ = json::object();
  std::chrono::steady_clock::time_point start_;
};

inline const std::vector<report::Column>& expectation_columns() {
  static const std::vector<report::Column> cols = {
      {"check", "what is compared"},
      {"status", "PASS, FAIL, SKIPPED-UNDERRESOLVED or INFO"},
      {"measured", "measured value"},
      {"threshold", "pass when measured <= threshold"},
      {"detail", "free text"}};
  return cols;
}

inline report::Table expectation_table(const std::vector<CheckResult>& rs) {
  report::Table t{"expectations", expectation_columns(), {}};
  for (const auto& r : rs)
    t.add_row({r.name, checks::to_string(r.status), report::num(r.measured), report::num(r.threshold), r.detail});
  return t;
}

struct Outcome {
  int exit_code = exit_ok;
  std::vector<CheckResult> results;
};

inline int exit_for(const std::vector<CheckResult>& rs) {
  for (const auto& r : rs)
    if (r.status == Status::Fail) return exit_numeric_failure;
  return exit_ok;
}

inline void print_results(std::ostream& os, const std::vector<CheckResult>& rs) {
  for (const auto& r : rs) {
    os << checks::to_string(r.status) << "  " << (r.module.empty() ? "" : r.module + ": ") << r.name;
    if (!std::isnan(r.measured)) os << "  measured " << report::num(r.measured) << " (threshold " << report::num(r.threshold) << ")";
    if (!r.detail.empty()) os << "  [" << r.detail << "]";
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// verify

inline Outcome cmd_verify(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  Run run(cfg, {{"checks.csv",
                 "one row per check of every module",
                 {{"module", "module name"},
                  {"check", "what is checked"},
                  {"status", "PASS, FAIL, SKIPPED-UNDERRESOLVED or INFO"},
                  {"measured", "measured error or value"},
                  {"threshold", "pass when measured <= threshold"},
                  {"detail", "free text"}}}});
  checks::Options opt;
  opt.band_limit = cfg.band_limit;
  opt.seed = cfg.seed;
  opt.golden_path = cfg.golden;
  opt.corpus_size = cfg.corpus_size;
  const checks::Suite s = checks::all_checks(opt);
  report::Table t{"checks", {{"module", ""}, {"check", ""}, {"status", ""}, {"measured", ""}, {"threshold", ""}, {"detail", ""}}, {}};
  std::map<std::string, double> per_module;
  for (const auto& r : s.results) {
    t.add_row({r.module, r.name, checks::to_string(r.status), report::num(r.measured), report::num(r.threshold), r.detail});
    per_module[r.module] += r.seconds;
  }
  run.write(t);
  for (const auto& [m, sec] : per_module) run.time(m, sec);
  print_results(log, s.results);
  std::map<std::string, int> counts;
  for (const auto& r : s.results) ++counts[checks::to_string(r.status)];
  log << s.results.size() << " checks: " << counts["PASS"] << " pass, " << counts["FAIL"] << " fail, "
      << counts["SKIPPED-UNDERRESOLVED"] << " skipped, " << counts["INFO"] << " info; " << s.seconds << " s\n";
  Outcome o{exit_for(s.results), s.results};
  run.finish(o.exit_code == exit_ok ? "pass" : "fail", {{"counts", counts}, {"runtime_seconds", s.seconds}});
  return o;
}

// ---------------------------------------------------------------------------
// solve

inline Outcome cmd_solve(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  if (cfg.area_radii.empty()) throw Error(ErrorKind::ConfigError, "solve needs sweep.area_radii or sweep.coordinate_radii");
  const std::vector<report::Column> family_cols = {
      {"index", "entry number in sweep order"},
      {"area_radius", "target area radius a, area = 4 pi a^2"},
      {"lambda", "chart radius"},
      {"ok", "1 if the solve converged"},
      {"iterations", "flow iterations"},
      {"kappa", "Lagrange parameter"},
      {"kappa_centred", "kappa of the centred background sphere with the same area"},
      {"hawking_mass", "Hawking mass"},
      {"willmore_energy", "int H^2 dmu"},
      {"area", "area"},
      {"residual_max", "max |W| of the area-constrained Willmore operator"},
      {"residual_l2", "(int W^2 dmu)^(1/2)"},
      {"mean_H", "mean of H over the chart sphere"},
      {"mean_H_times_area_radius", "mean_H * a"},
      {"perp_H_l2", "L2 norm of the mean-free part of H"},
      {"radial_spread", "(max u - min u) / lambda"},
      {"error", "solver error message, empty on success"}};
  const std::vector<report::Column> coeff_cols = {
      {"l", "degree"}, {"m", "order"}, {"value", "real orthonormal harmonic coefficient of u"}};
  const std::vector<report::Column> trace_cols = {
      {"iteration", "flow iteration"},
      {"residual", "max |W| before the step"},
      {"energy", "int H^2 dmu before the step"},
      {"area", "area after the step"},
      {"kappa", "Lagrange parameter used by the step"},
      {"slope", "graph slope after the step"},
      {"dt", "accepted time step"},
      {"area_drift", "|area - target| / target after projection"}};
  Run run(cfg, {{"family.csv", "one row per sweep entry", family_cols},
                {"coefficients_*.csv", "harmonic coefficients of u per entry", coeff_cols},
                {"trace_*.csv", "flow trace per entry", trace_cols},
                {"expectations.csv", "expected properties of the family", expectation_columns()}});

  const auto t0 = std::chrono::steady_clock::now();
  const auto fam = continuation(cfg.metric, cfg.area_radii, cfg.solver, cfg.band_limit, cfg.offset, cfg.initial_l2_fraction);
  run.time("continuation", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  const double m = cfg.metric.background_mass();
  report::Table family{"family", family_cols, {}};
  for (size_t i = 0; i < fam.size(); ++i) {
    const auto& e = fam[i];
    const auto& r = e.result.report;
    const double lam = coordinate_radius_for_area_radius(m, e.area_radius);
    const double kc = m > 0.0 ? oracles::schwarzschild_round_sphere(m, lam).kappa : 0.0;
    double spread = NAN;
    if (e.result.surface.chart) {
      const auto v = e.result.surface.values().values;
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      spread = (*hi - *lo) / lam;
    }
    const bool solved = e.ok || e.result.surface.chart;
    auto val = [&](double x) { return solved ? report::num(x) : std::string("nan"); };
    family.add_row({report::num(static_cast<int>(i)), report::num(e.area_radius), report::num(lam), e.ok ? "1" : "0",
                    report::num(e.result.iterations), val(r.kappa), report::num(kc), val(r.hawking_mass),
                    val(r.willmore_energy), val(r.area), val(r.residual_max), val(r.residual_l2), val(r.mean_H),
                    val(r.mean_H * e.area_radius), val(r.perp_H_l2), report::num(spread), e.error});
    char idx[16];
    std::snprintf(idx, sizeof idx, "%02zu", i);
    if (e.result.surface.chart) {
      report::Table coeffs{std::string("coefficients_") + idx, coeff_cols, {}};
      const auto& u = e.result.surface.u;
      for (int l = 0; l <= u.band_limit; ++l)
        for (int mm = -l; mm <= l; ++mm) coeffs.add_row({report::num(l), report::num(mm), report::num(u(l, mm))});
      run.write(coeffs);
    }
    report::Table trace{std::string("trace_") + idx, trace_cols, {}};
    for (const auto& row : e.result.trace.rows)
      trace.add_row({report::num(row.iteration), report::num(row.residual), report::num(row.energy),
                     report::num(row.area), report::num(row.kappa), report::num(row.slope), report::num(row.dt),
                     report::num(row.area_drift)});
    run.write(trace);
  }
  run.write(family);

  // expectations
  std::vector<CheckResult> ex;
  bool all_ok = true;
  for (const auto& e : fam) all_ok = all_ok && e.ok;
  ex.push_back(checks::boolean("", "every entry converged", all_ok));
  const double mh_tol = cfg.expect.value("hawking_mass_tolerance", 1e-6);
  if (cfg.metric.kind == MetricKind::Schwarzschild) {
    double worst = 0.0;
    bool dec = true;
    for (size_t i = 0; i < fam.size(); ++i) {
      worst = std::max(worst, fam[i].ok ? std::abs(fam[i].result.report.hawking_mass - m) : INFINITY);
      if (i > 0 && fam[i].ok && fam[i - 1].ok) {
        const bool up = cfg.area_radii[i] > cfg.area_radii[i - 1];
        const double k0 = fam[i - 1].result.report.kappa, k1 = fam[i].result.report.kappa;
        dec = dec && k1 > 0.0 && (up ? k1 < k0 : k1 > k0);
      }
    }
    ex.push_back(checks::at_most("", "m_H equals the mass on every entry", worst, mh_tol));
    ex.push_back(checks::boolean("", "kappa positive and decreasing in the area radius", dec));
  } else if (cfg.metric.kind == MetricKind::Euclidean) {
    double worst = 0.0;
    for (const auto& e : fam)
      worst = std::max(worst, e.ok ? std::abs(e.result.report.kappa) * e.area_radius * e.area_radius * e.area_radius +
                                         std::abs(e.result.report.hawking_mass)
                                   : INFINITY);
    ex.push_back(checks::at_most("", "kappa a^3 and m_H vanish", worst, mh_tol));
  } else {
    double worst = 0.0;
    for (const auto& e : fam)
      worst = std::max(worst, e.ok && std::isfinite(e.result.report.hawking_mass) ? e.result.report.residual_max : INFINITY);
    ex.push_back(checks::at_most("", "residual within tolerance and m_H finite", worst, cfg.solver.tolerance));
  }
  if (cfg.expect.contains("hawking_mass")) {
    const auto pinned = cfg.expect["hawking_mass"].get<std::vector<double>>();
    const double tol = cfg.expect.value("pinned_tolerance", 1e-9);
    double worst = pinned.size() == fam.size() ? 0.0 : INFINITY;
    for (size_t i = 0; i < std::min(pinned.size(), fam.size()); ++i)
      worst = std::max(worst, fam[i].ok ? std::abs(fam[i].result.report.hawking_mass - pinned[i]) : INFINITY);
    ex.push_back(checks::at_most("", "m_H matches the pinned values", worst, tol));
  }
  // empirical rate of mean_H * a -> 2
  {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : fam)
      if (e.ok) {
        const double d = std::abs(e.result.report.mean_H * e.area_radius - 2.0);
        if (d > 0.0) pts.emplace_back(std::log(e.area_radius), std::log(d));
      }
    if (pts.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = static_cast<double>(pts.size());
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      ex.push_back({"", "empirical exponent of |mean_H a - 2| in a", Status::Info, slope, NAN, "fitted on the converged entries"});
    }
  }
  run.write(expectation_table(ex));
  if (fam.size() >= 2) {
    run.plot("family.csv", "kappa.svg", {"kappa against area radius", "area_radius", {"kappa", "kappa_centred"}, true, true, true});
    run.plot("family.csv", "hawking_mass.svg", {"Hawking mass against area radius", "area_radius", {"hawking_mass"}, true, false, false});
  }
  for (const auto& e : fam)
    log << "a = " << report::label(e.area_radius) << ": " << (e.ok ? "converged" : "FAILED " + e.error) << ", kappa "
        << report::num(e.result.report.kappa) << ", m_H " << report::num(e.result.report.hawking_mass) << "\n";
  print_results(log, ex);
  Outcome o{exit_for(ex), ex};
  run.finish(o.exit_code == exit_ok ? "pass" : "fail");
  return o;
}

// ---------------------------------------------------------------------------
// asymptotics

struct HFit {
  double coefficient = NAN;  // of lambda^{-1}|x|^{-1} in proj_perp H
  double residual = NAN;     // |perp H - c q| / |perp H|
  double perp_norm = 0.0;
  bool degenerate = false;   // q vanishes: nothing to fit
};

/// Least-squares fit of proj_perp H against proj_perp(lambda^{-1}|x|^{-1}) in L2 of the chart sphere.
inline HFit fit_perp_H(const GeometryBundle& b) {
  const double lam = b.chart().radius();
  const MeanProjection h = project_mean(b.mean_curvature());
  const MeanProjection q = project_mean(b.map([&](const NodeGeometry& n, int) { return 1.0 / (lam * n.position.norm()); }));
  double hq = 0.0, qq = 0.0, hh = 0.0, ff = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    const double w = b.chart().weight(i);
    hq += w * h.perp[i] * q.perp[i];
    qq += w * q.perp[i] * q.perp[i];
    hh += w * h.perp[i] * h.perp[i];
    ff += w * q.mean * q.mean;
  }
  HFit f;
  f.perp_norm = std::sqrt(hh);
  if (!(qq > 1e-24 * ff)) {
    f.degenerate = true;
    return f;
  }
  f.coefficient = hq / qq;
  double rr = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    const double d = h.perp[i] - f.coefficient * q.perp[i];
    rr += b.chart().weight(i) * d * d;
  }
  f.residual = hh > 0.0 ? std::sqrt(rr / hh) : 0.0;
  return f;
}

inline Outcome cmd_asymptotics(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  if (cfg.lambdas.size() < 3)
    throw Error(ErrorKind::InsufficientSweep, "asymptotics needs at least 3 lambda values, got " + std::to_string(cfg.lambdas.size()));
  if (cfg.xis.empty()) throw Error(ErrorKind::ConfigError, "asymptotics needs sweep.xi");
  const double expected = cfg.expect.value("coefficient", -4.0);
  const double tol = cfg.expect.value("tolerance", 0.1);
  const std::vector<report::Column> cols = {
      {"xi", "offset |xi| of the chart sphere S_lambda(lambda xi)"},
      {"lambda", "sphere radius"},
      {"rho", "lambda (1 - |xi|), distance to the origin"},
      {"mean_H", "mean of H over the chart sphere"},
      {"mean_H_times_lambda", "mean_H * lambda"},
      {"perp_H_l2", "L2 norm of the mean-free part of H"},
      {"fit_coefficient", "least-squares coefficient of the mean-free part of lambda^-1 |x|^-1"},
      {"fit_error", "|fit_coefficient - expected| / |expected|"},
      {"fit_residual", "relative L2 norm of what the fit leaves"},
      {"kappa", "Lagrange parameter estimate"},
      {"kappa_lambda2_rho", "kappa lambda^2 rho"},
      {"degenerate", "1 when the fit function has no mean-free part"},
      {"perp_vanishes", "1 when the mean-free part of H vanishes"}};
  Run run(cfg, {{"asymptotics.csv", "mean curvature decomposition of translated spheres (u = 0)", cols},
                {"expectations.csv", "expected behaviour of the fit", expectation_columns()}});
  report::Table t{"asymptotics", cols, {}};
  std::vector<CheckResult> ex;
  const auto t0 = std::chrono::steady_clock::now();
  for (double xi : cfg.xis) {
    std::vector<double> errs, kap, coefs;
    bool degenerate = false, vanishes = true;
    for (double lam : cfg.lambdas) {
      const GeometryBundle b = geometry_bundle(GraphSurface::sphere(SphereChart::build(xi * cfg.direction, lam, cfg.band_limit)), cfg.metric);
      const HFit f = fit_perp_H(b);
      const MeanProjection h = project_mean(b.mean_curvature());
      const double kappa = lagrange_estimate(b);
      const double rho = lam * std::abs(1.0 - xi);
      const bool perp_zero = f.perp_norm <= 1e-12 * std::abs(h.mean) * std::sqrt(4.0 * checks::pi) * lam;
      const double err = std::abs(f.coefficient - expected) / std::abs(expected);
      degenerate = degenerate || f.degenerate;
      vanishes = vanishes && perp_zero;
      errs.push_back(err);
      kap.push_back(kappa);
      coefs.push_back(f.coefficient);
      t.add_row({report::num(xi), report::num(lam), report::num(rho), report::num(h.mean), report::num(h.mean * lam),
                 report::num(f.perp_norm), report::num(f.coefficient), report::num(err), report::num(f.residual),
                 report::num(kappa), report::num(kappa * lam * lam * rho), f.degenerate ? "1" : "0", perp_zero ? "1" : "0"});
    }
    const std::string at = " at |xi| = " + report::label(xi);
    if (degenerate) {
      ex.push_back({"", "fit degenerate" + at, Status::Info, NAN, NAN, "the fit function is constant on centred spheres"});
    } else if (cfg.metric.kind == MetricKind::Euclidean) {
      ex.push_back(checks::boolean("", "mean-free part of H vanishes" + at, vanishes));
    } else {
      size_t imax = 0;
      for (size_t i = 1; i < cfg.lambdas.size(); ++i)
        if (cfg.lambdas[i] > cfg.lambdas[imax]) imax = i;
      ex.push_back(checks::at_most("", "fit coefficient within tolerance of " + report::label(expected) + " at lambda = " +
                                           report::label(cfg.lambdas[imax]) + at,
                                   errs[imax], tol, "fitted " + report::num(coefs[imax])));
      std::vector<size_t> order(cfg.lambdas.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return cfg.lambdas[a] < cfg.lambdas[b]; });
      bool mono = true;
      for (size_t k = 1; k < order.size(); ++k) mono = mono && errs[order[k]] < errs[order[k - 1]];
      ex.push_back(checks::boolean("", "fit error decreases in lambda" + at, mono));
      // empirical decay of kappa against lambda
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = 0;
      for (size_t i = 0; i < kap.size(); ++i)
        if (kap[i] > 0.0) {
          const double x = std::log(cfg.lambdas[i]), y = std::log(kap[i]);
          sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
        }
      if (n >= 2)
        ex.push_back({"", "empirical exponent of kappa in lambda" + at, Status::Info, (n * sxy - sx * sy) / (n * sxx - sx * sx),
                      NAN, "kappa lambda^2 rho in the table"});
    }
  }
  run.time("sweep", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  run.write(t);
  run.write(expectation_table(ex));
  run.plot("asymptotics.csv", "fit_coefficient.svg", {"fitted coefficient against lambda", "lambda", {"fit_coefficient"}, true, false, false});
  run.plot("asymptotics.csv", "kappa.svg", {"kappa lambda^2 rho against lambda", "lambda", {"kappa_lambda2_rho"}, true, false, false});
  print_results(log, ex);
  Outcome o{exit_for(ex), ex};
  run.finish(o.exit_code == exit_ok ? "pass" : "fail");
  return o;
}

// ---------------------------------------------------------------------------
// flux

/// lambda^{-1} int gbar(xi, nu-bar) R d(mu-bar) over the chart sphere, R the scalar curvature.
inline double scalar_curvature_flux(const GeometryBundle& b, const Vec3& xi) {
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += xi.dot(b.nodes[i].euclid_normal) * b.nodes[i].curv.scalar * b.dmu_bar[i];
  return s / b.chart().radius();
}

inline Outcome cmd_flux(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  const std::vector<report::Column> cols = {
      {"xi", "offset |xi|"},
      {"lambda", "sphere radius"},
      {"rho", "lambda (1 - |xi|)"},
      {"term1", "int [g(tr D^2 xi, nu) + Ric(xi, nu)] H dmu with the vector xi"},
      {"prediction", "-8 pi lambda^-1 rho^-2"},
      {"ratio", "term1 / prediction"},
      {"term2", "1/2 int [div xi - 2 g(D_nu xi, nu)] H^2 dmu"},
      {"term3", "2 int g(zeta, hcirc) H dmu"},
      {"term4", "kappa int g(xi, nu) H dmu"},
      {"total", "int g(xi, nu) W dmu"},
      {"relative_defect", "|total - sum of terms| / scale"},
      {"kappa", "Lagrange parameter estimate"},
      {"scalar_curvature_flux", "lambda^-1 int gbar(xi, nu-bar) R d(mu-bar)"}};
  const std::vector<report::Column> r4cols = {
      {"xi", "offset |xi|"},
      {"band_limit", "graded rule band limit"},
      {"exact", "closed form of the radial-4 integral at lambda = 1"},
      {"quadrature", "graded product rule"},
      {"relative_error", "|quadrature - exact| / |exact|"},
      {"ratio", "exact (1 - |xi|)^2 / pi"}};
  Run run(cfg, {{"flux.csv", "translation flux splitting on translated spheres (u = 0)", cols},
                {"radial4.csv", "radial-4 integral cross-check", r4cols},
                {"expectations.csv", "expected behaviour", expectation_columns()}});
  std::vector<CheckResult> ex;
  report::Table r4{"radial4", r4cols, {}};
  const double r4tol = cfg.expect.value("radial4_tolerance", 1e-9);
  for (double xi : cfg.radial4_xis) {
    const int L = std::max(checks::moment_band_limit(xi), 32);
    const auto o = oracles::radial4_leading(xi, 1.0);
    const double q = checks::radial4_quadrature(xi, 1.0, L);
    const double err = checks::rel(q, o.exact);
    r4.add_row({report::num(xi), report::num(L), report::num(o.exact), report::num(q), report::num(err), report::num(o.ratio)});
    ex.push_back(checks::at_most("", "radial-4 quadrature at |xi| = " + report::label(xi), err, r4tol));
  }
  report::Table t{"flux", cols, {}};
  const auto t0 = std::chrono::steady_clock::now();
  const double ratio_tol = cfg.expect.value("ratio_tolerance", 0.15);
  const double ratio_lambda = cfg.expect.value("ratio_lambda", NAN);
  for (double xi : cfg.xis) {
    if (!(xi < 1.0)) throw Error(ErrorKind::ConfigError, "flux needs |xi| < 1");
    for (double lam : cfg.lambdas) {
      const Vec3 x0 = xi * cfg.direction;
      const GeometryBundle b = geometry_bundle(GraphSurface::sphere(SphereChart::build(x0, lam, cfg.band_limit)), cfg.metric);
      const FluxReport f = translation_variation_decomposed(b, x0);
      const double rho = lam * (1.0 - xi);
      const double pred = -8.0 * checks::pi / (lam * rho * rho);
      const double rflux = scalar_curvature_flux(b, x0);
      t.add_row({report::num(xi), report::num(lam), report::num(rho), report::num(f.term1), report::num(pred),
                 report::num(f.term1 / pred), report::num(f.term2), report::num(f.term3), report::num(f.term4),
                 report::num(f.total), report::num(f.relative_defect()), report::num(f.kappa), report::num(rflux)});
      const std::string at = " at |xi| = " + report::label(xi) + ", lambda = " + report::label(lam);
      if (cfg.metric.kind == MetricKind::Euclidean) {
        ex.push_back(checks::at_most("", "term1 vanishes" + at, std::abs(f.term1) / std::max(f.scale, 1e-300), 1e-12));
      } else if (cfg.metric.kind == MetricKind::Schwarzschild && lam == ratio_lambda) {
        ex.push_back(checks::at_most("", "term1 ratio within tolerance of 1" + at, std::abs(f.term1 / pred - 1.0), ratio_tol,
                                     "ratio " + report::num(f.term1 / pred)));
      }
    }
  }
  run.time("sweep", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  if (!t.rows.empty()) run.write(t);
  if (!r4.rows.empty()) run.write(r4);
  run.write(expectation_table(ex));
  if (t.rows.size() >= 2)
    run.plot("flux.csv", "ratio.svg", {"term1 / (-8 pi lambda^-1 rho^-2) against lambda", "lambda", {"ratio"}, true, false, false});
  print_results(log, ex);
  Outcome o{exit_for(ex), ex};
  run.finish(o.exit_code == exit_ok ? "pass" : "fail");
  return o;
}

// ---------------------------------------------------------------------------

/// Loads the config, runs the command and maps errors to exit codes.
inline int run_command(const std::string& command, const std::string& config_path, const Overrides& ov,
                       std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, command, ov);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
  try {
    if (command == "verify") return cmd_verify(cfg, log).exit_code;
    if (command == "solve") return cmd_solve(cfg, log).exit_code;
    if (command == "asymptotics") return cmd_asymptotics(cfg, log).exit_code;
    return cmd_flux(cfg, log).exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::InsufficientSweep ? exit_config_error
                                                                                           : exit_numeric_failure;
  }
}

}  // namespace willmore::lab
