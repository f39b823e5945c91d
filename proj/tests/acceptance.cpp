// Prints one line per acceptance criterion: "criterion N: PASS|FAIL  <measurement>".
// Exit status is 0 when the set of failing criteria equals the --expect-fail set.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "willmore/checks.hpp"
#include "willmore/experiments.hpp"

using namespace willmore;
using checks::rel;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Verdict check_closed_form_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& m : checks::moment_comparisons()) worst = std::max(worst, m.graded_error);
  double ip = 0.0;
  for (double xi : {0.0, 0.3, 0.5, 0.9}) ip = std::max(ip, checks::inner_product_deviation(xi, 32));
  for (double xi : {0.99, 1.5, 2.0}) ip = std::max(ip, checks::inner_product_deviation(xi, 64));
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && ip <= 1e-10 && t <= 10.0,
          "moments max rel. error " + sci(worst) + " (<= 1e-10), inner products " + sci(ip) + ", " + sci(t) + " s (<= 10 s)"};
}

Verdict check_static_equation() {
  Rng rng(checks::Options{}.seed);
  double worst = 0.0;
  for (const Vec3& x : checks::sample_points(rng, 200, 2.0, 500.0)) {
    const PotentialJet p = potential_jet(x, 2.0);
    const Mat3 ric = curvature(MetricSpec::schwarzschild(2.0), x).ricci;
    worst = std::max(worst, checks::max_abs(p.D2N - p.N * ric) / (1.0 + checks::max_abs(ric)));
  }
  return {worst <= 1e-8, "max normalized residual " + sci(worst) + " over 200 points (<= 1e-8)"};
}

Verdict check_hawking_mass() {
  double worst = 0.0;
  for (double r : {5.0, 10.0, 50.0, 100.0, 500.0}) worst = std::max(worst, std::abs(checks::centred_hawking_mass(r, 32) - 2.0));
  return {worst <= 1e-6, "max |m_H - 2| " + sci(worst) + " (<= 1e-6)"};
}

Verdict check_centred_fixed_point() {
  const checks::CentredSolve c = checks::centred_solve(32, 1e-7);
  const double res = c.result.report.residual_max;
  return {res <= 1e-7 && c.kappa_error <= 1e-6 && c.seconds <= 300.0,
          "residual " + sci(res) + " (<= 1e-7), kappa rel. error " + sci(c.kappa_error) + " (<= 1e-6), " +
              std::to_string(c.result.iterations) + " iterations, " + sci(c.seconds) + " s"};
}

Verdict check_flux_identity() {
  const auto corpus = random_corpus(default_seed, 30);
  const auto a = checks::flux_corpus(corpus, 32, default_seed), b = checks::flux_corpus(corpus, 64, default_seed);
  const double gain = a.max_relative_defect / b.max_relative_defect;
  return {a.max_relative_defect <= 1e-7 && gain >= 10.0,
          "max rel. defect " + sci(a.max_relative_defect) + " at L=32 (<= 1e-7), " + sci(b.max_relative_defect) +
              " at L=64, gain " + sci(gain) + " (>= 10), " + std::to_string(a.evaluations) + " evaluations"};
}

Verdict check_divergence_fluxes() {
  const auto corpus = random_corpus(default_seed, 30);
  const auto d = checks::divergence_fluxes(corpus, 32);
  const auto inside = checks::newtonian_flux_at(0.5, 32), outside = checks::newtonian_flux_at(1.5, 32);
  const double worst = std::max(d.normal_flux, d.dipole_flux);
  const double nerr = std::max(std::abs(inside.value - 4.0 * checks::pi), std::abs(outside.value));
  const bool cls = inside.encloses_origin && !outside.encloses_origin;
  return {worst <= 1e-9 && cls && nerr <= 1e-9,
          "relative fluxes " + sci(worst) + " (<= 1e-9, absolute " + sci(std::max(d.normal_abs, d.dipole_abs)) +
              "), Newtonian 4pi/0 error " + sci(nerr) + (cls ? ", classified" : ", MISCLASSIFIED")};
}

Verdict check_radial4() {
  const auto r9 = oracles::radial4_leading(0.9), r99 = oracles::radial4_leading(0.99);
  double q = 0.0;
  for (double xi : {0.5, 0.9, 0.99}) q = std::max(q, rel(checks::radial4_quadrature(xi, 1.0, checks::moment_band_limit(xi)), oracles::radial4_leading(xi).exact));
  const bool ok = std::abs(r9.ratio - 0.9701) <= 1e-3 && std::abs(r99.ratio - 0.99949) <= 1e-4 && q <= 1e-9;
  return {ok, "ratio " + report::num(r9.ratio) + " at 0.9, " + report::num(r99.ratio) + " at 0.99, quadrature " + sci(q) + " (<= 1e-9)"};
}

Verdict check_h_expansion() {
  std::vector<double> err;
  std::string coefs;
  for (double lam : {100.0, 200.0, 400.0}) {
    const GeometryBundle b = geometry_bundle(GraphSurface::sphere(SphereChart::build(Vec3(0.9, 0, 0), lam, 128)),
                                             MetricSpec::schwarzschild(2.0));
    const lab::HFit f = lab::fit_perp_H(b);
    err.push_back(std::abs(f.coefficient + 4.0) / 4.0);
    coefs += (coefs.empty() ? "" : ", ") + report::label(f.coefficient);
  }
  const bool mono = err[1] < err[0] && err[2] < err[1];
  return {err[2] <= 0.1 && mono, "fitted coefficients " + coefs + " at lambda 100, 200, 400 (target -4 +- 10%, " +
                                     (mono ? "error decreasing" : "error not decreasing") + ")"};
}

Verdict check_gauss_codazzi() {
  const auto corpus = random_corpus(default_seed, 30);
  const auto metrics = corpus_metrics();
  double worst = 0.0, sym = 0.0;
  for (size_t k = 0; k < corpus.size(); ++k)
    worst = std::max(worst, gauss_codazzi_residual(geometry_bundle(corpus[k].surface(32), metrics[k % 3])).max_residual);
  for (const auto& spec : {MetricSpec::euclidean(), MetricSpec::schwarzschild(2.0)})
    for (double r : {5.0, 20.0, 100.0})
      sym = std::max(sym, gauss_codazzi_residual(geometry_bundle(GraphSurface::sphere(SphereChart::build(Vec3::Zero(), r, 32)), spec)).max_residual);
  return {worst <= 1e-6 && sym <= 1e-8, "corpus " + sci(worst) + " (<= 1e-6), symmetric " + sci(sym) + " (<= 1e-8)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> expect_fail;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail; exit 0 when exactly these fail");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, check_closed_form_suite}, {2, check_static_equation}, {3, check_hawking_mass},  {4, check_centred_fixed_point},
      {5, check_flux_identity},     {6, check_divergence_fluxes}, {7, check_radial4},     {8, check_h_expansion}};
  std::set<int> failed;
  std::map<int, bool> passed;
  for (auto& [n, f] : criteria) {
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    passed[n] = v.pass;
    if (!v.pass) failed.insert(n);
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  }
  {
    // no direct experiment exists; it holds when every criterion it rests on holds
    const bool ok = passed[5] && passed[6] && passed[7] && passed[8];
    if (!ok) failed.insert(9);
    std::cout << "criterion 9: " << (ok ? "PASS" : "FAIL")
              << "  not reproducible as an experiment; rests on criteria 5-8"
              << (ok ? "" : ", which do not all pass") << std::endl;
  }
  {
    Verdict v = check_gauss_codazzi();
    if (!v.pass) failed.insert(10);
    std::cout << "criterion 10: " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  }
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  std::cout << failed.size() << " of 10 criteria fail";
  if (!expected.empty()) std::cout << (failed == expected ? " (as expected)" : " (differs from --expect-fail)");
  std::cout << std::endl;
  return failed == expected ? 0 : 1;
}
