/// \file solver.hpp
/// \brief Area-constrained Willmore spheres by a semi-implicit constrained
/// gradient flow on graphs over a fixed chart sphere.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "willmore/functionals.hpp"

namespace willmore {

struct SolverConfig {
  double target_area = 0.0;   // <= 0 keeps the area of the initial surface
  double dt = 1.0;            // time step in units of lambda^4
  double c_bi = 2.0;          // semi-implicit bilaplacian weight
  int max_iterations = 400;
  double tolerance = 1e-7;    // on max |W|
  double graph_margin = 0.9;  // accepted steps keep lambda^{-1}|u| + |grad u| below this
  bool pin_translations = false;  // drop the degree-1 part of the velocity
  double min_dt = 1e-6;       // in units of lambda^4; rejection below this aborts
  double area_tolerance = 1e-12;

  void validate() const {
    if (!(dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be positive");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::ConfigError, "tolerance must be positive");
    if (!(c_bi >= 0.0)) throw Error(ErrorKind::ConfigError, "c_bi must be >= 0");
    if (max_iterations <= 0) throw Error(ErrorKind::ConfigError, "max_iterations must be positive");
    if (!(graph_margin > 0.0 && graph_margin <= 1.0))
      throw Error(ErrorKind::ConfigError, "graph_margin must lie in (0, 1]");
    if (!(min_dt > 0.0 && min_dt <= dt)) throw Error(ErrorKind::ConfigError, "need 0 < min_dt <= dt");
    if (!(area_tolerance > 0.0)) throw Error(ErrorKind::ConfigError, "area_tolerance must be positive");
  }

  friend void to_json(nlohmann::json& j, const SolverConfig& c) {
    j = {{"target_area", c.target_area}, {"dt", c.dt},
         {"c_bi", c.c_bi},               {"max_iterations", c.max_iterations},
         {"tolerance", c.tolerance},     {"graph_margin", c.graph_margin},
         {"pin_translations", c.pin_translations}, {"min_dt", c.min_dt},
         {"area_tolerance", c.area_tolerance}};
  }
  friend void from_json(const nlohmann::json& j, SolverConfig& c) {
    SolverConfig d;
    c.target_area = j.value("target_area", d.target_area);
    c.dt = j.value("dt", d.dt);
    c.c_bi = j.value("c_bi", d.c_bi);
    c.max_iterations = j.value("max_iterations", d.max_iterations);
    c.tolerance = j.value("tolerance", d.tolerance);
    c.graph_margin = j.value("graph_margin", d.graph_margin);
    c.pin_translations = j.value("pin_translations", d.pin_translations);
    c.min_dt = j.value("min_dt", std::min(d.min_dt, c.dt));
    c.area_tolerance = j.value("area_tolerance", d.area_tolerance);
    c.validate();
  }
};

struct TraceRow {
  int iteration = 0;
  double residual = 0.0;  // max |W| before the step
  double energy = 0.0;
  double area = 0.0;
  double kappa = 0.0;
  double slope = 0.0;
  double dt = 0.0;          // absolute step actually taken
  double area_drift = 0.0;  // |area - target| / target after projection
};

struct SolveTrace {
  std::vector<TraceRow> rows;

  void write_csv(std::ostream& os) const {
    os << "iteration,residual,energy,area,kappa,slope,dt,area_drift\r\n";
    char buf[512];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\r\n", r.iteration, r.residual,
                    r.energy, r.area, r.kappa, r.slope, r.dt, r.area_drift);
      os << buf;
    }
  }
  void write_csv(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
    write_csv(f);
  }
};

struct StepResult {
  GraphSurface surface;
  double kappa = 0.0;
  double residual = 0.0;  // max |W| of the input surface
  double energy_before = 0.0;
  double area = 0.0;
  double area_drift = 0.0;
  double slope = 0.0;
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline GraphSurface shifted(const GraphSurface& s, double c) {
  GraphSurface out = s;
  out.u(0, 0) += c * std::sqrt(4.0 * std::numbers::pi);
  return out;
}

/// Uniform normal shift c with graph_area(s + c) = target. `rate` estimates dA/dc.
inline GraphSurface project_area(const GraphSurface& s, const MetricSpec& spec, double target, double rate,
                                 double tolerance) {
  double c0 = 0.0, f0 = graph_area(s, spec) - target;
  if (std::abs(f0) <= tolerance * target) return s;
  double c1 = -f0 / rate, f1 = graph_area(shifted(s, c1), spec) - target;
  for (int it = 0; it < 60; ++it) {
    if (std::abs(f1) <= tolerance * target) return shifted(s, c1);
    if (f1 == f0) break;
    const double c2 = c1 - f1 * (c1 - c0) / (f1 - f0);
    c0 = c1;
    f0 = f1;
    c1 = c2;
    f1 = graph_area(shifted(s, c1), spec) - target;
  }
  throw Error(ErrorKind::NonconvergentAreaProjection,
              "area projection stalled at relative error " + std::to_string(std::abs(f1) / target));
}

}  // namespace detail

namespace detail {

struct Velocity {
  ScalarField w;           // acw_operator
  HarmonicCoeffs v;        // graph speed W / g(n, nu), degree 1 removed when pinned
  double residual = 0.0;   // max |W| or, when pinned, max |g(n, nu) v|
  double area_rate = 0.0;  // d area / d(uniform shift)
};

inline Velocity velocity(const GeometryBundle& b, double kappa, bool pin) {
  const SphereChart& c = b.chart();
  Velocity out;
  out.w = acw_operator(b, kappa);
  ScalarField v(b.surface.chart), gn(b.surface.chart);
  for (int i = 0; i < b.size(); ++i) {
    gn[i] = b.nodes[i].inner(c.direction(i), b.nodes[i].normal);
    v[i] = out.w[i] / gn[i];
    out.area_rate += b.nodes[i].H * gn[i] * b.dmu[i];
  }
  out.v = analyze(v);
  if (!pin) {
    out.residual = out.w.max_abs();
    return out;
  }
  for (int m = -1; m <= 1; ++m) out.v(1, m) = 0.0;
  const ScalarField vp = synthesize(out.v, b.surface.chart);
  for (int i = 0; i < b.size(); ++i) out.residual = std::max(out.residual, std::abs(gn[i] * vp[i]));
  return out;
}

}  // namespace detail

/// Residual the flow drives to zero: max |W|, or with pinned translations the part
/// of W not absorbed by degree-1 graph speeds.
inline double flow_residual(const GeometryBundle& b, bool pin_translations) {
  return detail::velocity(b, lagrange_estimate(b), pin_translations).residual;
}

/// One step of the flow from the precomputed bundle of the current surface.
/// Normal speed W (the descent direction of int H^2 at fixed area), written as a
/// graph speed W / g(n, nu); the bilaplacian part is taken semi-implicitly:
///   (1 + c dt k_l) u'_lm = u_lm + dt v_lm + c dt k_l u_lm,  k_l = (l(l+1))^2 / lambda^4.
inline StepResult flow_step(const GeometryBundle& b, const SolverConfig& cfg, double target_area, double dt) {
  const GraphSurface& s = b.surface;
  const SphereChart& c = *s.chart;
  const double lambda = c.radius();
  StepResult out;
  out.kappa = lagrange_estimate(b);
  const detail::Velocity vel = detail::velocity(b, out.kappa, cfg.pin_translations);
  out.residual = vel.residual;
  out.energy_before = willmore_energy(b);

  HarmonicCoeffs u = s.u.resized(c.band_limit());
  const double l4 = std::pow(lambda, 4);
  for (int l = 0; l <= u.band_limit; ++l) {
    const double k = std::pow(l * (l + 1.0), 2) / l4;
    const double denom = 1.0 + cfg.c_bi * dt * k;
    for (int m = -l; m <= l; ++m) u(l, m) = (u(l, m) + dt * vel.v(l, m) + cfg.c_bi * dt * k * u(l, m)) / denom;
  }
  GraphSurface next(s.chart, u);
  if (graph_slope(next) > cfg.graph_margin)
    throw Error(ErrorKind::StepRejected, "step would break the graph condition");
  next = detail::project_area(next, b.spec, target_area, vel.area_rate, cfg.area_tolerance);
  out.slope = graph_slope(next);
  if (out.slope > cfg.graph_margin) throw Error(ErrorKind::StepRejected, "projection broke the graph condition");
  out.surface = next;
  out.area = graph_area(next, b.spec);
  out.area_drift = std::abs(out.area - target_area) / target_area;
  return out;
}

/// Convenience overload building the bundle first; dt in units of lambda^4.
inline StepResult flow_step(const GraphSurface& s, const MetricSpec& spec, const SolverConfig& cfg) {
  cfg.validate();
  const GeometryBundle b = geometry_bundle(s, spec);
  const double target = cfg.target_area > 0.0 ? cfg.target_area : area(b);
  return flow_step(b, cfg, target, cfg.dt * std::pow(s.chart->radius(), 4));
}

struct SolveResult {
  GraphSurface surface;
  WillmoreReport report;
  SolveTrace trace;
  bool converged = false;
  int iterations = 0;
};

/// Thrown when the iteration cap is hit; carries the best surface seen and the trace.
class SolveFailure : public Error {
 public:
  SolveFailure(ErrorKind k, const std::string& what, SolveResult partial)
      : Error(k, what), partial_(std::move(partial)) {}
  const SolveResult& partial() const { return partial_; }

 private:
  SolveResult partial_;
};

inline SolveResult solve_acw(const MetricSpec& spec, const GraphSurface& initial, const SolverConfig& cfg) {
  cfg.validate();
  spec.validate();
  require_graph_condition(initial, cfg.graph_margin);
  const double l4 = std::pow(initial.chart->radius(), 4);
  const double dt_max = cfg.dt * l4, dt_min = cfg.min_dt * l4;

  SolveResult res;
  GraphSurface s = initial;
  GeometryBundle b = geometry_bundle(s, spec);
  const double target = cfg.target_area > 0.0 ? cfg.target_area : area(b);
  double dt = dt_max;
  double best = INFINITY, resid = INFINITY;
  GraphSurface best_surface = s;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double kappa = lagrange_estimate(b);
    resid = detail::velocity(b, kappa, cfg.pin_translations).residual;
    if (resid < best) {
      best = resid;
      best_surface = s;
    }
    res.iterations = it;
    if (resid <= cfg.tolerance) {
      res.converged = true;
      break;
    }
    const double energy = willmore_energy(b);
    const bool at_target = std::abs(area(b) - target) <= 1e-9 * target;
    StepResult step;
    GeometryBundle nb;
    for (;;) {
      try {
        step = flow_step(b, cfg, target, dt);
        nb = geometry_bundle(step.surface, spec);
        // at fixed area a descent step may not raise the energy
        if (at_target && willmore_energy(nb) > energy * (1.0 + 1e-12))
          throw Error(ErrorKind::StepRejected, "energy increased");
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::StepRejected && e.kind() != ErrorKind::GraphConditionViolated) throw;
        dt *= 0.5;
        if (dt < dt_min) {
          res.surface = best_surface;
          throw SolveFailure(ErrorKind::StepRejected, "time step fell below min_dt: " + std::string(e.what()),
                             res);
        }
      }
    }
    res.trace.rows.push_back({it, resid, energy, step.area, kappa, step.slope, dt, step.area_drift});
    s = step.surface;
    b = std::move(nb);
    dt = std::min(dt * 2.0, dt_max);
  }
  res.surface = res.converged ? s : best_surface;
  if (!res.converged) {
    res.report = willmore_report(geometry_bundle(res.surface, spec));
    throw SolveFailure(ErrorKind::MaxIterations,
                       "no convergence after " + std::to_string(cfg.max_iterations) +
                           " iterations, best residual " + detail::sci(best),
                       res);
  }
  res.report = willmore_report(b);
  TraceRow last{res.iterations, resid, res.report.willmore_energy, res.report.area,
                res.report.kappa, graph_slope(s), 0.0, std::abs(res.report.area - target) / target};
  res.trace.rows.push_back(last);
  return res;
}

/// Coordinate radius r of the centred sphere with area 4 pi a^2 in Schwarzschild of mass m
/// (r (1 + m / 2r)^2 = a).
inline double coordinate_radius_for_area_radius(double m, double a) {
  if (m == 0.0) return a;
  if (!(a >= 2.0 * m)) throw Error(ErrorKind::InvalidDomain, "area radius below the horizon value 2m");
  return 0.5 * ((a - m) + std::sqrt((a - m) * (a - m) - m * m));
}

struct ContinuationEntry {
  double area_radius = 0.0;  // target: area = 4 pi a^2
  bool ok = false;
  std::string error;
  SolveResult result;
  double mean_H = 0.0;      // proj onto constants of H
  double mean_H_times_area_radius = 0.0;
};

/// Solves along a monotone list of area radii, warm-starting each entry from the
/// previous solution with u rescaled to the new chart radius. The first entry
/// starts from u = initial_l2_fraction * r * Y20 / max|Y20|.
inline std::vector<ContinuationEntry> continuation(const MetricSpec& spec, const std::vector<double>& area_radii,
                                                   const SolverConfig& cfg, int band_limit,
                                                   const Vec3& offset = Vec3::Zero(),
                                                   double initial_l2_fraction = 0.0) {
  for (size_t i = 1; i < area_radii.size(); ++i)
    if (!(area_radii[i] > area_radii[i - 1]) && !(area_radii[i] < area_radii[i - 1]))
      throw Error(ErrorKind::ConfigError, "continuation radii must be strictly monotone");
  if (area_radii.size() > 2) {
    const bool up = area_radii[1] > area_radii[0];
    for (size_t i = 1; i < area_radii.size(); ++i)
      if ((area_radii[i] > area_radii[i - 1]) != up)
        throw Error(ErrorKind::ConfigError, "continuation radii must be monotone");
  }
  std::vector<ContinuationEntry> out;
  std::optional<GraphSurface> prev;
  const double m = spec.background_mass();
  for (double a : area_radii) {
    ContinuationEntry e;
    e.area_radius = a;
    try {
      const double r = coordinate_radius_for_area_radius(m, a);
      auto chart = SphereChart::build(offset, r, band_limit);
      HarmonicCoeffs u(band_limit);
      if (prev) {
        const double s = r / prev->chart->radius();
        const HarmonicCoeffs pu = prev->u.resized(band_limit);
        for (size_t k = 0; k < u.a.size(); ++k) u.a[k] = s * pu.a[k];
      } else if (initial_l2_fraction != 0.0) {
        u(2, 0) = 1.0;
        u(2, 0) = initial_l2_fraction * r / synthesize(u, chart).max_abs();
      }
      SolverConfig c = cfg;
      c.target_area = 4.0 * std::numbers::pi * a * a;
      e.result = solve_acw(spec, GraphSurface(chart, u), c);
      e.ok = true;
      e.mean_H = e.result.report.mean_H;
      e.mean_H_times_area_radius = e.mean_H * a;
      prev = e.result.surface;
    } catch (const SolveFailure& f) {
      e.error = f.what();
      e.result = f.partial();
    } catch (const Error& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace willmore
