/// \file surface.hpp
/// \brief Radial graphs over coordinate spheres and their extrinsic geometry.
///
/// A graph surface is Phi(x) = x + u(x) (lambda^{-1} x - xi) over the chart
/// sphere S_lambda(lambda xi). With n the outward chart direction this is
/// Phi = lambda xi + (lambda + u) n, which is differentiated analytically in
/// the chart angles; u enters through its spectral angular derivatives.
///
/// Sign conventions: nu is the outward unit normal, h(X, Y) = g(D_X nu, Y),
/// H = tr h, so the round sphere of radius r in flat space has H = 2/r.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "willmore/error.hpp"
#include "willmore/metrics.hpp"
#include "willmore/sphere.hpp"

namespace willmore {

using Mat2 = Eigen::Matrix2d;

struct GraphSurface {
  ChartPtr chart;
  HarmonicCoeffs u;  // band limit <= chart band limit

  GraphSurface() = default;
  GraphSurface(ChartPtr c, HarmonicCoeffs coeffs) : chart(std::move(c)), u(std::move(coeffs)) {
    if (u.band_limit > chart->band_limit())
      throw Error(ErrorKind::ChartMismatch, "graph function exceeds chart band limit");
  }

  /// The chart sphere itself (u = 0).
  static GraphSurface sphere(ChartPtr c) { return GraphSurface(c, HarmonicCoeffs(c->band_limit())); }

  static GraphSurface from_field(const ScalarField& f) { return GraphSurface(f.chart, analyze(f)); }

  ScalarField values() const { return synthesize(u, chart); }

  /// Same graph on a chart with another band limit (coefficients truncated or padded).
  GraphSurface resampled(int band_limit) const {
    auto c = SphereChart::build(chart->offset(), chart->radius(), band_limit);
    return GraphSurface(c, u.resized(std::min(band_limit, u.band_limit)));
  }
};

/// max over nodes of lambda^{-1}|u| + |grad-bar u|.
inline double graph_slope(const GraphSurface& s) {
  const SphereChart& c = *s.chart;
  const AngularDerivatives d = angular_derivatives(s.u, s.chart);
  double worst = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    const double st = c.sin_theta(i);
    const double grad = std::sqrt(d.t[i] * d.t[i] + d.p[i] * d.p[i] / (st * st)) / c.radius();
    worst = std::max(worst, std::abs(d.f[i]) / c.radius() + grad);
  }
  return worst;
}

inline void require_graph_condition(const GraphSurface& s, double bound = 1.0) {
  const double slope = graph_slope(s);
  if (!(slope <= bound))
    throw Error(ErrorKind::GraphConditionViolated,
                "lambda^-1|u| + |grad u| = " + std::to_string(slope) + " exceeds " + std::to_string(bound));
}

inline std::vector<Vec3> embed_graph(const GraphSurface& s) {
  require_graph_condition(s);
  const SphereChart& c = *s.chart;
  const ScalarField u = s.values();
  std::vector<Vec3> x(c.size());
  for (int i = 0; i < c.size(); ++i) x[i] = c.position(i) + u[i] * c.direction(i);
  return x;
}

struct NodeGeometry {
  Vec3 position;
  std::array<Vec3, 2> tangent;  // d_theta Phi, d_phi Phi
  std::array<Vec3, 3> second;   // d_tt Phi, d_tp Phi, d_pp Phi
  Mat2 gamma, gamma_inv;
  std::array<Mat2, 2> induced_christoffel;  // [c](a, b)
  Vec3 normal;                              // g-unit outward normal (vector components)
  Vec3 euclid_normal;
  Mat2 h, hcirc;
  double H = 0.0;
  double hcirc_norm2 = 0.0;
  MetricJet jet;
  Connection conn;
  CurvatureData curv;

  /// Gamma(X, Y)^k = Gamma^k_ij X^i Y^j.
  Vec3 christoffel(const Vec3& a, const Vec3& b) const {
    return {a.dot(conn.gamma[0] * b), a.dot(conn.gamma[1] * b), a.dot(conn.gamma[2] * b)};
  }
  double inner(const Vec3& a, const Vec3& b) const { return a.dot(jet.g * b); }
  Vec3 tangent_vector(double f_theta, double f_phi) const {
    const Eigen::Vector2d up = gamma_inv * Eigen::Vector2d(f_theta, f_phi);
    return up[0] * tangent[0] + up[1] * tangent[1];
  }
};

struct GeometryBundle {
  GraphSurface surface;
  MetricSpec spec;
  std::vector<NodeGeometry> nodes;
  std::vector<double> dmu;      // quadrature weights of the g area element
  std::vector<double> dmu_bar;  // quadrature weights of the Euclidean area element

  const SphereChart& chart() const { return *surface.chart; }
  int size() const { return static_cast<int>(nodes.size()); }

  ScalarField field(std::vector<double> v) const { return ScalarField(surface.chart, std::move(v)); }
  template <typename F>
  ScalarField map(F&& f) const {
    std::vector<double> v(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i], static_cast<int>(i));
    return field(std::move(v));
  }
  ScalarField mean_curvature() const {
    return map([](const NodeGeometry& n, int) { return n.H; });
  }
};

namespace detail {

inline Mat2 symmetric2(double a, double b, double c) {
  Mat2 m;
  m << a, b, b, c;
  return m;
}

}  // namespace detail

inline GeometryBundle geometry_bundle(const GraphSurface& s, const MetricSpec& spec) {
  require_graph_condition(s);
  spec.validate();
  const SphereChart& c = *s.chart;
  const double lambda = c.radius();
  const AngularDerivatives u = angular_derivatives(s.u, s.chart);

  GeometryBundle b;
  b.surface = s;
  b.spec = spec;
  b.nodes.resize(c.size());
  b.dmu.resize(c.size());
  b.dmu_bar.resize(c.size());

  for (int i = 0; i < c.size(); ++i) {
    NodeGeometry& g = b.nodes[i];
    const Vec3 n = c.direction(i), nt = c.d_theta_direction(i), np = c.d_phi_direction(i);
    const double st = c.sin_theta(i), ct = c.cos_theta(i);
    const double cp = std::cos(c.phi(i)), sp = std::sin(c.phi(i));
    const Vec3 ntt = -n;
    const Vec3 ntp(-ct * sp, ct * cp, 0.0);
    const Vec3 npp(-st * cp, -st * sp, 0.0);
    const double rad = lambda + u.f[i];

    g.position = c.center() + rad * n;
    g.tangent[0] = u.t[i] * n + rad * nt;
    g.tangent[1] = u.p[i] * n + rad * np;
    g.second[0] = u.tt[i] * n + 2.0 * u.t[i] * nt + rad * ntt;
    g.second[1] = u.tp[i] * n + u.t[i] * np + u.p[i] * nt + rad * ntp;
    g.second[2] = u.pp[i] * n + 2.0 * u.p[i] * np + rad * npp;

    g.jet = metric_jet(spec, g.position);
    g.conn = connection(g.jet);
    g.curv = curvature_from_jet(g.jet, g.conn);

    const Vec3 cross = g.tangent[0].cross(g.tangent[1]);
    const double cross_norm = cross.norm();
    g.euclid_normal = cross / cross_norm;
    const Vec3 up = g.conn.g_inv * cross;
    g.normal = up / std::sqrt(cross.dot(up));

    g.gamma = detail::symmetric2(g.inner(g.tangent[0], g.tangent[0]), g.inner(g.tangent[0], g.tangent[1]),
                                 g.inner(g.tangent[1], g.tangent[1]));
    g.gamma_inv = g.gamma.inverse();

    std::array<Vec3, 3> cov;  // D_a d_b Phi
    for (int k = 0; k < 3; ++k) {
      const int a = k == 2 ? 1 : 0, bb = k == 0 ? 0 : 1;
      cov[k] = g.second[k] + g.christoffel(g.tangent[a], g.tangent[bb]);
    }
    g.h = -detail::symmetric2(g.inner(g.normal, cov[0]), g.inner(g.normal, cov[1]), g.inner(g.normal, cov[2]));
    for (int cc = 0; cc < 2; ++cc) {
      Eigen::Vector2d lower[3];
      for (int k = 0; k < 3; ++k) lower[k] = {g.inner(g.tangent[0], cov[k]), g.inner(g.tangent[1], cov[k])};
      const Eigen::Vector2d g00 = g.gamma_inv * lower[0], g01 = g.gamma_inv * lower[1],
                            g11 = g.gamma_inv * lower[2];
      g.induced_christoffel[cc] = detail::symmetric2(g00[cc], g01[cc], g11[cc]);
    }
    g.H = (g.gamma_inv.cwiseProduct(g.h)).sum();
    g.hcirc = g.h - 0.5 * g.H * g.gamma;
    const Mat2 mixed = g.gamma_inv * g.hcirc;
    g.hcirc_norm2 = (mixed * mixed).trace();

    const double sqrt_det = std::sqrt(g.gamma.determinant());
    b.dmu[i] = c.unit_weight(i) * sqrt_det / st;
    b.dmu_bar[i] = c.unit_weight(i) * cross_norm / st;
  }
  return b;
}

inline double surface_integral(const GeometryBundle& b, const std::vector<double>& integrand) {
  if (static_cast<int>(integrand.size()) != b.size())
    throw Error(ErrorKind::ChartMismatch, "integrand length differs from bundle node count");
  double sum = 0.0;
  for (int i = 0; i < b.size(); ++i) sum += integrand[i] * b.dmu[i];
  return sum;
}

inline double surface_integral(const GeometryBundle& b, const ScalarField& f) {
  require_same_chart(b.chart(), *f.chart);
  return surface_integral(b, f.values);
}

/// Integral against the Euclidean area element of the same surface.
inline double euclidean_integral(const GeometryBundle& b, const std::vector<double>& integrand) {
  if (static_cast<int>(integrand.size()) != b.size())
    throw Error(ErrorKind::ChartMismatch, "integrand length differs from bundle node count");
  double sum = 0.0;
  for (int i = 0; i < b.size(); ++i) sum += integrand[i] * b.dmu_bar[i];
  return sum;
}

inline double area(const GeometryBundle& b) {
  double s = 0.0;
  for (double w : b.dmu) s += w;
  return s;
}

inline double euclidean_area(const GeometryBundle& b) {
  double s = 0.0;
  for (double w : b.dmu_bar) s += w;
  return s;
}

/// Area of the graph only (no curvature); used inside the area projection.
inline double graph_area(const GraphSurface& s, const MetricSpec& spec) {
  const SphereChart& c = *s.chart;
  const AngularDerivatives u = angular_derivatives(s.u, s.chart);
  double total = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    const Vec3 n = c.direction(i);
    const double rad = c.radius() + u.f[i];
    const Vec3 pos = c.center() + rad * n;
    const Vec3 t0 = u.t[i] * n + rad * c.d_theta_direction(i);
    const Vec3 t1 = u.p[i] * n + rad * c.d_phi_direction(i);
    const Mat3 g = metric_jet(spec, pos).g;
    const double det = t0.dot(g * t0) * t1.dot(g * t1) - std::pow(t0.dot(g * t1), 2);
    total += c.unit_weight(i) * std::sqrt(det) / c.sin_theta(i);
  }
  return total;
}

struct RadiiReport {
  double area_radius = 0.0;            // lambda(Sigma) from the g-area
  double euclidean_area_radius = 0.0;  // from the Euclidean area
  double inner_radius = 0.0;           // rho(Sigma), clamped at 1
};

inline RadiiReport radii(const GeometryBundle& b) {
  RadiiReport r;
  r.area_radius = std::sqrt(area(b) / (4.0 * std::numbers::pi));
  r.euclidean_area_radius = std::sqrt(euclidean_area(b) / (4.0 * std::numbers::pi));
  double rmin = std::numeric_limits<double>::infinity();
  for (const auto& n : b.nodes) rmin = std::min(rmin, n.position.norm());
  r.inner_radius = std::max(1.0, rmin);
  return r;
}

inline RadiiReport radii(const GeometryBundle& b, const GeometryBundle& euclidean) {
  RadiiReport r = radii(b);
  r.euclidean_area_radius = std::sqrt(area(euclidean) / (4.0 * std::numbers::pi));
  return r;
}

/// Laplace-Beltrami of the induced metric: gamma^{ab} (f_ab - Gamma^c_ab f_c).
inline ScalarField surface_laplacian(const GeometryBundle& b, const ScalarField& f) {
  require_same_chart(b.chart(), *f.chart);
  const AngularDerivatives d = angular_derivatives(f);
  return b.map([&](const NodeGeometry& g, int i) {
    const Mat2 hess = detail::symmetric2(d.tt[i], d.tp[i], d.pp[i]) - d.t[i] * g.induced_christoffel[0] -
                      d.p[i] * g.induced_christoffel[1];
    return (g.gamma_inv.cwiseProduct(hess)).sum();
  });
}

/// Surface gradient of f as ambient vectors.
inline std::vector<Vec3> surface_gradient(const GeometryBundle& b, const ScalarField& f) {
  require_same_chart(b.chart(), *f.chart);
  const AngularDerivatives d = angular_derivatives(f);
  std::vector<Vec3> out(b.size());
  for (int i = 0; i < b.size(); ++i) out[i] = b.nodes[i].tangent_vector(d.t[i], d.p[i]);
  return out;
}

struct GaussCodazziReport {
  double max_residual = 0.0;  // max over nodes of |div h - grad H - nu _| Ric|
  double scale = 0.0;         // max over nodes of |grad H| + |nu _| Ric|^T + |div h|
};

/// Residual of the traced Codazzi equation div h = grad H + nu _| Ric.
inline GaussCodazziReport gauss_codazzi_residual(const GeometryBundle& b) {
  const int n = b.size();
  // Ambient contravariant form of h: T^{ij} = h^{ab} d_a Phi^i d_b Phi^j (smooth on the sphere)
  std::array<std::vector<double>, 6> comps;
  const int pairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  std::vector<Mat3> T(n);
  for (int i = 0; i < n; ++i) {
    const auto& g = b.nodes[i];
    const Mat2 hup = g.gamma_inv * g.h * g.gamma_inv;
    Mat3 t = Mat3::Zero();
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) t += hup(a, c) * g.tangent[a] * g.tangent[c].transpose();
    T[i] = t;
  }
  std::array<AngularDerivatives, 6> dT;
  for (int p = 0; p < 6; ++p) {
    ScalarField f(b.surface.chart);
    for (int i = 0; i < n; ++i) f[i] = T[i](pairs[p][0], pairs[p][1]);
    dT[p] = angular_derivatives(f);
  }
  const AngularDerivatives dH = angular_derivatives(b.mean_curvature());

  GaussCodazziReport rep;
  for (int i = 0; i < n; ++i) {
    const auto& g = b.nodes[i];
    std::array<Mat3, 2> DT;  // D_a T
    for (int a = 0; a < 2; ++a) {
      Mat3 dt;
      for (int p = 0; p < 6; ++p) {
        const double v = a == 0 ? dT[p].t[i] : dT[p].p[i];
        dt(pairs[p][0], pairs[p][1]) = v;
        dt(pairs[p][1], pairs[p][0]) = v;
      }
      Mat3 gam_a;  // (Gamma_a)^i_k = Gamma^i_pk d_a Phi^p
      for (int ii = 0; ii < 3; ++ii) gam_a.row(ii) = (g.conn.gamma[ii] * g.tangent[a]).transpose();
      DT[a] = dt + gam_a * T[i] + T[i] * gam_a.transpose();
    }
    Eigen::Vector2d div_h, resid;
    for (int cc = 0; cc < 2; ++cc) {
      const Vec3 lc = g.jet.g * g.tangent[cc];
      double v = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) v += g.gamma_inv(a, bb) * (g.jet.g * g.tangent[bb]).dot(DT[a] * lc);
      div_h[cc] = v;
    }
    const Eigen::Vector2d gradH(dH.t[i], dH.p[i]);
    const Eigen::Vector2d ric(g.normal.dot(g.curv.ricci * g.tangent[0]), g.normal.dot(g.curv.ricci * g.tangent[1]));
    resid = div_h - gradH - ric;
    auto norm = [&](const Eigen::Vector2d& w) { return std::sqrt(w.dot(g.gamma_inv * w)); };
    rep.max_residual = std::max(rep.max_residual, norm(resid));
    rep.scale = std::max(rep.scale, norm(gradH) + norm(ric) + norm(div_h));
  }
  return rep;
}

struct ConformalReport {
  double normal = 0.0;       // max |nu~ - psi^-2 nu-bar|
  double hcirc = 0.0;        // max |hcirc~^a_b - psi^-2 hcirc-bar^a_b| / scale
  double area_element = 0.0; // max |dmu~ / (psi^4 dmu-bar) - 1|
  double mean_curvature = 0.0;  // max |H~ - (psi^-2 H-bar + 4 psi^-3 dpsi(nu-bar))| / scale
};

/// Compares the Schwarzschild geometry of a graph with the conformal
/// transforms of its Euclidean geometry, psi = 1 + m/(2|x|).
inline ConformalReport conformal_relations_check(const GraphSurface& s, double mass = 2.0) {
  const GeometryBundle flat = geometry_bundle(s, MetricSpec::euclidean());
  const GeometryBundle schw = geometry_bundle(s, MetricSpec::schwarzschild(mass));
  ConformalReport rep;
  double hscale = 0.0, Hscale = 0.0;
  for (int i = 0; i < flat.size(); ++i) {
    hscale = std::max(hscale, std::sqrt(std::abs(flat.nodes[i].hcirc_norm2)) + 1e-300);
    Hscale = std::max(Hscale, std::abs(flat.nodes[i].H));
  }
  hscale = std::max(hscale, Hscale);
  for (int i = 0; i < flat.size(); ++i) {
    const auto& e = flat.nodes[i];
    const auto& t = schw.nodes[i];
    const Vec3 x = e.position;
    const double r = x.norm();
    const double psi = 1.0 + 0.5 * mass / r;
    const Vec3 dpsi = -0.5 * mass * x / (r * r * r);
    rep.normal = std::max(rep.normal, (t.normal - e.euclid_normal / (psi * psi)).norm());
    const Mat2 mt = t.gamma_inv * t.hcirc, me = e.gamma_inv * e.hcirc;
    rep.hcirc = std::max(rep.hcirc, (mt - me / (psi * psi)).cwiseAbs().maxCoeff() / hscale);
    rep.area_element =
        std::max(rep.area_element, std::abs(schw.dmu[i] / (std::pow(psi, 4) * flat.dmu_bar[i]) - 1.0));
    const double predicted = e.H / (psi * psi) + 4.0 * dpsi.dot(e.euclid_normal) / std::pow(psi, 3);
    rep.mean_curvature = std::max(rep.mean_curvature, std::abs(t.H - predicted) / Hscale);
  }
  return rep;
}

// --- serialization -------------------------------------------------------

inline nlohmann::json coefficients_to_json(const HarmonicCoeffs& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (int l = 0; l <= a.band_limit; ++l)
    for (int m = -l; m <= l; ++m)
      if (a(l, m) != 0.0) rows.push_back({l, m, a(l, m)});
  return {{"band_limit", a.band_limit}, {"convention", "orthonormal-real"}, {"coefficients", rows}};
}

inline HarmonicCoeffs coefficients_from_json(const nlohmann::json& j) {
  HarmonicCoeffs a(j.at("band_limit").get<int>());
  for (const auto& row : j.at("coefficients")) {
    const int l = row.at(0).get<int>(), m = row.at(1).get<int>();
    if (l > a.band_limit || std::abs(m) > l) throw Error(ErrorKind::ConfigError, "coefficient index out of range");
    a(l, m) = row.at(2).get<double>();
  }
  return a;
}

inline nlohmann::json surface_to_json(const GraphSurface& s) {
  const auto& c = *s.chart;
  return {{"chart",
           {{"offset", {c.offset()[0], c.offset()[1], c.offset()[2]}},
            {"radius", c.radius()},
            {"band_limit", c.band_limit()},
            {"n_phi", c.n_phi()}}},
          {"u", coefficients_to_json(s.u)}};
}

inline GraphSurface surface_from_json(const nlohmann::json& j) {
  const auto& cj = j.at("chart");
  const auto off = cj.at("offset").get<std::vector<double>>();
  if (off.size() != 3) throw Error(ErrorKind::ConfigError, "chart offset must have three components");
  auto chart = SphereChart::build(Vec3(off[0], off[1], off[2]), cj.at("radius").get<double>(),
                                  cj.at("band_limit").get<int>(), cj.value("n_phi", 0));
  return GraphSurface(chart, coefficients_from_json(j.at("u")));
}

/// Writes node, theta, phi, H, |hcirc|^2 and dmu as CSV.
inline void write_bundle_csv(const GeometryBundle& b, const std::string& path) {
  std::ofstream out(path);
  out << "node,theta,phi,H,hcirc_norm2,dmu\n";
  char buf[256];
  for (int i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, b.chart().theta(i),
                  b.chart().phi(i), b.nodes[i].H, b.nodes[i].hcirc_norm2, b.dmu[i]);
    out << buf;
  }
}

}  // namespace willmore
