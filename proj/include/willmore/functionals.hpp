/// \file functionals.hpp
/// \brief Willmore energy, Hawking mass, the area-constrained Willmore
/// operator and translation variations of graph surfaces.
#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include <json.hpp>

#include "willmore/error.hpp"
#include "willmore/surface.hpp"

namespace willmore {

inline double willmore_energy(const GeometryBundle& b) {
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += b.nodes[i].H * b.nodes[i].H * b.dmu[i];
  return s;
}

/// m_H = sqrt(|Sigma| / 16 pi) (1 - (16 pi)^{-1} int H^2).
inline double hawking_mass(const GeometryBundle& b) {
  const double sixteen_pi = 16.0 * std::numbers::pi;
  return std::sqrt(area(b) / sixteen_pi) * (1.0 - willmore_energy(b) / sixteen_pi);
}

/// Delta H + (|hcirc|^2 + Ric(nu, nu)) H, the operator without the multiplier.
inline ScalarField willmore_gradient(const GeometryBundle& b) {
  const ScalarField H = b.mean_curvature();
  ScalarField w = surface_laplacian(b, H);
  for (int i = 0; i < b.size(); ++i) {
    const auto& g = b.nodes[i];
    w[i] += (g.hcirc_norm2 + g.normal.dot(g.curv.ricci * g.normal)) * g.H;
  }
  return w;
}

/// W = Delta H + (|hcirc|^2 + Ric(nu, nu) + kappa) H.
inline ScalarField acw_operator(const GeometryBundle& b, double kappa) {
  ScalarField w = willmore_gradient(b);
  for (int i = 0; i < b.size(); ++i) w[i] += kappa * b.nodes[i].H;
  return w;
}

/// kappa making W L^2(dmu)-orthogonal to H.
inline double lagrange_estimate(const GeometryBundle& b) {
  const ScalarField w0 = willmore_gradient(b);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    num += b.nodes[i].H * w0[i] * b.dmu[i];
    den += b.nodes[i].H * b.nodes[i].H * b.dmu[i];
  }
  if (!(den > 1e-300)) throw Error(ErrorKind::DegenerateMeanCurvature, "int H^2 dmu vanishes");
  return -num / den;
}

struct WillmoreReport {
  double willmore_energy = 0.0;
  double hawking_mass = 0.0;
  double kappa = 0.0;
  double area = 0.0;
  double residual_l2 = 0.0;   // (int W^2 dmu)^{1/2}
  double residual_max = 0.0;  // max |W|
  double mean_H = 0.0;        // proj onto constants of H over the chart sphere
  double perp_H_l2 = 0.0;     // L^2(dmu-bar of chart) norm of the mean-free part

  friend void to_json(nlohmann::json& j, const WillmoreReport& r) {
    j = {{"willmore_energy", r.willmore_energy}, {"hawking_mass", r.hawking_mass},
         {"kappa", r.kappa},                     {"area", r.area},
         {"residual_l2", r.residual_l2},         {"residual_max", r.residual_max},
         {"mean_H", r.mean_H},                   {"perp_H_l2", r.perp_H_l2}};
  }
};

inline WillmoreReport willmore_report(const GeometryBundle& b, std::optional<double> kappa = std::nullopt) {
  WillmoreReport r;
  r.kappa = kappa ? *kappa : lagrange_estimate(b);
  r.willmore_energy = willmore_energy(b);
  r.area = area(b);
  r.hawking_mass = hawking_mass(b);
  const ScalarField w = acw_operator(b, r.kappa);
  double l2 = 0.0;
  for (int i = 0; i < b.size(); ++i) l2 += w[i] * w[i] * b.dmu[i];
  r.residual_l2 = std::sqrt(l2);
  r.residual_max = w.max_abs();
  const MeanProjection p = project_mean(b.mean_curvature());
  r.mean_H = p.mean;
  double perp = 0.0;
  for (int i = 0; i < b.size(); ++i) perp += p.perp[i] * p.perp[i] * b.chart().weight(i);
  r.perp_H_l2 = std::sqrt(perp);
  return r;
}

/// -int g(a, nu) W dmu for a constant vector a.
inline double translation_variation(const GeometryBundle& b, const Vec3& a,
                                    std::optional<double> kappa = std::nullopt) {
  const double k = kappa ? *kappa : lagrange_estimate(b);
  const ScalarField w = acw_operator(b, k);
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += b.nodes[i].inner(a, b.nodes[i].normal) * w[i] * b.dmu[i];
  return -s;
}

/// Splitting of int g(a, nu) W dmu into the four integrals of the
/// integration-by-parts identity for a constant vector a:
///   total = term1 + term2 + term3 + term4 with
///   term1 = int [g(tr_Sigma D^2 a, nu) + Ric(a, nu)] H,
///   term2 = 1/2 int [div_Sigma a - 2 g(D_nu a, nu)] H^2,
///   term3 = 2 int g(zeta, hcirc) H,  zeta(X, Y) = g(D_X a, Y),
///   term4 = kappa int g(a, nu) H.
struct FluxReport {
  Vec3 direction = Vec3::Zero();
  double kappa = 0.0;
  double total = 0.0;                  // int g(a, nu) W dmu
  double translation_variation = 0.0;  // -total
  double term1 = 0.0, term2 = 0.0, term3 = 0.0, term4 = 0.0;
  double defect = 0.0;
  /// sum |term_i| + int |g(a, nu)| (|Delta H| + |(|hcirc|^2 + Ric(nu, nu) + kappa) H|) dmu;
  /// the second part keeps the ratio meaningful when every term is small (flat case).
  double scale = 0.0;

  double relative_defect() const { return scale > 0.0 ? defect / scale : defect; }

  friend void to_json(nlohmann::json& j, const FluxReport& r) {
    j = {{"direction", {r.direction[0], r.direction[1], r.direction[2]}},
         {"kappa", r.kappa},
         {"total", r.total},
         {"translation_variation", r.translation_variation},
         {"term1", r.term1},
         {"term2", r.term2},
         {"term3", r.term3},
         {"term4", r.term4},
         {"defect", r.defect},
         {"scale", r.scale},
         {"relative_defect", r.relative_defect()}};
  }
};

namespace detail {

/// (D_X a)^k = Gamma^k_ij X^i a^j for constant a.
inline Vec3 covariant_of_constant(const NodeGeometry& g, const Vec3& X, const Vec3& a) {
  return g.christoffel(X, a);
}

/// (D^2 a)(X, Y)^k for constant a:
/// d_i Gamma^k_jl a^l + Gamma^k_im Gamma^m_jl a^l - Gamma^m_ij Gamma^k_ml a^l.
inline Vec3 second_covariant_of_constant(const NodeGeometry& g, const Vec3& X, const Vec3& Y, const Vec3& a) {
  Vec3 out = Vec3::Zero();
  const Vec3 DYa = g.christoffel(Y, a);   // Gamma^m_jl Y^j a^l
  const Vec3 DXY = g.christoffel(X, Y);   // Gamma^m_ij X^i Y^j
  for (int k = 0; k < 3; ++k) {
    double v = 0.0;
    for (int i = 0; i < 3; ++i) v += X[i] * Y.dot(g.conn.dgamma[i][k] * a);
    v += X.dot(g.conn.gamma[k] * DYa);
    v -= DXY.dot(g.conn.gamma[k] * a);
    out[k] = v;
  }
  return out;
}

}  // namespace detail

inline FluxReport translation_variation_decomposed(const GeometryBundle& b, const Vec3& a,
                                                   std::optional<double> kappa = std::nullopt) {
  FluxReport r;
  r.direction = a;
  r.kappa = kappa ? *kappa : lagrange_estimate(b);
  const ScalarField lapH = surface_laplacian(b, b.mean_curvature());
  double operator_size = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    const auto& g = b.nodes[i];
    const double mu = b.dmu[i];
    const double a_nu = g.inner(a, g.normal);
    const double zeroth = (g.hcirc_norm2 + g.normal.dot(g.curv.ricci * g.normal) + r.kappa) * g.H;
    r.total += a_nu * (lapH[i] + zeroth) * mu;
    operator_size += std::abs(a_nu) * (std::abs(lapH[i]) + std::abs(zeroth)) * mu;

    Vec3 trD2 = Vec3::Zero();
    double div_a = 0.0;
    Mat2 zeta;
    std::array<Vec3, 2> Da;
    for (int p = 0; p < 2; ++p) Da[p] = detail::covariant_of_constant(g, g.tangent[p], a);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        trD2 += g.gamma_inv(p, q) * detail::second_covariant_of_constant(g, g.tangent[p], g.tangent[q], a);
        zeta(p, q) = g.inner(Da[p], g.tangent[q]);
        div_a += g.gamma_inv(p, q) * zeta(p, q);
      }
    const double Dnu = g.inner(detail::covariant_of_constant(g, g.normal, a), g.normal);
    const double ric_a_nu = a.dot(g.curv.ricci * g.normal);
    const Mat2 zeta_up = g.gamma_inv * zeta * g.gamma_inv;
    const double zeta_hcirc = zeta_up.cwiseProduct(g.hcirc).sum();

    r.term1 += (g.inner(trD2, g.normal) + ric_a_nu) * g.H * mu;
    r.term2 += 0.5 * (div_a - 2.0 * Dnu) * g.H * g.H * mu;
    r.term3 += 2.0 * zeta_hcirc * g.H * mu;
    r.term4 += r.kappa * a_nu * g.H * mu;
  }
  r.translation_variation = -r.total;
  r.defect = std::abs(r.total - (r.term1 + r.term2 + r.term3 + r.term4));
  r.scale = std::abs(r.term1) + std::abs(r.term2) + std::abs(r.term3) + std::abs(r.term4) + operator_size;
  return r;
}

/// int gbar(a, nu-bar) d(mu-bar): vanishes on every closed surface.
inline double euclidean_normal_flux(const GeometryBundle& b, const Vec3& a) {
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += a.dot(b.nodes[i].euclid_normal) * b.dmu_bar[i];
  return s;
}

/// int [|x|^{-3} gbar(a, nu-bar) - 3 |x|^{-5} gbar(x, a) gbar(x, nu-bar)] d(mu-bar): the flux
/// of a divergence-free dipole field, zero whether or not the surface encloses the origin.
inline double dipole_kernel_flux(const GeometryBundle& b, const Vec3& a) {
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    const Vec3& x = b.nodes[i].position;
    const Vec3& nu = b.nodes[i].euclid_normal;
    const double r = x.norm();
    s += (a.dot(nu) / std::pow(r, 3) - 3.0 * x.dot(a) * x.dot(nu) / std::pow(r, 5)) * b.dmu_bar[i];
  }
  return s;
}

struct NewtonianFlux {
  double value = 0.0;
  bool encloses_origin = false;
};

/// int |x|^{-3} gbar(x, nu-bar) d(mu-bar): 4 pi when the surface encloses the origin, else 0.
inline NewtonianFlux newtonian_flux(const GeometryBundle& b) {
  NewtonianFlux f;
  for (int i = 0; i < b.size(); ++i) {
    const Vec3& x = b.nodes[i].position;
    f.value += x.dot(b.nodes[i].euclid_normal) / std::pow(x.norm(), 3) * b.dmu_bar[i];
  }
  const double four_pi = 4.0 * std::numbers::pi;
  const double tol = 0.1 * four_pi;
  if (std::abs(f.value - four_pi) <= tol) {
    f.encloses_origin = true;
  } else if (std::abs(f.value) > tol) {
    throw Error(ErrorKind::AmbiguousFlux, "Newtonian flux " + std::to_string(f.value) + " is neither 0 nor 4 pi");
  }
  return f;
}

struct PotentialQuotientReport {
  double kappa = 0.0;
  double residual = 0.0;  // max |Delta F + c F + 2 N^{-1} g(grad F, grad N)|
  double defect = 0.0;    // same with the operator term N^{-1} W subtracted
  double scale = 0.0;     // max |Delta F| + max |c F| + max |2 N^{-1} g(grad F, grad N)|
};

/// Checks the equation satisfied by F = H / N, N the static potential of the
/// Schwarzschild background with the same mass:
///   Delta F + (|hcirc|^2 + kappa + Ric(nu,nu) - Ric~(nu~,nu~) + N^{-1} Delta N
///              - N^{-1} Delta~ N - N^{-1} g~(nu~, D~N) H~) F + 2 N^{-1} g(grad F, grad N) = N^{-1} W.
/// On area-constrained Willmore surfaces W = 0 and `residual` vanishes;
/// `defect` vanishes on every surface.
inline PotentialQuotientReport potential_quotient_residual(const GeometryBundle& b,
                                                           std::optional<double> kappa = std::nullopt) {
  PotentialQuotientReport rep;
  rep.kappa = kappa ? *kappa : lagrange_estimate(b);
  const double m = b.spec.background_mass();
  const MetricSpec tilde_spec = m > 0.0 ? MetricSpec::schwarzschild(m) : MetricSpec::euclidean();
  const bool same = b.spec.kind != MetricKind::Perturbed;
  const GeometryBundle tilde_owned = same ? GeometryBundle{} : geometry_bundle(b.surface, tilde_spec);
  const GeometryBundle& tilde = same ? b : tilde_owned;

  std::vector<PotentialJet> pot(b.size());
  ScalarField N(b.surface.chart), F(b.surface.chart);
  for (int i = 0; i < b.size(); ++i) {
    if (m > 0.0) {
      pot[i] = potential_jet(b.nodes[i].position, m);
    } else {
      pot[i] = PotentialJet{};
    }
    N[i] = pot[i].N;
    F[i] = b.nodes[i].H / N[i];
  }
  const ScalarField lapF = surface_laplacian(b, F);
  const ScalarField lapN = surface_laplacian(b, N);
  const ScalarField lapN_tilde = surface_laplacian(tilde, N);
  const AngularDerivatives dF = angular_derivatives(F), dN = angular_derivatives(N);
  const ScalarField w = acw_operator(b, rep.kappa);

  double max_lap = 0.0, max_c = 0.0, max_grad = 0.0;
  for (int i = 0; i < b.size(); ++i) {
    const auto& g = b.nodes[i];
    const auto& t = tilde.nodes[i];
    const double ric = g.normal.dot(g.curv.ricci * g.normal);
    const double ric_t = t.normal.dot(t.curv.ricci * t.normal);
    const double dn_nu = pot[i].DN.dot(t.normal);
    const double c = g.hcirc_norm2 + rep.kappa + ric - ric_t + (lapN[i] - lapN_tilde[i]) / N[i] - dn_nu * t.H / N[i];
    const Eigen::Vector2d gF(dF.t[i], dF.p[i]), gN(dN.t[i], dN.p[i]);
    const double cross = 2.0 / N[i] * gF.dot(g.gamma_inv * gN);
    const double lhs = lapF[i] + c * F[i] + cross;
    rep.residual = std::max(rep.residual, std::abs(lhs));
    rep.defect = std::max(rep.defect, std::abs(lhs - w[i] / N[i]));
    max_lap = std::max(max_lap, std::abs(lapF[i]));
    max_c = std::max(max_c, std::abs(c * F[i]));
    max_grad = std::max(max_grad, std::abs(cross));
  }
  rep.scale = max_lap + max_c + max_grad;
  return rep;
}

}  // namespace willmore
