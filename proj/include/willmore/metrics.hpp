/// \file metrics.hpp
/// \brief Ambient metrics g = (1 + m/(2|x|))^4 gbar + sigma on R^3 \ {0}.
///
/// Three kinds are supported: the Euclidean metric, exact Schwarzschild in
/// isotropic coordinates, and Schwarzschild plus a diagonal analytic
/// perturbation sigma_ij = A chi(|x|) Y(x/|x|) |x|^{-p} delta_ij. Every kind
/// exposes its pointwise 2-jet, from which all curvature is computed through
/// one generic code path.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "willmore/error.hpp"
#include "willmore/jet.hpp"
#include "willmore/legendre.hpp"

namespace willmore {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class MetricKind { Euclidean, Schwarzschild, Perturbed };

inline std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::Schwarzschild: return "schwarzschild";
    case MetricKind::Perturbed: return "perturbed";
  }
  return "unknown";
}

/// One term c * Y_lm of the angular profile.
struct HarmonicTerm {
  int l = 0;
  int m = 0;
  double coefficient = 0.0;
};

struct PerturbationFamily {
  double amplitude = 0.0;
  std::vector<HarmonicTerm> profile;
  double cutoff_radius = 2.0;   // chi = 0 for |x| <= r_c, 1 for |x| >= 2 r_c
  double decay_exponent = 2.0;  // p
};

struct MetricSpec {
  MetricKind kind = MetricKind::Euclidean;
  double mass = 2.0;
  PerturbationFamily perturbation;

  static MetricSpec euclidean() { return {}; }
  static MetricSpec schwarzschild(double m = 2.0) {
    MetricSpec s;
    s.kind = MetricKind::Schwarzschild;
    s.mass = m;
    return s;
  }
  static MetricSpec perturbed(double m, PerturbationFamily family) {
    MetricSpec s;
    s.kind = MetricKind::Perturbed;
    s.mass = m;
    s.perturbation = std::move(family);
    return s;
  }

  /// Mass of the Schwarzschild background (0 for the Euclidean kind).
  double background_mass() const { return kind == MetricKind::Euclidean ? 0.0 : mass; }

  void validate() const {
    if (kind == MetricKind::Euclidean) return;
    if (!(mass > 0.0)) throw Error(ErrorKind::InvalidMetric, "mass must be positive");
    if (kind == MetricKind::Perturbed) {
      const auto& p = perturbation;
      if (!(p.cutoff_radius >= 2.0))
        throw Error(ErrorKind::InvalidMetric, "perturbation cutoff radius must be >= 2");
      if (!(p.decay_exponent >= 2.0))
        throw Error(ErrorKind::InvalidMetric, "perturbation decay exponent must be >= 2");
      for (const auto& t : p.profile)
        if (t.l < 0 || std::abs(t.m) > t.l)
          throw Error(ErrorKind::InvalidMetric, "invalid harmonic (l, m) in perturbation profile");
    }
  }
};

/// Metric and its coordinate derivatives at a point.
/// dg[k](i,j) = d_k g_ij and d2g[k][l](i,j) = d_k d_l g_ij.
struct MetricJet {
  Vec3 point = Vec3::Zero();
  Mat3 g = Mat3::Identity();
  std::array<Mat3, 3> dg{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  std::array<std::array<Mat3, 3>, 3> d2g{};
};

/// gamma[k](i,j) = Gamma^k_ij and dgamma[m][k](i,j) = d_m Gamma^k_ij.
struct Connection {
  Mat3 g_inv = Mat3::Identity();
  std::array<Mat3, 3> gamma{};
  std::array<std::array<Mat3, 3>, 3> dgamma{};
};

struct CurvatureData {
  Vec3 point = Vec3::Zero();
  std::array<Mat3, 3> christoffel{};
  Mat3 ricci = Mat3::Zero();
  double scalar = 0.0;
};

struct PotentialJet {
  double N = 1.0;
  Vec3 DN = Vec3::Zero();
  Mat3 D2N = Mat3::Zero();  // covariant Hessian with respect to the Schwarzschild metric
};

namespace detail {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline Jet2 smooth_step(const Jet2& t) {
  if (t.v <= 0.0) return Jet2(0.0);
  if (t.v >= 1.0) return Jet2(1.0);
  const Jet2 a = exp(-reciprocal(t));
  const Jet2 b = exp(-reciprocal(Jet2(1.0) - t));
  return a / (a + b);
}

/// Scalar amplitude s(x) of sigma_ij = s(x) delta_ij, with exact 2-jet.
inline Jet2 perturbation_scalar(const PerturbationFamily& p, const Vec3& x) {
  const Jet2 X = Jet2::coordinate(x, 0), Y = Jet2::coordinate(x, 1), Z = Jet2::coordinate(x, 2);
  const Jet2 r = sqrt(X * X + Y * Y + Z * Z);
  if (r.v <= p.cutoff_radius) return Jet2(0.0);
  const Jet2 chi = smooth_step((r - Jet2(p.cutoff_radius)) / Jet2(p.cutoff_radius));
  Jet2 angular(0.0);
  for (const auto& term : p.profile)
    angular += term.coefficient * legendre::real_harmonic(term.l, term.m, X, Y, Z);
  return p.amplitude * chi * angular * pow(r, -p.decay_exponent);
}

inline Mat3 symmetrize(const Mat3& a) { return 0.5 * (a + a.transpose()); }

}  // namespace detail

inline MetricJet metric_jet(const MetricSpec& spec, const Vec3& x) {
  MetricJet jet;
  jet.point = x;
  for (auto& row : jet.d2g)
    for (auto& m : row) m.setZero();
  if (spec.kind == MetricKind::Euclidean) return jet;

  const double r = x.norm();
  if (!(r > 0.0)) throw Error(ErrorKind::PointAtOrigin, "metric evaluated at |x| = 0");
  const double m = spec.mass;
  // psi = 1 + m/(2r), conformal factor phi = psi^4
  const double psi = 1.0 + 0.5 * m / r;
  const Vec3 dpsi = -0.5 * m * x / (r * r * r);
  const Mat3 d2psi = -0.5 * m * (Mat3::Identity() / (r * r * r) - 3.0 * x * x.transpose() / std::pow(r, 5));
  double phi = std::pow(psi, 4);
  Vec3 dphi = 4.0 * std::pow(psi, 3) * dpsi;
  Mat3 d2phi = 12.0 * psi * psi * dpsi * dpsi.transpose() + 4.0 * std::pow(psi, 3) * d2psi;

  if (spec.kind == MetricKind::Perturbed) {
    const Jet2 s = detail::perturbation_scalar(spec.perturbation, x);
    phi += s.v;
    dphi += s.d;
    d2phi += s.h;
  }
  d2phi = detail::symmetrize(d2phi);
  jet.g = phi * Mat3::Identity();
  for (int k = 0; k < 3; ++k) {
    jet.dg[k] = dphi[k] * Mat3::Identity();
    for (int l = 0; l < 3; ++l) jet.d2g[k][l] = d2phi(k, l) * Mat3::Identity();
  }
  return jet;
}

/// Levi-Civita connection of the jet and its first derivatives.
inline Connection connection(const MetricJet& jet) {
  Connection c;
  c.g_inv = jet.g.inverse();
  // first-kind symbols G_lij = 1/2 (d_i g_jl + d_j g_il - d_l g_ij) and derivatives
  std::array<Mat3, 3> first{};
  std::array<std::array<Mat3, 3>, 3> dfirst{};  // dfirst[m][l](i,j)
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        first[l](i, j) = 0.5 * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
        for (int m = 0; m < 3; ++m)
          dfirst[m][l](i, j) =
              0.5 * (jet.d2g[m][i](j, l) + jet.d2g[m][j](i, l) - jet.d2g[m][l](i, j));
      }
  std::array<Mat3, 3> dginv{};
  for (int m = 0; m < 3; ++m) dginv[m] = -c.g_inv * jet.dg[m] * c.g_inv;
  for (int k = 0; k < 3; ++k) {
    c.gamma[k].setZero();
    for (int l = 0; l < 3; ++l) c.gamma[k] += c.g_inv(k, l) * first[l];
  }
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) {
      c.dgamma[m][k].setZero();
      for (int l = 0; l < 3; ++l)
        c.dgamma[m][k] += dginv[m](k, l) * first[l] + c.g_inv(k, l) * dfirst[m][l];
    }
  return c;
}

inline CurvatureData curvature_from_jet(const MetricJet& jet, const Connection& c) {
  CurvatureData out;
  out.point = jet.point;
  out.christoffel = c.gamma;
  // R_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik
  Mat3 ric = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) {
        v += c.dgamma[k][k](i, j) - c.dgamma[j][k](i, k);
        for (int l = 0; l < 3; ++l)
          v += c.gamma[k](k, l) * c.gamma[l](i, j) - c.gamma[k](j, l) * c.gamma[l](i, k);
      }
      ric(i, j) = v;
    }
  out.ricci = detail::symmetrize(ric);
  out.scalar = (c.g_inv.cwiseProduct(out.ricci)).sum();
  return out;
}

inline CurvatureData curvature(const MetricSpec& spec, const Vec3& x) {
  const MetricJet jet = metric_jet(spec, x);
  return curvature_from_jet(jet, connection(jet));
}

/// Static potential N = (1 - m/(2r)) / (1 + m/(2r)) of Schwarzschild with
/// mass m, its gradient and its Hessian with respect to the Schwarzschild metric.
inline PotentialJet potential_jet(const Vec3& x, double mass = 2.0) {
  const double r = x.norm();
  if (!(r > 0.0)) throw Error(ErrorKind::PointAtOrigin, "potential evaluated at |x| = 0");
  const Jet2 X = Jet2::coordinate(x, 0), Y = Jet2::coordinate(x, 1), Z = Jet2::coordinate(x, 2);
  const Jet2 q = 0.5 * mass * reciprocal(sqrt(X * X + Y * Y + Z * Z));
  const Jet2 n = (Jet2(1.0) - q) / (Jet2(1.0) + q);
  PotentialJet p;
  p.N = n.v;
  p.DN = n.d;
  const Connection c = connection(metric_jet(MetricSpec::schwarzschild(mass), x));
  p.D2N = n.h;
  for (int k = 0; k < 3; ++k) p.D2N -= c.gamma[k] * n.d[k];
  return p;
}

// --- serialization -------------------------------------------------------

inline void to_json(nlohmann::json& j, const MetricSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}};
  if (s.kind != MetricKind::Euclidean) j["mass"] = s.mass;
  if (s.kind == MetricKind::Perturbed) {
    nlohmann::json prof = nlohmann::json::array();
    for (const auto& t : s.perturbation.profile) prof.push_back({t.l, t.m, t.coefficient});
    j["perturbation"] = {{"amplitude", s.perturbation.amplitude},
                         {"profile", prof},
                         {"cutoff_radius", s.perturbation.cutoff_radius},
                         {"decay_exponent", s.perturbation.decay_exponent}};
  }
}

inline void from_json(const nlohmann::json& j, MetricSpec& s) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") {
    s = MetricSpec::euclidean();
  } else if (kind == "schwarzschild") {
    s = MetricSpec::schwarzschild(j.value("mass", 2.0));
  } else if (kind == "perturbed") {
    PerturbationFamily p;
    const auto& pj = j.at("perturbation");
    p.amplitude = pj.at("amplitude").get<double>();
    p.cutoff_radius = pj.value("cutoff_radius", 2.0);
    p.decay_exponent = pj.value("decay_exponent", 2.0);
    for (const auto& t : pj.at("profile")) {
      if (!t.is_array() || t.size() != 3)
        throw Error(ErrorKind::ConfigError, "profile entries must be [l, m, coefficient]");
      p.profile.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
    }
    s = MetricSpec::perturbed(j.value("mass", 2.0), std::move(p));
  } else {
    throw Error(ErrorKind::ConfigError, "unknown metric kind '" + kind + "'");
  }
  s.validate();
}

}  // namespace willmore
