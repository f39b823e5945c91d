/// \file quadrature.hpp
/// \brief Graded product rule on S_lambda(lambda xi) for explicit integrands
/// that are nearly singular at the origin.
///
/// The chart grid resolves |x|^{-k} only while the origin stays well away
/// from the sphere. This rule uses polar coordinates about the point p of the
/// sphere closest to the origin and the stereographic radius t = tan(alpha/2):
/// the cap t <= 1 is integrated in tau with t = delta sinh(tau), the far cap in
/// s = 1/t, Gauss-Legendre in both, trapezoid in longitude.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "willmore/error.hpp"
#include "willmore/legendre.hpp"

namespace willmore {

struct QuadratureNode {
  Eigen::Vector3d x;       // point on S_lambda(lambda xi)
  Eigen::Vector3d normal;  // outward Euclidean unit normal
  double weight = 0.0;     // Euclidean area weight
};

/// About 2(L+1)^2 nodes, comparable to the chart of band limit L.
inline std::vector<QuadratureNode> graded_sphere_rule(const Eigen::Vector3d& xi, double lambda, int L) {
  using Vec = Eigen::Vector3d;
  if (L < 4) throw Error(ErrorKind::InvalidBandLimit, "graded rule needs L >= 4");
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidDomain, "radius must be positive");
  const double d = xi.norm();
  if (std::abs(d - 1.0) < 1e-14) throw Error(ErrorKind::PointAtOrigin, "sphere passes through the origin");

  // frame with e3 = direction from the centre to p
  const Vec e3 = d > 0.0 ? Vec(-xi / d) : Vec(0.0, 0.0, -1.0);
  const Vec helper = std::abs(e3[0]) < 0.9 ? Vec(1.0, 0.0, 0.0) : Vec(0.0, 1.0, 0.0);
  const Vec e1 = helper.cross(e3).normalized();
  const Vec e2 = e3.cross(e1);

  // poles of the integrand in t sit near +-i delta
  const double delta = d > 0.0 ? std::abs(1.0 - d) / (2.0 * std::sqrt(d)) : 1.0;
  const double tau_max = std::asinh(1.0 / delta);
  const int n_near = (L + 2) / 2, n_far = L + 1 - n_near, n_phi = 2 * L + 2;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  const Vec centre = lambda * xi;

  std::vector<QuadratureNode> rule;
  rule.reserve(static_cast<size_t>(n_phi) * (L + 1));
  // wt: Gauss weight times d(area on the unit sphere)/dt, before the longitude sum
  auto add_ring = [&](double t, double wt) {
    const double ca = (1.0 - t * t) / (1.0 + t * t), sa = 2.0 * t / (1.0 + t * t);
    for (int k = 0; k < n_phi; ++k) {
      const double ph = k * dphi;
      const Vec n = ca * e3 + sa * (std::cos(ph) * e1 + std::sin(ph) * e2);
      rule.push_back({centre + lambda * n, n, lambda * lambda * wt * dphi});
    }
  };
  const auto [xn, wn] = legendre::gauss_legendre(n_near);
  for (int j = 0; j < n_near; ++j) {
    const double tau = 0.5 * tau_max * (xn[j] + 1.0), w = 0.5 * tau_max * wn[j];
    const double t = delta * std::sinh(tau);
    add_ring(t, w * delta * std::cosh(tau) * 4.0 * t / std::pow(1.0 + t * t, 2));
  }
  const auto [xf, wf] = legendre::gauss_legendre(n_far);
  for (int j = 0; j < n_far; ++j) {
    const double s = 0.5 * (xf[j] + 1.0), w = 0.5 * wf[j];
    add_ring(1.0 / s, w * 4.0 * s / std::pow(s * s + 1.0, 2));
  }
  return rule;
}

template <typename F>
double integrate(const std::vector<QuadratureNode>& rule, F&& f) {
  double sum = 0.0;
  for (const auto& q : rule) sum += q.weight * f(q.x, q.normal);
  return sum;
}

}  // namespace willmore
