/// \file oracles.hpp
/// \brief Closed-form values on round spheres, used as ground truth.
///
/// Nothing here touches the spectral grid: each value is an explicit
/// formula, so quadrature and closed form can check each other.
#pragma once

#include <cmath>
#include <numbers>

#include "willmore/error.hpp"

namespace willmore::oracles {

inline constexpr double pi = std::numbers::pi;

/// int over S_lambda(lambda xi) of |x|^{-k} d(mu-bar), k = 1..6, |xi| = d.
inline double sphere_moment(int k, double d, double lambda = 1.0) {
  if (k < 1 || k > 6) throw Error(ErrorKind::InvalidDomain, "moment exponent must be in 1..6");
  if (!(d >= 0.0) || d == 1.0) throw Error(ErrorKind::InvalidDomain, "offset magnitude must be >= 0 and != 1");
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidDomain, "radius must be positive");
  const double d2 = d * d;
  double v = 0.0;
  switch (k) {
    case 1: v = d < 1.0 ? 4.0 * pi : 4.0 * pi / d; break;
    case 3: v = d < 1.0 ? 4.0 * pi / (1.0 - d2) : 4.0 * pi / (d * (d2 - 1.0)); break;
    case 5:
      v = d < 1.0 ? 4.0 * pi / 3.0 * (3.0 + d2) / std::pow(1.0 - d2, 3)
                  : 4.0 * pi / 3.0 / d * (1.0 + 3.0 * d2) / std::pow(d2 - 1.0, 3);
      break;
    case 2:
      if (d < 1e-3) {
        // (1/d) log((1+d)/(1-d)) = 2 (1 + d^2/3 + d^4/5 + d^6/7 + ...)
        v = 4.0 * pi * (1.0 + d2 / 3.0 + d2 * d2 / 5.0 + d2 * d2 * d2 / 7.0);
      } else {
        v = 2.0 * pi / d * std::log((1.0 + d) / std::abs(1.0 - d));
      }
      break;
    case 4: v = 4.0 * pi / std::pow(1.0 - d2, 2); break;
    case 6: v = 4.0 * pi * (1.0 + d2) / std::pow(1.0 - d2, 4); break;
  }
  return std::pow(lambda, 2 - k) * v;
}

struct InnerProducts {
  double x_nu = 0.0;   // gbar(x, nu-bar)
  double x_xi = 0.0;   // gbar(x, xi)
  double xi_nu = 0.0;  // gbar(xi, nu-bar)
};

/// Inner products at a point of S_1(xi), given |x|^2 and |xi|^2.
inline InnerProducts inner_product_values(double x_norm2, double xi_norm2) {
  return {0.5 * (x_norm2 + 1.0 - xi_norm2), 0.5 * (x_norm2 + xi_norm2 - 1.0),
          0.5 * (x_norm2 - 1.0 - xi_norm2)};
}

struct RoundSphere {
  double mean_curvature = 0.0;
  double area = 0.0;
  double hawking_mass = 0.0;
  double kappa = 0.0;
};

/// Centred coordinate sphere |x| = r in Schwarzschild of mass m.
/// With psi = 1 + m/(2r): H = 2(1 - m/(2r)) / (r psi^3), area = 4 pi r^2 psi^4,
/// m_H = m, and kappa = -Ric(nu, nu) = 2 m r^{-3} psi^{-6}.
inline RoundSphere schwarzschild_round_sphere(double m, double r) {
  if (!(r > 0.5 * m)) throw Error(ErrorKind::InvalidDomain, "need r > m/2");
  const double psi = 1.0 + 0.5 * m / r;
  RoundSphere s;
  s.mean_curvature = 2.0 * (1.0 - 0.5 * m / r) / (r * std::pow(psi, 3));
  s.area = 4.0 * pi * r * r * std::pow(psi, 4);
  s.hawking_mass = m;
  s.kappa = 2.0 * m / (r * r * r * std::pow(psi, 6));
  return s;
}

/// Schwarzschild Ricci tensor closed form Ric~_ij = m psi^{-2} r^{-3} (delta_ij - 3 x_i x_j / r^2).
inline double schwarzschild_ricci(double m, const double x[3], int i, int j) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  const double psi = 1.0 + 0.5 * m / r;
  return m / (psi * psi * r * r * r) * ((i == j ? 1.0 : 0.0) - 3.0 * x[i] * x[j] / (r * r));
}

struct Radial4 {
  double exact = 0.0;      // I
  double predicted = 0.0;  // pi lambda^{-2} (1 - |xi|)^{-2}
  double ratio = 0.0;      // I (1 - |xi|)^2 lambda^2 / pi
};

/// I = int over S_lambda(lambda xi) of [|x|^{-4} gbar(xi, nu) - 4 |x|^{-6} gbar(x, xi) gbar(x, nu)].
/// Reduced through the inner-product identities to moments:
/// I(1) = -M2/2 - (1+d^2) M4/2 + (1-d^2)^2 M6 = 2 pi (1+d^2)/(1-d^2)^2 - (pi/d) log((1+d)/(1-d)).
inline Radial4 radial4_leading(double d, double lambda = 1.0) {
  if (!(d > 0.0 && d < 1.0)) throw Error(ErrorKind::InvalidDomain, "radial4 needs 0 < |xi| < 1");
  const double d2 = d * d;
  const double i1 = -0.5 * sphere_moment(2, d) - 0.5 * (1.0 + d2) * sphere_moment(4, d) +
                    (1.0 - d2) * (1.0 - d2) * sphere_moment(6, d);
  Radial4 out;
  out.exact = i1 / (lambda * lambda);
  out.predicted = pi / (lambda * lambda * (1.0 - d) * (1.0 - d));
  out.ratio = out.exact / out.predicted;
  return out;
}

}  // namespace willmore::oracles
