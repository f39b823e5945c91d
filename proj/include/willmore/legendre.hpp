/// \file legendre.hpp
/// \brief Gauss-Legendre nodes and orthonormal real spherical harmonics.
///
/// Convention: Y_lm = Pbar_lm(cos t) * sqrt(2) cos(m p) for m > 0,
/// Pbar_l0(cos t) for m = 0, and Pbar_l|m|(cos t) * sqrt(2) sin(|m| p) for
/// m < 0, with Pbar_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m and no
/// Condon-Shortley phase. These are orthonormal on the unit sphere.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace willmore::legendre {

/// Packed index of (l, m), |m| <= l, in a (L+1)^2 coefficient vector.
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int band_limit) { return (band_limit + 1) * (band_limit + 1); }

/// Gauss-Legendre nodes on [-1, 1] in increasing order, with weights.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  const double pi = std::numbers::pi;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at converged node
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Normalized associated Legendre functions divided by sin^m(t):
/// returns Q[l][m] = Pbar_lm(c) / s^m for 0 <= m <= l <= L, as a function of
/// c = cos(t) only. Templated so that it can run on differentiable scalars.
template <typename T>
std::vector<std::vector<T>> reduced_legendre(int band_limit, const T& c) {
  std::vector<std::vector<T>> q(band_limit + 1);
  for (int l = 0; l <= band_limit; ++l) q[l].assign(l + 1, T(0.0));
  double diag = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 0; m <= band_limit; ++m) {
    if (m > 0) diag *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    q[m][m] = T(diag);
    if (m + 1 <= band_limit) q[m + 1][m] = std::sqrt(2.0 * m + 3.0) * c * q[m][m];
    for (int l = m + 2; l <= band_limit; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      q[l][m] = a * (c * q[l - 1][m] - b * q[l - 2][m]);
    }
  }
  return q;
}

/// Values Pbar_lm(cos t) with first and second t-derivatives, for sin(t) > 0.
struct LegendreTable {
  std::vector<std::vector<double>> p, dp, d2p;
};

inline LegendreTable legendre_with_derivatives(int band_limit, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (!(s > 0.0)) throw std::invalid_argument("legendre derivatives undefined at poles");
  auto q = reduced_legendre(band_limit, c);
  LegendreTable t;
  t.p = q;
  t.dp = q;
  t.d2p = q;
  for (int m = 0; m <= band_limit; ++m) {
    const double sm = std::pow(s, m);
    for (int l = m; l <= band_limit; ++l) t.p[l][m] = q[l][m] * sm;
  }
  for (int l = 0; l <= band_limit; ++l) {
    for (int m = 0; m <= l; ++m) {
      // dP_lm/dt = (l c P_lm - sqrt((2l+1)/(2l-1)) sqrt(l^2-m^2) P_{l-1,m}) / s
      double prev = 0.0;
      if (l > m) prev = t.p[l - 1][m];
      const double f = (l > 0 && l > m)
                           ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (double(l) * l - double(m) * m))
                           : 0.0;
      t.dp[l][m] = (l * c * t.p[l][m] - f * prev) / s;
      // Legendre equation: P'' = -cot P' - (l(l+1) - m^2/s^2) P
      t.d2p[l][m] = -(c / s) * t.dp[l][m] - (l * (l + 1.0) - m * m / (s * s)) * t.p[l][m];
    }
  }
  return t;
}

/// Orthonormal real spherical harmonic Y_lm evaluated at a Cartesian point
/// x != 0 (only its direction matters). Templated for differentiable scalars.
template <typename T>
T real_harmonic(int l, int m, const T& x, const T& y, const T& z) {
  using std::sqrt;
  const T r = sqrt(x * x + y * y + z * z);
  const T c = z / r;
  const int am = m < 0 ? -m : m;
  auto q = reduced_legendre(l, c);
  // (x + i y)^|m| / r^|m| = s^|m| (cos |m|p + i sin |m|p)
  T re(1.0), im(0.0);
  for (int k = 0; k < am; ++k) {
    const T nre = re * x - im * y;
    const T nim = re * y + im * x;
    re = nre;
    im = nim;
  }
  T rm(1.0);
  for (int k = 0; k < am; ++k) rm = rm * r;
  if (m == 0) return q[l][0] * T(1.0);
  const T trig = (m > 0 ? re : im) / rm;
  return std::sqrt(2.0) * q[l][am] * trig;
}

}  // namespace willmore::legendre
