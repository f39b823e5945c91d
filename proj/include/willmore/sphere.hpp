/// \file sphere.hpp
/// \brief Spectral calculus on coordinate spheres S_lambda(lambda xi).
///
/// The grid is (L+1) Gauss-Legendre colatitudes times N_phi >= 2L+1 uniform
/// longitudes, so no node sits on a pole. Fields are expanded in orthonormal
/// real spherical harmonics up to degree L (see legendre.hpp). Angular
/// derivatives are evaluated analytically from the expansion.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "willmore/error.hpp"
#include "willmore/legendre.hpp"

namespace willmore {

using Vec3 = Eigen::Vector3d;

class SphereChart {
 public:
  /// Builds the chart for the sphere of radius `radius` centred at radius*offset.
  static std::shared_ptr<const SphereChart> build(const Vec3& offset, double radius, int band_limit,
                                                  int n_phi = 0) {
    if (band_limit < 8) throw Error(ErrorKind::InvalidBandLimit, "band limit must be >= 8");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidBandLimit, "sphere radius must be positive");
    if (n_phi == 0) n_phi = 2 * band_limit + 2;
    if (n_phi < 2 * band_limit + 1)
      throw Error(ErrorKind::InvalidBandLimit, "need at least 2L+1 longitudes");
    return std::shared_ptr<const SphereChart>(new SphereChart(offset, radius, band_limit, n_phi));
  }

  const Vec3& offset() const { return offset_; }
  double radius() const { return radius_; }
  Vec3 center() const { return radius_ * offset_; }
  int band_limit() const { return band_limit_; }
  int n_theta() const { return band_limit_ + 1; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta() * n_phi_; }
  int ring(int node) const { return node / n_phi_; }
  int column(int node) const { return node % n_phi_; }

  double theta(int node) const { return theta_[ring(node)]; }
  double phi(int node) const { return phi_[column(node)]; }
  double sin_theta(int node) const { return sin_t_[ring(node)]; }
  double cos_theta(int node) const { return cos_t_[ring(node)]; }

  /// Outward unit direction n(theta, phi) = lambda^{-1} x - xi.
  Vec3 direction(int node) const {
    const int j = ring(node), k = column(node);
    return {sin_t_[j] * cos_p_[k], sin_t_[j] * sin_p_[k], cos_t_[j]};
  }
  Vec3 d_theta_direction(int node) const {
    const int j = ring(node), k = column(node);
    return {cos_t_[j] * cos_p_[k], cos_t_[j] * sin_p_[k], -sin_t_[j]};
  }
  Vec3 d_phi_direction(int node) const {
    const int j = ring(node), k = column(node);
    return {-sin_t_[j] * sin_p_[k], sin_t_[j] * cos_p_[k], 0.0};
  }
  /// Node position on S_lambda(lambda xi).
  Vec3 position(int node) const { return center() + radius_ * direction(node); }

  /// Quadrature weight on S_lambda: sums to 4 pi lambda^2.
  double weight(int node) const { return radius_ * radius_ * unit_weight(node); }
  /// Quadrature weight on the unit sphere.
  double unit_weight(int node) const { return gl_w_[ring(node)] * 2.0 * std::numbers::pi / n_phi_; }

  bool same_grid(const SphereChart& o) const {
    return band_limit_ == o.band_limit_ && n_phi_ == o.n_phi_ && radius_ == o.radius_ &&
           offset_ == o.offset_;
  }

  // Tables used by the transforms.
  const legendre::LegendreTable& legendre_at(int j) const { return tables_[j]; }
  double cos_m_phi(int m, int k) const { return cos_mp_[m * n_phi_ + k]; }
  double sin_m_phi(int m, int k) const { return sin_mp_[m * n_phi_ + k]; }
  double gl_weight(int j) const { return gl_w_[j]; }

 private:
  SphereChart(const Vec3& offset, double radius, int band_limit, int n_phi)
      : offset_(offset), radius_(radius), band_limit_(band_limit), n_phi_(n_phi) {
    const int nt = band_limit + 1;
    auto [z, w] = legendre::gauss_legendre(nt);
    // colatitude increases from north to south: theta_j = acos(-z_j) with z increasing
    theta_.resize(nt);
    cos_t_.resize(nt);
    sin_t_.resize(nt);
    gl_w_ = w;
    for (int j = 0; j < nt; ++j) {
      cos_t_[j] = -z[j];
      theta_[j] = std::acos(cos_t_[j]);
      sin_t_[j] = std::sqrt((1.0 - z[j]) * (1.0 + z[j]));
      tables_.push_back(legendre::legendre_with_derivatives(band_limit, theta_[j]));
    }
    phi_.resize(n_phi);
    cos_p_.resize(n_phi);
    sin_p_.resize(n_phi);
    for (int k = 0; k < n_phi; ++k) {
      phi_[k] = 2.0 * std::numbers::pi * k / n_phi;
      cos_p_[k] = std::cos(phi_[k]);
      sin_p_[k] = std::sin(phi_[k]);
    }
    cos_mp_.resize((band_limit + 1) * n_phi);
    sin_mp_.resize((band_limit + 1) * n_phi);
    for (int m = 0; m <= band_limit; ++m)
      for (int k = 0; k < n_phi; ++k) {
        // reduce the angle index exactly to avoid drift for large m
        const double a = 2.0 * std::numbers::pi * ((static_cast<long>(m) * k) % n_phi) / n_phi;
        cos_mp_[m * n_phi + k] = std::cos(a);
        sin_mp_[m * n_phi + k] = std::sin(a);
      }
  }

  Vec3 offset_;
  double radius_;
  int band_limit_;
  int n_phi_;
  std::vector<double> theta_, cos_t_, sin_t_, gl_w_, phi_, cos_p_, sin_p_;
  std::vector<double> cos_mp_, sin_mp_;
  std::vector<legendre::LegendreTable> tables_;
};

using ChartPtr = std::shared_ptr<const SphereChart>;

struct ScalarField {
  ChartPtr chart;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(ChartPtr c) : chart(std::move(c)), values(chart->size(), 0.0) {}
  ScalarField(ChartPtr c, std::vector<double> v) : chart(std::move(c)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != chart->size())
      throw Error(ErrorKind::ChartMismatch, "field length differs from chart node count");
  }

  template <typename F>
  static ScalarField from_function(const ChartPtr& c, F&& f) {
    ScalarField out(c);
    for (int i = 0; i < c->size(); ++i) out.values[i] = f(i);
    return out;
  }

  int size() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline void require_same_chart(const SphereChart& a, const SphereChart& b) {
  if (&a != &b && !a.same_grid(b)) throw Error(ErrorKind::ChartMismatch, "fields live on different charts");
}

/// Real spherical-harmonic coefficients a_lm, 0 <= l <= L, |m| <= l.
struct HarmonicCoeffs {
  int band_limit = 0;
  std::vector<double> a;

  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int L) : band_limit(L), a(legendre::sh_count(L), 0.0) {}

  double& operator()(int l, int m) { return a[legendre::sh_index(l, m)]; }
  double operator()(int l, int m) const { return a[legendre::sh_index(l, m)]; }

  /// Truncates or zero-pads to another band limit.
  HarmonicCoeffs resized(int L) const {
    HarmonicCoeffs out(L);
    for (int l = 0; l <= std::min(L, band_limit); ++l)
      for (int m = -l; m <= l; ++m) out(l, m) = (*this)(l, m);
    return out;
  }
};

/// A field and its angular coordinate derivatives at every node.
struct AngularDerivatives {
  std::vector<double> f, t, p, tt, tp, pp;
};

inline HarmonicCoeffs analyze(const ScalarField& field) {
  const SphereChart& c = *field.chart;
  const int L = c.band_limit(), nt = c.n_theta(), np = c.n_phi();
  HarmonicCoeffs out(L);
  const double dphi = 2.0 * std::numbers::pi / np;
  std::vector<double> cm(L + 1), sm(L + 1);
  for (int j = 0; j < nt; ++j) {
    const double* ring = field.values.data() + j * np;
    for (int m = 0; m <= L; ++m) {
      double cs = 0.0, sn = 0.0;
      for (int k = 0; k < np; ++k) {
        cs += ring[k] * c.cos_m_phi(m, k);
        sn += ring[k] * c.sin_m_phi(m, k);
      }
      const double scale = (m == 0 ? 1.0 : std::numbers::sqrt2) * dphi * c.gl_weight(j);
      cm[m] = cs * scale;
      sm[m] = sn * scale;
    }
    const auto& P = c.legendre_at(j).p;
    for (int l = 0; l <= L; ++l) {
      out(l, 0) += P[l][0] * cm[0];
      for (int m = 1; m <= l; ++m) {
        out(l, m) += P[l][m] * cm[m];
        out(l, -m) += P[l][m] * sm[m];
      }
    }
  }
  return out;
}

namespace detail {

/// Evaluates sum_lm a_lm d^k/dtheta^k Pbar_lm * trig(m phi) and phi derivatives.
inline AngularDerivatives synthesize_impl(const HarmonicCoeffs& coeffs, const SphereChart& c, bool derivs) {
  if (coeffs.band_limit > c.band_limit())
    throw Error(ErrorKind::ChartMismatch, "coefficient band limit exceeds chart band limit");
  const int L = coeffs.band_limit, nt = c.n_theta(), np = c.n_phi();
  AngularDerivatives out;
  const int n = c.size();
  out.f.assign(n, 0.0);
  if (derivs) {
    out.t.assign(n, 0.0);
    out.p.assign(n, 0.0);
    out.tt.assign(n, 0.0);
    out.tp.assign(n, 0.0);
    out.pp.assign(n, 0.0);
  }
  for (int j = 0; j < nt; ++j) {
    const auto& tab = c.legendre_at(j);
    for (int m = 0; m <= L; ++m) {
      // ring-wise cosine/sine amplitudes for value, d/dtheta, d2/dtheta2
      double c0 = 0, s0 = 0, c1 = 0, s1 = 0, c2 = 0, s2 = 0;
      for (int l = m; l <= L; ++l) {
        const double ac = coeffs(l, m);
        const double as = m > 0 ? coeffs(l, -m) : 0.0;
        c0 += ac * tab.p[l][m];
        s0 += as * tab.p[l][m];
        if (derivs) {
          c1 += ac * tab.dp[l][m];
          s1 += as * tab.dp[l][m];
          c2 += ac * tab.d2p[l][m];
          s2 += as * tab.d2p[l][m];
        }
      }
      const double norm = m == 0 ? 1.0 : std::numbers::sqrt2;
      const double mm = m;
      for (int k = 0; k < np; ++k) {
        const double cp = norm * c.cos_m_phi(m, k), sp = norm * c.sin_m_phi(m, k);
        const int i = j * np + k;
        out.f[i] += c0 * cp + s0 * sp;
        if (derivs) {
          out.t[i] += c1 * cp + s1 * sp;
          out.tt[i] += c2 * cp + s2 * sp;
          out.p[i] += mm * (-c0 * sp + s0 * cp);
          out.tp[i] += mm * (-c1 * sp + s1 * cp);
          out.pp[i] += -mm * mm * (c0 * cp + s0 * sp);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

inline ScalarField synthesize(const HarmonicCoeffs& coeffs, const ChartPtr& chart) {
  return ScalarField(chart, detail::synthesize_impl(coeffs, *chart, false).f);
}

inline AngularDerivatives angular_derivatives(const HarmonicCoeffs& coeffs, const ChartPtr& chart) {
  return detail::synthesize_impl(coeffs, *chart, true);
}

inline AngularDerivatives angular_derivatives(const ScalarField& f) {
  return angular_derivatives(analyze(f), f.chart);
}

/// Euclidean surface gradient on S_lambda(lambda xi), as Cartesian vectors.
inline std::vector<Vec3> sphere_grad(const ScalarField& field) {
  const SphereChart& c = *field.chart;
  const AngularDerivatives d = angular_derivatives(field);
  std::vector<Vec3> g(c.size());
  for (int i = 0; i < c.size(); ++i)
    g[i] = (d.t[i] * c.d_theta_direction(i) + d.p[i] / (c.sin_theta(i) * c.sin_theta(i)) * c.d_phi_direction(i)) /
           c.radius();
  return g;
}

/// Applies f(l) to every degree-l block of the coefficients.
template <typename F>
HarmonicCoeffs scale_degrees(HarmonicCoeffs a, F&& f) {
  for (int l = 0; l <= a.band_limit; ++l) {
    const double s = f(l);
    for (int m = -l; m <= l; ++m) a(l, m) *= s;
  }
  return a;
}

inline ScalarField sphere_laplacian(const ScalarField& field) {
  const double r2 = field.chart->radius() * field.chart->radius();
  return synthesize(scale_degrees(analyze(field), [&](int l) { return -l * (l + 1.0) / r2; }), field.chart);
}

struct MeanProjection {
  double mean = 0.0;
  ScalarField perp;
};

/// L^2(dmu-bar) projection onto constants and its orthogonal complement.
inline MeanProjection project_mean(const ScalarField& field) {
  const SphereChart& c = *field.chart;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    num += c.weight(i) * field[i];
    den += c.weight(i);
  }
  MeanProjection out{num / den, field};
  for (double& v : out.perp.values) v -= out.mean;
  return out;
}

/// Solves Delta-bar u = f for u with zero mean.
inline ScalarField poisson_solve(const ScalarField& f) {
  const double mean = project_mean(f).mean;
  if (std::abs(mean) > 1e-10 * std::max(1.0, f.max_abs()))
    throw Error(ErrorKind::NonzeroMean, "right-hand side is not mean-free");
  const double r2 = f.chart->radius() * f.chart->radius();
  return synthesize(scale_degrees(analyze(f), [&](int l) { return l == 0 ? 0.0 : -r2 / (l * (l + 1.0)); }),
                    f.chart);
}

}  // namespace willmore
