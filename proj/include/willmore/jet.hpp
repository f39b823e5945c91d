/// \file jet.hpp
/// \brief Second-order forward-mode differentiation in three variables.
///
/// A Jet2 carries a value together with its exact gradient and Hessian with
/// respect to the Cartesian coordinates (x1, x2, x3). Arithmetic propagates
/// all three by the chain rule, so analytic expressions evaluated on Jet2
/// operands produce exact first and second derivatives.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace willmore {

struct Jet2 {
  double v = 0.0;
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet2 coordinate(const Eigen::Vector3d& x, int i) {
    Jet2 j(x[i]);
    j.d[i] = 1.0;
    return j;
  }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    d += o.d;
    h += o.h;
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v -= o.v;
    d -= o.d;
    h -= o.h;
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    h = v * o.h + o.v * h + d * o.d.transpose() + o.d * d.transpose();
    d = v * o.d + o.v * d;
    v *= o.v;
    return *this;
  }
  Jet2& operator/=(const Jet2& o) { return *this *= reciprocal(o); }

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
  friend Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }
  friend Jet2 operator-(Jet2 a) {
    a.v = -a.v;
    a.d = -a.d;
    a.h = -a.h;
    return a;
  }

  /// Applies a scalar function given its value and first two derivatives at v.
  Jet2 compose(double f, double df, double d2f) const {
    Jet2 r(f);
    r.d = df * d;
    r.h = df * h + d2f * d * d.transpose();
    return r;
  }

  friend Jet2 reciprocal(const Jet2& a) {
    const double inv = 1.0 / a.v;
    return a.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
  }
};

inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return a.compose(s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return a.compose(e, e, e);
}

/// Real power a^p for a > 0.
inline Jet2 pow(const Jet2& a, double p) {
  const double f = std::pow(a.v, p);
  return a.compose(f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

}  // namespace willmore
