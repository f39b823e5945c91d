/// \file corpus.hpp
/// \brief Seeded random graph surfaces used by property checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "willmore/surface.hpp"

namespace willmore {

inline constexpr std::uint64_t default_seed = 0xC0FFEE;

/// Portable uniform doubles from a 64-bit Mersenne twister.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  Vec3 unit_vector() {
    for (;;) {
      const Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      const double n = v.norm();
      if (n > 1e-3 && n <= 1.0) return v / n;
    }
  }

 private:
  std::mt19937_64 eng_;
};

struct CorpusParams {
  int degree = 8;             // highest degree in u
  double envelope = 0.6;      // |u_lm| <~ envelope^l before normalisation
  double amplitude = 0.05;    // max |u| = amplitude * lambda
  double lambda_min = 10.0, lambda_max = 50.0;
  double offset_max = 0.5;    // |xi|
};

struct CorpusCase {
  double lambda = 0.0;
  Vec3 offset = Vec3::Zero();
  HarmonicCoeffs u;
  Vec3 direction = Vec3::UnitX();  // random unit vector for translation checks

  GraphSurface surface(int band_limit) const {
    return GraphSurface(SphereChart::build(offset, lambda, band_limit), u.resized(std::min(band_limit, u.band_limit)));
  }
};

/// Random admissible graphs: degree >= 2 content (no translation or dilation part).
inline std::vector<CorpusCase> random_corpus(std::uint64_t seed, int count, const CorpusParams& p = {}) {
  Rng rng(seed);
  std::vector<CorpusCase> out;
  for (int n = 0; n < count; ++n) {
    CorpusCase c;
    c.lambda = rng.uniform(p.lambda_min, p.lambda_max);
    c.offset = p.offset_max * rng.uniform() * rng.unit_vector();
    c.u = HarmonicCoeffs(p.degree);
    for (int l = 2; l <= p.degree; ++l)
      for (int m = -l; m <= l; ++m) c.u(l, m) = rng.uniform(-1, 1) * std::pow(p.envelope, l);
    c.direction = rng.unit_vector();
    // normalise the sup norm on a fine grid
    const auto chart = SphereChart::build(c.offset, c.lambda, std::max(32, 4 * p.degree));
    const double sup = synthesize(c.u.resized(chart->band_limit()), chart).max_abs();
    for (double& v : c.u.a) v *= p.amplitude * c.lambda / sup;
    out.push_back(std::move(c));
  }
  return out;
}

/// The three metric kinds used by the corpus checks.
inline std::vector<MetricSpec> corpus_metrics() {
  PerturbationFamily fam;
  fam.amplitude = 1.0;
  fam.profile = {{2, 0, 1.0}, {1, 1, 0.5}, {3, -2, 0.3}};
  return {MetricSpec::euclidean(), MetricSpec::schwarzschild(2.0), MetricSpec::perturbed(2.0, fam)};
}

}  // namespace willmore
