//
// Copyright 2026 The gammaobf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// The two-sided Gamma noise family
//
//   f(x) = |x|^(shape-1) exp(-|x|/scale) / (2 Gamma(shape) scale^shape),
//
// its characteristic function, the ordinary-smoothness envelope of that
// characteristic function, and a sampler. shape == 1 is the Laplace law.

#ifndef GAMMAOBF_NOISE_MODEL_HPP_
#define GAMMAOBF_NOISE_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "gammaobf/errors.hpp"
#include "gammaobf/numerics.hpp"
#include "gammaobf/rng.hpp"

namespace gammaobf {

struct GammaNoiseParams {
  double shape = 1.0;
  double scale = 1.0;

  static GammaNoiseParams laplace(double scale) { return {1.0, scale}; }

  bool valid() const {
    return std::isfinite(shape) && std::isfinite(scale) && shape > 0.0 &&
           scale > 0.0;
  }

  void validate() const {
    if (!valid()) {
      throw ParameterError("invalid Gamma noise parameters (shape=" +
                           std::to_string(shape) +
                           ", scale=" + std::to_string(scale) + ")");
    }
  }

  friend bool operator==(const GammaNoiseParams&, const GammaNoiseParams&) = default;
};

// c1 (1+|t|)^-exponent <= |f~(t)| <= c2 (1+|t|)^-exponent
struct OrdinarySmoothBounds {
  double c1 = 0.0;
  double c2 = 0.0;
  double exponent = 0.0;
};

// Density at x. Diverges at the origin when shape < 1; +inf is returned
// there so callers can detect and skip the point.
inline double density(const GammaNoiseParams& p, double x) {
  p.validate();
  const double ax = std::abs(x);
  if (ax == 0.0) {
    if (p.shape < 1.0) return kInf;
    if (p.shape > 1.0) return 0.0;
    return 0.5 / p.scale;
  }
  const double log_f = (p.shape - 1.0) * std::log(ax) - ax / p.scale -
                       boost::math::lgamma(p.shape) -
                       p.shape * std::log(p.scale) - std::numbers::ln2;
  return std::exp(log_f);
}

// Characteristic function r^-shape cos(shape * atan(t scale)),
// r = sqrt(1 + t^2 scale^2). Real and even; equals 1 at t = 0.
inline double fourier_transform(const GammaNoiseParams& p, double t) {
  p.validate();
  const double u = std::abs(t) * p.scale;
  return std::exp(-0.5 * p.shape * std::log1p(u * u)) *
         std::cos(p.shape * std::atan(u));
}

// Envelope constants for shape < 1. At shape == 1 the lower constant
// cos(pi/2) vanishes, so only shape < 1 is accepted.
inline OrdinarySmoothBounds ordinary_smooth_bounds(const GammaNoiseParams& p) {
  p.validate();
  if (p.shape >= 1.0) {
    throw UnsupportedShapeError(
        "ordinary-smooth bounds are only available for shape < 1 (got " +
        std::to_string(p.shape) + ")");
  }
  const double a = p.shape;
  const double cos_term = std::cos(kPi * a / 2.0);
  const double two_pow = std::pow(2.0, a / 2.0);
  const double eta_pow = std::pow(p.scale, -a);
  OrdinarySmoothBounds b;
  if (p.scale > 1.0) {
    b.c1 = eta_pow * cos_term;
    b.c2 = two_pow;
  } else {
    b.c1 = cos_term;
    b.c2 = two_pow * eta_pow;
  }
  b.exponent = a;
  return b;
}

// Second moment (the mean is zero by symmetry).
inline double variance(const GammaNoiseParams& p) {
  p.validate();
  return p.scale * p.scale * p.shape * (p.shape + 1.0);
}

inline double sample_one(const GammaNoiseParams& p, Rng& rng) {
  const double magnitude = p.scale * rng.gamma(p.shape);
  return rng.sign() * magnitude;
}

inline std::vector<double> sample(const GammaNoiseParams& p, std::size_t n,
                                  Rng& rng) {
  p.validate();
  std::vector<double> out(n);
  for (auto& y : out) y = sample_one(p, rng);
  return out;
}

// n independent draws; identical seeds give identical vectors.
inline std::vector<double> sample(const GammaNoiseParams& p, std::size_t n,
                                  std::uint64_t seed) {
  if (n == 0) throw ParameterError("sample size must be at least 1");
  Rng rng(seed);
  return sample(p, n, rng);
}

}  // namespace gammaobf

#endif  // GAMMAOBF_NOISE_MODEL_HPP_
