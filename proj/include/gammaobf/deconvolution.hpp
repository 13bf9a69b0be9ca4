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

// Deconvolution kernel density estimation under two-sided Gamma noise.
//
// The kernel is specified only through its Fourier transform
// K~(t) = (1 - t^2)^3 on [-1, 1]. With t = tan(theta) / scale the Fourier
// integrals over |t| <= 1/b become integrals over [0, atan(scale / b)] with
// bounded integrands, evaluated with a fixed 256-point Gauss-Legendre rule.

#ifndef GAMMAOBF_DECONVOLUTION_HPP_
#define GAMMAOBF_DECONVOLUTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gammaobf/errors.hpp"
#include "gammaobf/noise_model.hpp"
#include "gammaobf/numerics.hpp"

namespace gammaobf {

// Factor multiplying (b^4 / 4) R(g'') in the AIMSE bias term.
enum class BiasConstant {
  kLegacy,  // 11520
  kKernel,  // mu_{K,2}^2 = 36, since mu_{K,2} = -K~''(0) = 6
};

inline double bias_constant_value(BiasConstant c) {
  return c == BiasConstant::kLegacy ? 11520.0 : 36.0;
}

inline std::string_view to_string(BiasConstant c) {
  return c == BiasConstant::kLegacy ? "legacy" : "kernel";
}

inline std::optional<BiasConstant> parse_bias_constant(std::string_view s) {
  if (s == "legacy") return BiasConstant::kLegacy;
  if (s == "kernel") return BiasConstant::kKernel;
  return std::nullopt;
}

// Noise parameters, or std::nullopt for error-free data.
using NoiseSpec = std::optional<GammaNoiseParams>;

inline double kernel_ft(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  return u * u * u;
}

// Integral of K~(u)^2 over [-1, 1]: 2 * 4^6 (6!)^2 / 13!.
inline constexpr double kKernelFtSquaredIntegral = 4246732800.0 / 6227020800.0;

// Normal-reference estimate of R(g'') for a variance var_x.
inline double normal_reference_roughness(double var_x) {
  if (!(var_x > 0.0)) throw ParameterError("variance must be positive");
  return 0.375 * std::pow(var_x, -2.5) / std::sqrt(kPi);
}

namespace detail {

// 1 / (cos^power(theta) cos(shape theta)), checking that the second factor
// stays positive (true for shape <= 1 on [0, pi/2)).
inline double inverse_noise_factor(double theta, double shape, double power) {
  const double cs = std::cos(shape * theta);
  if (!(cs > 0.0)) {
    throw NumericalError("cos(shape * theta) is not positive at a quadrature node; "
                         "the noise transform vanishes inside the kernel support");
  }
  return 1.0 / (std::pow(std::cos(theta), power) * cs);
}

inline void check_bandwidth(double b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw ParameterError("bandwidth must be positive");
}

}  // namespace detail

// Integral over the real line of |K~(t b)|^2 / |f~(t)|^2.
inline double kernel_noise_l2(const NoiseSpec& noise, double b) {
  detail::check_bandwidth(b);
  if (!noise) return kKernelFtSquaredIntegral / b;
  noise->validate();
  const double eta = noise->scale;
  const double shape = noise->shape;
  const double ratio = b / eta;
  const double theta_max = std::atan(eta / b);
  auto integrand = [&](double theta) {
    const double s = ratio * std::tan(theta);
    const double u = std::max(0.0, 1.0 - s * s);
    const double u3 = u * u * u;
    const double inv = detail::inverse_noise_factor(theta, shape, shape + 1.0);
    return u3 * u3 * inv * inv;
  };
  return 2.0 / eta * integrate_fixed(gauss_legendre_256(), integrand, 0.0, theta_max);
}

// Variance part of the AIMSE: (1 / (2 pi n)) * kernel_noise_l2.
inline double aimse_variance_term(const NoiseSpec& noise, double b, std::size_t n) {
  if (n == 0) throw ParameterError("sample size must be positive");
  return kernel_noise_l2(noise, b) / (2.0 * kPi * static_cast<double>(n));
}

inline double aimse(double b, const NoiseSpec& noise, double roughness, std::size_t n,
                    BiasConstant bias = BiasConstant::kKernel) {
  const double b2 = b * b;
  return aimse_variance_term(noise, b, n) +
         bias_constant_value(bias) * b2 * b2 / 4.0 * roughness;
}

struct BandwidthSelection {
  double bandwidth = 0.0;
  double aimse_at_optimum = 0.0;
  double roughness_estimate = 0.0;
  double bias_constant = 0.0;
  std::size_t sample_size = 0;
};

// AIMSE-optimal bandwidth: golden-section search on log(b) over a bracket
// grown from the error-free optimum.
inline BandwidthSelection select_bandwidth(const NoiseSpec& noise, double roughness,
                                           std::size_t n,
                                           BiasConstant bias = BiasConstant::kKernel) {
  if (!(roughness > 0.0)) throw ParameterError("roughness must be positive");
  if (n == 0) throw ParameterError("sample size must be positive");
  const double c = bias_constant_value(bias);
  const double b0 = std::pow(
      kKernelFtSquaredIntegral / (2.0 * kPi * static_cast<double>(n) * c * roughness), 0.2);
  auto objective = [&](double log_b) { return aimse(std::exp(log_b), noise, roughness, n, bias); };
  const auto [lo, hi] = bracket_minimum(objective, std::log(b0), 0.25);
  const double log_b = golden_section_minimize(objective, lo, hi, 1e-5);

  BandwidthSelection sel;
  sel.bandwidth = std::exp(log_b);
  sel.aimse_at_optimum = aimse(sel.bandwidth, noise, roughness, n, bias);
  sel.roughness_estimate = roughness;
  sel.bias_constant = c;
  sel.sample_size = n;
  return sel;
}

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;  // may be locally negative
  std::vector<double> cdf;      // monotone, in [0, 1]
  double bandwidth = 0.0;
  NoiseSpec noise;
  double mass = 0.0;           // trapezoid integral of density over the grid
  double cdf_overshoot = 0.0;  // excursion of the raw CDF outside [0, 1]
};

namespace detail {

// g(x) = sum_k coef_k [cos(t_k x) C_k + sin(t_k x) S_k] / n, where C_k, S_k
// are the cosine and sine sums of the data at frequency t_k.
struct SpectralForm {
  std::vector<double> freq;
  std::vector<double> coef;
};

inline SpectralForm spectral_form(const NoiseSpec& noise, double b) {
  const auto& rule = gauss_legendre_256();
  SpectralForm sf;
  sf.freq.resize(rule.size());
  sf.coef.resize(rule.size());
  if (!noise) {
    // t in [0, 1/b]
    const double half = 0.5 / b;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double t = half * (1.0 + rule.nodes[k]);
      sf.freq[k] = t;
      sf.coef[k] = rule.weights[k] * half * kernel_ft(t * b) / kPi;
    }
    return sf;
  }
  const double eta = noise->scale;
  const double shape = noise->shape;
  const double ratio = b / eta;
  const double half = 0.5 * std::atan(eta / b);
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double theta = half * (1.0 + rule.nodes[k]);
    const double tn = std::tan(theta);
    const double s = ratio * tn;
    const double u = std::max(0.0, 1.0 - s * s);
    sf.freq[k] = tn / eta;
    sf.coef[k] = rule.weights[k] * half * u * u * u *
                 inverse_noise_factor(theta, shape, shape + 2.0) / (eta * kPi);
  }
  return sf;
}

inline void finish_cdf(DensityEstimate& est) {
  const std::size_t m = est.grid.size();
  std::vector<double> raw(m, 0.0);
  CompensatedSum acc;
  for (std::size_t i = 1; i < m; ++i) {
    acc += 0.5 * (est.density[i] + est.density[i - 1]) * (est.grid[i] - est.grid[i - 1]);
    raw[i] = acc.value();
  }
  est.mass = m > 0 ? raw.back() : 0.0;
  double overshoot = 0.0;
  for (double v : raw) overshoot = std::max({overshoot, v - 1.0, -v});
  est.cdf_overshoot = overshoot;
  est.cdf = isotonic_nondecreasing(raw);
  for (double& v : est.cdf) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

// Deconvolution estimate of the data density on `grid` from masked values,
// with the CDF obtained by cumulative trapezoid from the left grid edge.
// noise == std::nullopt gives the ordinary kernel estimate with the same kernel.
inline DensityEstimate estimate_density(std::span<const double> masked, const NoiseSpec& noise,
                                        double bandwidth, std::span<const double> grid) {
  detail::check_bandwidth(bandwidth);
  if (noise) noise->validate();
  if (masked.empty()) throw ParameterError("no masked values");
  if (grid.empty() || !strictly_increasing(grid)) {
    throw ParameterError("estimation grid must be non-empty and strictly increasing");
  }
  const detail::SpectralForm sf = detail::spectral_form(noise, bandwidth);
  const std::size_t nodes = sf.freq.size();
  std::vector<double> cos_sum(nodes);
  std::vector<double> sin_sum(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    CompensatedSum c, s;
    const double t = sf.freq[k];
    for (double z : masked) {
      c += std::cos(t * z);
      s += std::sin(t * z);
    }
    cos_sum[k] = c.value();
    sin_sum[k] = s.value();
  }
  const double inv_n = 1.0 / static_cast<double>(masked.size());

  DensityEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.density.resize(grid.size());
  est.bandwidth = bandwidth;
  est.noise = noise;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    CompensatedSum g;
    for (std::size_t k = 0; k < nodes; ++k) {
      const double tx = sf.freq[k] * x;
      g += sf.coef[k] * (std::cos(tx) * cos_sum[k] + std::sin(tx) * sin_sum[k]);
    }
    est.density[i] = g.value() * inv_n;
  }
  detail::finish_cdf(est);
  return est;
}

inline constexpr std::size_t kDefaultOutputGridSize = 201;

// Equally spaced grid over [min - sd, max + sd] of the values.
inline std::vector<double> default_output_grid(std::span<const double> values,
                                               std::size_t size = kDefaultOutputGridSize) {
  if (size < 2) throw ParameterError("output grid needs at least two points");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double sd = std::sqrt(sample_variance(values));
  return linspace(*mn - sd, *mx + sd, size);
}

// Variance of the data implied by the masked values: Var(Z) - Var(Y),
// floored at 10% of Var(Z).
inline double deconvolved_variance(std::span<const double> masked,
                                   const GammaNoiseParams& noise) {
  const double vz = sample_variance(masked);
  return std::max(vz - variance(noise), 0.1 * vz);
}

// Ordinary kernel estimate (error-free data) with the AIMSE bandwidth under a
// normal reference on the data variance.
inline DensityEstimate noise_free_estimate(std::span<const double> data,
                                           std::span<const double> grid,
                                           BiasConstant bias = BiasConstant::kKernel) {
  const double rough = normal_reference_roughness(sample_variance(data));
  const auto sel = select_bandwidth(std::nullopt, rough, data.size(), bias);
  return estimate_density(data, std::nullopt, sel.bandwidth, grid);
}

// Analyst-side estimate from masked data and published noise parameters:
// bandwidth from the AIMSE with a normal reference on the deconvolved variance.
inline DensityEstimate estimate_from_masked(std::span<const double> masked,
                                            const GammaNoiseParams& noise,
                                            std::span<const double> grid,
                                            BiasConstant bias = BiasConstant::kKernel,
                                            BandwidthSelection* selection = nullptr) {
  const double rough = normal_reference_roughness(deconvolved_variance(masked, noise));
  const auto sel = select_bandwidth(noise, rough, masked.size(), bias);
  if (selection) *selection = sel;
  return estimate_density(masked, noise, sel.bandwidth, grid);
}

}  // namespace gammaobf

#endif  // GAMMAOBF_DECONVOLUTION_HPP_
