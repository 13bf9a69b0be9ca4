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

// Monte Carlo comparison of CDF recovery with no noise, Laplace noise and
// the selected optimal Gamma noise.

#ifndef GAMMAOBF_EVALUATION_HPP_
#define GAMMAOBF_EVALUATION_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gammaobf/confidentiality.hpp"
#include "gammaobf/deconvolution.hpp"
#include "gammaobf/errors.hpp"
#include "gammaobf/noise_model.hpp"
#include "gammaobf/numerics.hpp"
#include "gammaobf/optimizer.hpp"
#include "gammaobf/rng.hpp"

namespace gammaobf {

enum class Law { kExponential, kStandardNormal, kLaplace, kUniform };

inline constexpr Law kAllLaws[] = {Law::kExponential, Law::kStandardNormal, Law::kLaplace,
                                   Law::kUniform};

inline std::string_view law_name(Law law) {
  switch (law) {
    case Law::kExponential: return "exponential";
    case Law::kStandardNormal: return "normal";
    case Law::kLaplace: return "laplace";
    case Law::kUniform: return "uniform";
  }
  return "";
}

inline std::optional<Law> parse_law(std::string_view name) {
  for (Law law : kAllLaws) {
    if (law_name(law) == name) return law;
  }
  return std::nullopt;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ReferenceLaw {
  Law law;
  std::function<double(Rng&)> sampler;
  std::function<double(double)> cdf;
  Interval error_range;
};

// Exponential(mean 1), N(0, 1), Laplace(0, 10), Uniform(0, 10). Error ranges:
// (-3, 3) for the normal, the support for the uniform, and the central
// 0.9999 quantile range for the other two.
inline ReferenceLaw reference_law(Law law) {
  switch (law) {
    case Law::kExponential:
      return {law, [](Rng& r) { return r.exponential(); },
              [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); },
              {0.0, -std::log(1e-4)}};
    case Law::kStandardNormal:
      return {law, [](Rng& r) { return r.normal(); },
              [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); },
              {-3.0, 3.0}};
    case Law::kLaplace: {
      const double q = -10.0 * std::log(2e-4);
      return {law, [](Rng& r) { return 10.0 * r.sign() * r.exponential(); },
              [](double x) {
                return x < 0.0 ? 0.5 * std::exp(x / 10.0) : 1.0 - 0.5 * std::exp(-x / 10.0);
              },
              {-q, q}};
    }
    case Law::kUniform:
      return {law, [](Rng& r) { return 10.0 * r.uniform(); },
              [](double x) { return std::clamp(x / 10.0, 0.0, 1.0); },
              {0.0, 10.0}};
  }
  throw ParameterError("unknown law");
}

// Linear interpolation of the estimated CDF; constant beyond the grid ends.
inline double interpolate_cdf(const DensityEstimate& est, double x) {
  const auto& g = est.grid;
  if (x <= g.front()) return est.cdf.front();
  if (x >= g.back()) return est.cdf.back();
  const auto it = std::upper_bound(g.begin(), g.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - g.begin());
  const double w = (x - g[i - 1]) / (g[i] - g[i - 1]);
  return est.cdf[i - 1] + w * (est.cdf[i] - est.cdf[i - 1]);
}

// Mean squared CDF error over grid_size equidistant points spanning range.
inline double cdf_error(const DensityEstimate& est, const std::function<double(double)>& true_cdf,
                        Interval range, std::size_t grid_size) {
  if (grid_size < 2) throw ParameterError("error grid needs at least two points");
  if (est.grid.empty() || est.cdf.size() != est.grid.size()) {
    throw ParameterError("estimate has no CDF");
  }
  CompensatedSum sum;
  for (double x : linspace(range.lo, range.hi, grid_size)) {
    const double e = interpolate_cdf(est, x) - true_cdf(x);
    sum += e * e;
  }
  return sum.value() / static_cast<double>(grid_size);
}

struct StudyConfig {
  Law distribution = Law::kStandardNormal;
  std::size_t n = 1000;
  PrivacyBudget budget{0.75, 0.9};
  std::size_t replications = 500;
  std::size_t error_grid_size = 201;
  std::uint64_t base_seed = 1;
  std::vector<double> shape_grid = default_shape_grid();
  BiasConstant bias = BiasConstant::kKernel;
  std::size_t output_grid_size = kDefaultOutputGridSize;
  // false: select the optimal pair on replication 0 and reuse it.
  bool reselect_each_replication = true;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (n < 2) throw ParameterError("sample size must be at least 2");
    if (replications < 1) throw ParameterError("at least one replication is required");
    if (error_grid_size < 2) throw ParameterError("error grid needs at least two points");
    if (output_grid_size < 2) throw ParameterError("output grid needs at least two points");
    budget.validate();
    if (shape_grid.empty()) throw ParameterError("empty shape grid");
  }
};

struct ReplicationRecord {
  std::size_t rep = 0;
  double sampling_error = 0.0;
  double laplace_error = 0.0;
  double optimal_error = 0.0;
  double theta_star = 0.0;
  double eta_star = 0.0;
  double laplace_scale = 0.0;
  bool ok = false;
  std::string failure;
};

struct StudyReport {
  double sampling_error = 0.0;  // S_e
  double laplace_error = 0.0;   // L_e
  double optimal_error = 0.0;   // O_e
  double frac_laplace = 0.0;    // (L_e - S_e) / L_e
  double frac_optimal = 0.0;    // (O_e - S_e) / O_e
  double ratio = 0.0;           // (L_e - S_e) / (O_e - S_e)
  GammaNoiseParams optimal_params;
  std::size_t replications_used = 0;
  std::size_t replications_dropped = 0;
  bool valid = false;  // at most 5% of replications dropped
  std::vector<ReplicationRecord> trace;
  StudyConfig config;
};

inline std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rep) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(rep));
}

namespace detail {

inline std::vector<double> add_noise(std::span<const double> x, const GammaNoiseParams& p,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> z(x.begin(), x.end());
  for (double& v : z) v += sample_one(p, rng);
  return z;
}

inline double masked_error(std::span<const double> x, const GammaNoiseParams& p,
                           std::uint64_t noise_seed, const ReferenceLaw& law,
                           const StudyConfig& cfg) {
  const std::vector<double> z = add_noise(x, p, noise_seed);
  const auto est =
      estimate_from_masked(z, p, default_output_grid(z, cfg.output_grid_size), cfg.bias);
  return cdf_error(est, law.cdf, law.error_range, cfg.error_grid_size);
}

}  // namespace detail

// One replication. The Laplace and optimal masks draw from the same noise
// stream, so the two errors differ only through the noise law.
inline ReplicationRecord run_replication(const StudyConfig& cfg, std::size_t rep,
                                         const std::optional<GammaNoiseParams>& fixed_optimal) {
  ReplicationRecord rec;
  rec.rep = rep;
  try {
    const ReferenceLaw law = reference_law(cfg.distribution);
    const std::uint64_t seed = replication_seed(cfg.base_seed, rep);
    Rng data_rng(mix_seed(seed, 0));
    std::vector<double> x(cfg.n);
    for (double& v : x) v = law.sampler(data_rng);
    const std::uint64_t noise_seed = mix_seed(seed, 1);

    const auto clean = noise_free_estimate(x, default_output_grid(x, cfg.output_grid_size), cfg.bias);
    rec.sampling_error = cdf_error(clean, law.cdf, law.error_range, cfg.error_grid_size);

    const DatasetSummary data(x);
    const MeasureGrid grid(data);
    const GammaNoiseParams laplace{1.0, calibrate_scale_detailed(grid, 1.0, cfg.budget).scale};
    rec.laplace_scale = laplace.scale;
    rec.laplace_error = detail::masked_error(x, laplace, noise_seed, law, cfg);

    GammaNoiseParams optimal;
    if (fixed_optimal) {
      optimal = *fixed_optimal;
    } else {
      optimal = select_noise(data, cfg.budget, cfg.shape_grid, cfg.bias).optimal_params();
    }
    rec.theta_star = optimal.shape;
    rec.eta_star = optimal.scale;
    rec.optimal_error = detail::masked_error(x, optimal, noise_seed, law, cfg);
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.failure = e.what();
  }
  return rec;
}

// Runs every replication (concurrently when threads allow) and aggregates
// in replication order.
inline StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<ReplicationRecord> trace(cfg.replications);

  std::optional<GammaNoiseParams> fixed;
  std::size_t first = 0;
  if (!cfg.reselect_each_replication) {
    trace[0] = run_replication(cfg, 0, std::nullopt);
    if (trace[0].ok) fixed = GammaNoiseParams{trace[0].theta_star, trace[0].eta_star};
    else throw NumericalError("pilot replication failed: " + trace[0].failure);
    first = 1;
  }

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.replications - first));
  std::atomic<std::size_t> next{first};
  auto worker = [&]() {
    for (std::size_t r = next++; r < cfg.replications; r = next++) {
      trace[r] = run_replication(cfg, r, fixed);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  StudyReport rep;
  rep.config = cfg;
  CompensatedSum s_sum, l_sum, o_sum;
  std::map<double, std::vector<double>> scales_by_shape;
  for (const auto& r : trace) {
    if (!r.ok) {
      ++rep.replications_dropped;
      continue;
    }
    ++rep.replications_used;
    s_sum += r.sampling_error;
    l_sum += r.laplace_error;
    o_sum += r.optimal_error;
    scales_by_shape[r.theta_star].push_back(r.eta_star);
  }
  if (rep.replications_used == 0) throw NumericalError("every replication failed");
  const double used = static_cast<double>(rep.replications_used);
  rep.sampling_error = s_sum.value() / used;
  rep.laplace_error = l_sum.value() / used;
  rep.optimal_error = o_sum.value() / used;
  rep.frac_laplace = (rep.laplace_error - rep.sampling_error) / rep.laplace_error;
  rep.frac_optimal = (rep.optimal_error - rep.sampling_error) / rep.optimal_error;
  const double denom = rep.optimal_error - rep.sampling_error;
  rep.ratio = denom != 0.0 ? (rep.laplace_error - rep.sampling_error) / denom
                           : std::numeric_limits<double>::infinity();
  rep.valid = static_cast<double>(rep.replications_dropped) <=
              0.05 * static_cast<double>(cfg.replications);

  // modal shape (ties to the larger), median scale among its replications
  auto mode = scales_by_shape.begin();
  for (auto it = scales_by_shape.begin(); it != scales_by_shape.end(); ++it) {
    if (it->second.size() >= mode->second.size()) mode = it;
  }
  std::vector<double> scales = mode->second;
  std::sort(scales.begin(), scales.end());
  const std::size_t m = scales.size();
  const double median = m % 2 ? scales[m / 2] : 0.5 * (scales[m / 2 - 1] + scales[m / 2]);
  rep.optimal_params = {mode->first, median};
  rep.trace = std::move(trace);
  return rep;
}

}  // namespace gammaobf

#endif  // GAMMAOBF_EVALUATION_HPP_
