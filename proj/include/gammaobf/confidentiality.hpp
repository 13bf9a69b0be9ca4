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

// Disclosure-risk measures for additive noise.
//
// The conditional localization probability
//
//   M(z, eps) = P(|X - Z| <= eps * sd_X | Z = z)
//
// is available in three forms here: by quadrature from known densities
// (true_measure), in closed form for normal data with normal noise
// (normal_normal_mu), and as a plug-in statistic over a dataset with
// two-sided Gamma noise (empirical_M and MeasureGrid). The confidentiality
// level mu(delta) is the smallest eps for which sup_z M(z, eps) reaches delta.

#ifndef GAMMAOBF_CONFIDENTIALITY_HPP_
#define GAMMAOBF_CONFIDENTIALITY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gammaobf/errors.hpp"
#include "gammaobf/noise_model.hpp"
#include "gammaobf/numerics.hpp"

namespace gammaobf {

struct PrivacyBudget {
  double deviation_multiplier = 0.75;  // Q, in units of sd_X
  double level = 0.9;                  // delta

  void validate() const {
    if (!(deviation_multiplier > 0.0) || !std::isfinite(deviation_multiplier)) {
      throw ParameterError("deviation multiplier must be positive and finite");
    }
    if (!(level > 0.0 && level < 1.0)) {
      throw ParameterError("level must lie in (0, 1)");
    }
  }
};

struct MeasureCurve {
  std::vector<double> z_grid;
  std::vector<double> values;
  double epsilon = 0.0;
};

// The confidential data with its sample standard deviation (divisor n - 1).
class DatasetSummary {
 public:
  explicit DatasetSummary(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw DataError("at least two observations are required");
    }
    CompensatedSum sum;
    for (double v : values_) {
      if (!std::isfinite(v)) throw DataError("non-finite observation");
      sum += v;
    }
    mean_ = sum.value() / static_cast<double>(values_.size());
    CompensatedSum ss;
    for (double v : values_) ss += (v - mean_) * (v - mean_);
    sd_ = std::sqrt(ss.value() / static_cast<double>(values_.size() - 1));
    if (!(sd_ > 0.0)) throw DataError("constant dataset (zero standard deviation)");
  }

  const std::vector<double>& values() const { return values_; }
  double sd() const { return sd_; }
  double mean() const { return mean_; }
  std::size_t n() const { return values_.size(); }

 private:
  std::vector<double> values_;
  double mean_ = 0.0;
  double sd_ = 0.0;
};

using DensityFn = std::function<double(double)>;

inline constexpr double kSupportFloor = 1e-300;

// M(z, eps) from known data density g and noise density f by quadrature.
inline double true_measure(const DensityFn& g, const DensityFn& f, double sigma_x,
                           double z, double epsilon) {
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be non-negative");
  if (!(sigma_x > 0.0)) throw ParameterError("sigma_x must be positive");
  auto integrand = [&](double x) { return g(z - x) * f(x); };
  const double lo = std::min(0.0, z);
  const double hi = std::max(0.0, z);

  // Breakpoints at the noise singularity (0) and the data mode region (z).
  double total = integrate(integrand, -kInf, lo) + integrate(integrand, hi, kInf);
  if (hi > lo) total += integrate(integrand, lo, hi);
  if (!(total > kSupportFloor)) {
    throw DegenerateSupportError("conditional density of the noise vanishes at z = " +
                                 std::to_string(z));
  }
  const double r = epsilon * sigma_x;
  if (r == 0.0) return 0.0;

  // Outside mass first: when it is small the window holds most of the mass
  // and 1 - outside/total is accurate even for very wide windows.
  const double outside = integrate(integrand, -kInf, -r) + integrate(integrand, r, kInf);
  double m;
  if (outside < 0.5 * total) {
    m = 1.0 - outside / total;
  } else {
    std::vector<double> cuts{-r, 0.0, r};
    if (z > -r && z < r && z != 0.0) cuts.push_back(z);
    std::sort(cuts.begin(), cuts.end());
    double inside = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      inside += integrate(integrand, cuts[i], cuts[i + 1]);
    }
    m = inside / total;
  }
  return std::clamp(m, 0.0, 1.0);
}

// Smallest eps with sup_z M(z, eps) >= delta for known densities, the sup
// being taken over [z_lo, z_hi] (grid scan refined by golden section).
inline double true_mu(const DensityFn& g, const DensityFn& f, double sigma_x,
                      double delta, double z_lo, double z_hi,
                      double tol = 1e-9) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (!(z_hi > z_lo)) throw ParameterError("empty z range");
  auto sup_over_z = [&](double eps) {
    const std::vector<double> zs = linspace(z_lo, z_hi, 41);
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t k = 0; k < zs.size(); ++k) {
      const double v = true_measure(g, f, sigma_x, zs[k], eps);
      if (v > best_val) {
        best_val = v;
        best = k;
      }
    }
    const double a = zs[best == 0 ? 0 : best - 1];
    const double b = zs[best + 1 == zs.size() ? best : best + 1];
    const double z_star = golden_section_minimize(
        [&](double z) { return -true_measure(g, f, sigma_x, z, eps); }, a, b,
        1e-9 * (z_hi - z_lo));
    return std::max(best_val, true_measure(g, f, sigma_x, z_star, eps));
  };
  double lo = 0.0;
  double hi = 1.0;
  while (sup_over_z(hi) < delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw NumericalError("measure never reaches delta");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (sup_over_z(mid) >= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Closed form for X ~ N(0, sigma_x^2), Y ~ N(0, sigma_y^2):
// tau_{(1+delta)/2} / sqrt(1 + sigma_x^2 / sigma_y^2).
inline double normal_normal_mu(double sigma_x, double sigma_y, double delta) {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) {
    throw ParameterError("standard deviations must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  const double tau = boost::math::quantile(boost::math::normal_distribution<double>(),
                                           0.5 * (1.0 + delta));
  const double ratio = sigma_x / sigma_y;
  return tau / std::sqrt(1.0 + ratio * ratio);
}

namespace detail {

// Noise weights enter the plug-in measure only through ratios, so the
// normalizing constant of the density is dropped:
//   w(d) = d^(shape-1) exp(-d / scale).
// The positivity restriction (sum of weights > 0) is applied to these
// unnormalized weights.
struct PlugInSums {
  double inside = 0.0;
  double total = 0.0;
  bool singular = false;  // some d == 0 with shape < 1
};

template <class LogDistance>
inline PlugInSums plug_in_sums(std::span<const double> values, double z,
                               const GammaNoiseParams& f, double radius,
                               LogDistance&& log_distance) {
  PlugInSums s;
  const double shape_m1 = f.shape - 1.0;
  const double inv_scale = 1.0 / f.scale;
  const bool laplace = shape_m1 == 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = std::abs(z - values[i]);
    if (d == 0.0 && shape_m1 < 0.0) {
      s.singular = true;
      continue;
    }
    double a = -d * inv_scale;
    if (!laplace) a += shape_m1 * log_distance(i, d);
    const double w = std::exp(a);
    s.total += w;
    if (d <= radius) s.inside += w;
  }
  return s;
}

}  // namespace detail

// Plug-in measure at z over raw values with a given standard deviation.
// Throws UndefinedPointError when z is a data point and shape < 1, and
// ExcludedPointError when every weight underflows.
inline double empirical_M(std::span<const double> values, double sd,
                          const GammaNoiseParams& f, double z, double epsilon) {
  f.validate();
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be non-negative");
  if (!(sd > 0.0)) throw ParameterError("standard deviation must be positive");
  if (values.empty()) throw ParameterError("empty data");
  const auto s = detail::plug_in_sums(values, z, f, epsilon * sd,
                                      [](std::size_t, double d) { return std::log(d); });
  if (s.singular) {
    throw UndefinedPointError("measure undefined at a data point (z = " +
                              std::to_string(z) + ")");
  }
  if (!(s.total > 0.0)) {
    throw ExcludedPointError("all noise weights vanish at z = " + std::to_string(z));
  }
  return s.inside / s.total;
}

inline double empirical_M(const DatasetSummary& data, const GammaNoiseParams& f,
                          double z, double epsilon) {
  return empirical_M(data.values(), data.sd(), f, z, epsilon);
}

inline constexpr std::size_t kDefaultMeasureGridSize = 1024;

// Equally spaced evaluation points over [min - 3 sd, max + 3 sd]; points
// that coincide with a datum are moved by half a grid step.
inline std::vector<double> measure_evaluation_grid(std::span<const double> values,
                                                   double sd,
                                                   std::size_t size = kDefaultMeasureGridSize) {
  if (size < 2) throw ParameterError("measure grid needs at least two points");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> grid = linspace(sorted.front() - 3.0 * sd, sorted.back() + 3.0 * sd, size);
  const double step = grid[1] - grid[0];
  auto collides = [&](double z) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), z);
    const double tol = 1e-12 * std::max({std::abs(z), sd, 1e-300});
    if (it != sorted.end() && std::abs(*it - z) <= tol) return true;
    if (it != sorted.begin() && std::abs(*std::prev(it) - z) <= tol) return true;
    return false;
  };
  for (double& z : grid) {
    double shift = 0.5 * step;
    while (collides(z) && shift > 1e-6 * step) {
      z += shift;
      shift *= 0.5;
    }
  }
  return grid;
}

// Plug-in measure evaluated over the fixed evaluation grid of one dataset.
// Log-distances are cached when the grid x data product is moderate, since
// they do not depend on the noise parameters.
class MeasureGrid {
 public:
  static constexpr std::size_t kMaxCachedPairs = std::size_t{1} << 22;

  explicit MeasureGrid(const DatasetSummary& data,
                       std::size_t grid_size = kDefaultMeasureGridSize)
      : values_(data.values()),
        sd_(data.sd()),
        z_(measure_evaluation_grid(values_, sd_, grid_size)) {
    const std::size_t n = values_.size();
    if (z_.size() * n <= kMaxCachedPairs) {
      log_distance_.resize(z_.size() * n);
      for (std::size_t k = 0; k < z_.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          log_distance_[k * n + i] = std::log(std::abs(z_[k] - values_[i]));
        }
      }
    }
  }

  const std::vector<double>& z() const { return z_; }
  double sd() const { return sd_; }
  std::span<const double> values() const { return values_; }

  // M-hat at grid point k for an absolute window radius; NaN where undefined
  // or excluded.
  double at(std::size_t k, const GammaNoiseParams& f, double radius) const {
    const std::size_t n = values_.size();
    const double z = z_[k];
    detail::PlugInSums s;
    if (log_distance_.empty()) {
      s = detail::plug_in_sums(values_, z, f, radius,
                               [](std::size_t, double d) { return std::log(d); });
    } else {
      const double* row = log_distance_.data() + k * n;
      s = detail::plug_in_sums(values_, z, f, radius,
                               [row](std::size_t i, double) { return row[i]; });
    }
    if (s.singular || !(s.total > 0.0) || !std::isfinite(s.total)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return s.inside / s.total;
  }

  // Grid supremum of M-hat at window radius epsilon * sd. NaN when no grid
  // point is defined.
  double sup(const GammaNoiseParams& f, double epsilon) const {
    f.validate();
    const double radius = epsilon * sd_;
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < z_.size(); ++k) {
      const double m = at(k, f, radius);
      if (!std::isnan(m) && !(m <= best)) best = m;
    }
    return best;
  }

  MeasureCurve curve(const GammaNoiseParams& f, double epsilon) const {
    f.validate();
    MeasureCurve c;
    c.epsilon = epsilon;
    for (std::size_t k = 0; k < z_.size(); ++k) {
      const double m = at(k, f, epsilon * sd_);
      if (std::isnan(m)) continue;
      c.z_grid.push_back(z_[k]);
      c.values.push_back(m);
    }
    return c;
  }

  // Smallest eps (to 1e-4) with sup M-hat >= delta, by bisection on
  // [0, range / sd + 1].
  double mu(const GammaNoiseParams& f, double delta) const {
    f.validate();
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    const auto [mn, mx] = std::minmax_element(values_.begin(), values_.end());
    double lo = 0.0;
    double hi = (*mx - *mn) / sd_ + 1.0;
    while (hi - lo > 1e-4) {
      const double mid = 0.5 * (lo + hi);
      if (sup(f, mid) >= delta) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

 private:
  std::vector<double> values_;
  double sd_;
  std::vector<double> z_;
  std::vector<double> log_distance_;
};

inline double sup_empirical_M(const DatasetSummary& data, const GammaNoiseParams& f,
                              double epsilon) {
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be non-negative");
  return MeasureGrid(data).sup(f, epsilon);
}

inline double empirical_mu(const DatasetSummary& data, const GammaNoiseParams& f,
                           double delta) {
  return MeasureGrid(data).mu(f, delta);
}

// Plug-in measure with an arbitrary noise density f (normalization not
// required). Used to check the estimator against the normal-normal case.
inline double empirical_M(std::span<const double> values, double sd, const DensityFn& f,
                          double z, double epsilon) {
  if (!(epsilon >= 0.0)) throw ParameterError("epsilon must be non-negative");
  CompensatedSum inside, total;
  for (double x : values) {
    const double w = f(z - x);
    total += w;
    if (std::abs(z - x) <= epsilon * sd) inside += w;
  }
  if (!(total.value() > 0.0) || !std::isfinite(total.value())) {
    throw ExcludedPointError("all noise weights vanish at z = " + std::to_string(z));
  }
  return inside.value() / total.value();
}

inline double empirical_mu(const DatasetSummary& data, const DensityFn& f, double delta,
                           std::size_t grid_size = kDefaultMeasureGridSize) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  const auto z = measure_evaluation_grid(data.values(), data.sd(), grid_size);
  auto sup = [&](double eps) {
    double best = 0.0;
    for (double zk : z) {
      try {
        best = std::max(best, empirical_M(data.values(), data.sd(), f, zk, eps));
      } catch (const ExcludedPointError&) {
      }
    }
    return best;
  };
  const auto [mn, mx] = std::minmax_element(data.values().begin(), data.values().end());
  double lo = 0.0;
  double hi = (*mx - *mn) / data.sd() + 1.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (sup(mid) >= delta ? hi : lo) = mid;
  }
  return hi;
}

struct ScaleCalibration {
  double scale = 0.0;
  double sup_at_scale = 0.0;  // grid sup of M-hat at (shape, scale, Q)
  double residual = 0.0;      // sup_at_scale - delta, <= 0
  bool multiple_crossings = false;
  int evaluations = 0;
};

// Scale at which the grid sup of M-hat at eps = Q crosses delta. The
// returned scale is the upper end of the final bisection bracket, so it is
// always feasible (sup <= delta). Two look-ahead probes at 2x and 4x guard
// against a later re-crossing; when one is found the search restarts above
// it and the result is flagged.
inline ScaleCalibration calibrate_scale_detailed(const MeasureGrid& grid, double shape,
                                                 const PrivacyBudget& budget) {
  budget.validate();
  if (!(shape > 0.0 && shape <= 1.0)) {
    throw ParameterError("calibration requires 0 < shape <= 1");
  }
  const double sd = grid.sd();
  const double delta = budget.level;
  const double eta_min = 1e-6 * sd;
  const double eta_max = 1e6 * sd;

  ScaleCalibration out;
  auto sup_at = [&](double eta) {
    ++out.evaluations;
    return grid.sup(GammaNoiseParams{shape, eta}, budget.deviation_multiplier);
  };
  auto feasible = [&](double s) { return !std::isnan(s) && s <= delta; };
  auto fail = [&]() -> CalibrationError {
    return CalibrationError("no crossing of delta for shape " + std::to_string(shape) +
                            " within [1e-6 sd, 1e6 sd]");
  };

  double lo, hi, s_hi;
  double s = sup_at(sd);
  if (!feasible(s)) {
    lo = sd;
    hi = 2.0 * sd;
    while (!feasible(s_hi = sup_at(hi))) {
      lo = hi;
      hi *= 2.0;
      if (hi > eta_max) throw fail();
    }
  } else {
    hi = sd;
    s_hi = s;
    lo = 0.5 * sd;
    double s_lo;
    while (feasible(s_lo = sup_at(lo))) {
      hi = lo;
      s_hi = s_lo;
      lo *= 0.5;
      if (lo < eta_min) throw fail();
    }
  }

  for (;;) {
    double bad = 0.0;
    for (double factor : {2.0, 4.0}) {
      const double probe = hi * factor;
      if (probe <= eta_max && !feasible(sup_at(probe))) bad = probe;
    }
    if (bad == 0.0) break;
    out.multiple_crossings = true;
    lo = bad;
    hi = 2.0 * bad;
    while (!feasible(s_hi = sup_at(hi))) {
      lo = hi;
      hi *= 2.0;
      if (hi > eta_max) throw fail();
    }
  }

  while (hi - lo > 1e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double sm = sup_at(mid);
    if (feasible(sm)) {
      hi = mid;
      s_hi = sm;
    } else {
      lo = mid;
    }
  }
  out.scale = hi;
  out.sup_at_scale = s_hi;
  out.residual = s_hi - delta;
  return out;
}

inline double calibrate_scale(const DatasetSummary& data, double shape,
                              const PrivacyBudget& budget) {
  return calibrate_scale_detailed(MeasureGrid(data), shape, budget).scale;
}

// Scale with P(|Y| < epsilon) = 1 - delta, i.e. the Gamma(shape, scale)
// CDF of |Y| equals 1 - delta at epsilon. Bisection on log(scale).
inline double fixed_quantile_scale(double shape, double epsilon, double delta) {
  if (!(shape > 0.0 && shape <= 1.0)) throw ParameterError("shape must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  const double target = 1.0 - delta;
  // gamma_p(shape, epsilon / eta) decreases in eta
  double lo = std::log(epsilon) - 60.0;
  double hi = std::log(epsilon) + 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = boost::math::gamma_p(shape, epsilon / std::exp(mid));
    if (cdf > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

// P(|X - z| > epsilon | Z = z) along z_grid, with an absolute epsilon.
inline MeasureCurve conditional_tail_curve(const DensityFn& g, const DensityFn& f,
                                           double epsilon, std::span<const double> z_grid) {
  MeasureCurve c;
  c.epsilon = epsilon;
  c.z_grid.assign(z_grid.begin(), z_grid.end());
  c.values.reserve(z_grid.size());
  for (double z : z_grid) c.values.push_back(1.0 - true_measure(g, f, 1.0, z, epsilon));
  return c;
}

}  // namespace gammaobf

#endif  // GAMMAOBF_CONFIDENTIALITY_HPP_
