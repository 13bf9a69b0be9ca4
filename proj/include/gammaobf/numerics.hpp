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

// Numerical building blocks shared by the modules: Gauss-Legendre rules,
// adaptive Gauss-Kronrod integration, golden-section minimization,
// compensated summation and isotonic projection.

#ifndef GAMMAOBF_NUMERICS_HPP_
#define GAMMAOBF_NUMERICS_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gammaobf/errors.hpp"

namespace gammaobf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Computes the rule by Newton iteration on the Legendre recurrence.
inline GaussLegendreRule make_gauss_legendre(std::size_t n) {
  if (n == 0) throw ParameterError("Gauss-Legendre rule needs at least one node");
  GaussLegendreRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Shared 256-point rule used by the deconvolution integrals.
inline const GaussLegendreRule& gauss_legendre_256() {
  static const GaussLegendreRule rule = make_gauss_legendre(256);
  return rule;
}

// Fixed-rule integral of f over [a, b].
template <class F>
double integrate_fixed(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return half * sum;
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive 21-point Gauss-Kronrod integration; either bound may be infinite.
// Endpoints are never evaluated, so integrable endpoint singularities are
// admissible (convergence is slower there).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    double rel_tol = 1e-11,
                                    unsigned max_depth = 20) {
  QuadratureResult out;
  if (a == b) return out;
  double l1 = 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  if (std::isfinite(a) && std::isfinite(b)) {
    // Boost 1.74 compares an unscaled local error against a scaled estimate,
    // which never converges on very short intervals; integrate over [-1, 1].
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double u) { return static_cast<double>(f(mid + half * u)) * half; };
    out.value = Rule::integrate(g, -1.0, 1.0, max_depth, rel_tol, &out.error, &l1);
  } else {
    auto g = [&f](double x) { return static_cast<double>(f(x)); };
    out.value = Rule::integrate(g, a, b, max_depth, rel_tol, &out.error, &l1);
  }
  if (!std::isfinite(out.value)) {
    throw NumericalError("adaptive quadrature produced a non-finite value");
  }
  if (out.error > 1e-6 * std::max(1.0, l1)) {
    throw NumericalError("adaptive quadrature did not converge (error estimate " +
                         std::to_string(out.error) + ")");
  }
  return out;
}

template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-11) {
  return integrate_adaptive(std::forward<F>(f), a, b, rel_tol).value;
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Minimizes a unimodal f on [lo, hi] by golden-section search; stops when
// the bracket is narrower than tol. Returns the abscissa of the minimum.
template <class F>
double golden_section_minimize(F&& f, double lo, double hi, double tol,
                               int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Bracket [lo, hi] around a local minimum of f, starting from x0 with step h.
// Returns (lo, hi) with an interior point below both ends.
template <class F>
std::pair<double, double> bracket_minimum(F&& f, double x0, double h,
                                          int max_steps = 200) {
  double a = x0;
  double b = x0 + h;
  double fa = f(a);
  double fb = f(b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
    h = -h;
  }
  // fb <= fa: keep walking downhill from b.
  for (int step = 0; step < max_steps; ++step) {
    h *= 1.6;
    const double c = b + h;
    const double fc = f(c);
    if (fc >= fb) {
      return a < c ? std::pair{a, c} : std::pair{c, a};
    }
    a = b;
    fa = fb;
    b = c;
    fb = fc;
  }
  throw NumericalError("failed to bracket a minimum");
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

// Least-squares non-decreasing projection (pool adjacent violators).
inline std::vector<double> isotonic_nondecreasing(std::span<const double> y) {
  std::vector<double> level;
  std::vector<std::size_t> count;
  level.reserve(y.size());
  count.reserve(y.size());
  for (double v : y) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const std::size_t c2 = count.back();
      const double l2 = level.back();
      level.pop_back();
      count.pop_back();
      const std::size_t c1 = count.back();
      level.back() = (level.back() * static_cast<double>(c1) +
                      l2 * static_cast<double>(c2)) /
                     static_cast<double>(c1 + c2);
      count.back() = c1 + c2;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (std::size_t b = 0; b < level.size(); ++b) {
    out.insert(out.end(), count[b], level[b]);
  }
  return out;
}

// Sample variance with divisor n - 1.
inline double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw ParameterError("variance needs at least two values");
  CompensatedSum sum;
  for (double x : v) sum += x;
  const double mean = sum.value() / static_cast<double>(v.size());
  CompensatedSum ss;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss.value() / static_cast<double>(v.size() - 1);
}

inline bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

}  // namespace gammaobf

#endif  // GAMMAOBF_NUMERICS_HPP_
