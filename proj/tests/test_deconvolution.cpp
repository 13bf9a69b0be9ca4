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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gammaobf/confidentiality.hpp"
#include "gammaobf/deconvolution.hpp"
#include "gammaobf/numerics.hpp"
#include "gammaobf/rng.hpp"
#include "oracles.hpp"

namespace gammaobf {
namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

std::vector<double> masked_sample(std::size_t n, const GammaNoiseParams& p, std::uint64_t seed) {
  auto x = normal_sample(n, seed);
  const auto y = sample(p, n, seed + 1);
  for (std::size_t i = 0; i < n; ++i) x[i] += y[i];
  return x;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(KernelFtTest, Examples) {
  EXPECT_EQ(kernel_ft(0.0), 1.0);
  EXPECT_EQ(kernel_ft(1.0), 0.0);
  EXPECT_EQ(kernel_ft(-1.0), 0.0);
  EXPECT_EQ(kernel_ft(0.5), 0.421875);
  EXPECT_EQ(kernel_ft(3.0), 0.0);
}

TEST(KernelFtTest, SquaredIntegral) {
  const double v = oracle::gk([](double u) { return std::pow(1.0 - u * u, 6); }, -1.0, 1.0);
  EXPECT_NEAR(kKernelFtSquaredIntegral, v, 1e-14);
  EXPECT_NEAR(kKernelFtSquaredIntegral, 0.681984681984682, 1e-15);
}

TEST(RoughnessTest, Examples) {
  EXPECT_NEAR(normal_reference_roughness(1.0), 0.21157109383040862, 1e-15);
  EXPECT_NEAR(normal_reference_roughness(4.0), 0.006611596682200269, 1e-16);
}

TEST(RoughnessTest, ScalingLaw) {
  for (double v : {0.3, 1.0, 7.5}) {
    for (double c : {0.5, 2.0, 10.0}) {
      EXPECT_NEAR(normal_reference_roughness(c * c * v),
                  std::pow(c, -5.0) * normal_reference_roughness(v),
                  1e-13 * normal_reference_roughness(c * c * v));
    }
  }
}

TEST(RoughnessTest, MatchesNormalSecondDerivative) {
  // R(g'') for g = N(0, s^2), by quadrature of (g'')^2
  const double s = 1.7;
  auto g2 = [s](double x) {
    const double z = x / s;
    const double phi = std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    const double d2 = (z * z - 1.0) / (s * s) * phi;
    return d2 * d2;
  };
  EXPECT_NEAR(normal_reference_roughness(s * s), oracle::gk(g2, -15.0 * s, 15.0 * s), 1e-12);
}

TEST(BiasConstantTest, ValuesAndNames) {
  EXPECT_EQ(bias_constant_value(BiasConstant::kLegacy), 11520.0);
  EXPECT_EQ(bias_constant_value(BiasConstant::kKernel), 36.0);
  EXPECT_EQ(parse_bias_constant("legacy"), BiasConstant::kLegacy);
  EXPECT_EQ(parse_bias_constant("kernel"), BiasConstant::kKernel);
  EXPECT_FALSE(parse_bias_constant("other").has_value());
  EXPECT_EQ(to_string(BiasConstant::kKernel), "kernel");
}

TEST(BiasConstantTest, KernelConstantIsSquaredSecondMoment) {
  // mu_{K,2} = -K~''(0), by central difference
  const double h = 1e-4;
  const double second = (kernel_ft(h) - 2.0 * kernel_ft(0.0) + kernel_ft(-h)) / (h * h);
  EXPECT_NEAR(second * second, bias_constant_value(BiasConstant::kKernel), 1e-5);
}

// --- AIMSE ---------------------------------------------------------------

TEST(AimseTest, VarianceTermMatchesFrequencyDomainForm) {
  for (double shape : {0.2, 0.5, 0.8, 1.0}) {
    for (double scale : {0.3, 1.0, 4.0}) {
      for (double b : {0.05, 0.3, 1.0, 6.0}) {
        const GammaNoiseParams p{shape, scale};
        const double ours = aimse_variance_term(p, b, 1000);
        const double direct = oracle::direct_aimse_variance(p, b, 1000);
        EXPECT_NEAR(ours / direct, 1.0, 1e-9) << shape << " " << scale << " " << b;
      }
    }
  }
}

TEST(AimseTest, FixedRuleMatchesAdaptiveQuadrature) {
  for (double shape : {0.3, 1.0}) {
    for (double b : {0.02, 0.2, 2.0}) {
      const double eta = 1.5;
      const double ratio = b / eta;
      auto integrand = [&](double theta) {
        const double s = ratio * std::tan(theta);
        const double u = 1.0 - s * s;
        const double c = std::pow(std::cos(theta), shape + 1.0) * std::cos(shape * theta);
        return std::pow(u, 6) / (c * c);
      };
      const double adaptive = 2.0 / eta * integrate(integrand, 0.0, std::atan(eta / b), 1e-13);
      EXPECT_NEAR(kernel_noise_l2(GammaNoiseParams{shape, eta}, b) / adaptive, 1.0, 1e-9);
    }
  }
}

TEST(AimseTest, NoiseFreeClosedForm) {
  EXPECT_NEAR(kernel_noise_l2(std::nullopt, 0.5), 2.0 * 0.681984681984682, 1e-14);
}

TEST(AimseTest, VarianceVanishesForLargeBandwidth) {
  const GammaNoiseParams p{0.7, 1.0};
  double prev = aimse_variance_term(p, 1.0, 100);
  for (double b : {10.0, 100.0, 1000.0}) {
    const double v = aimse_variance_term(p, b, 100);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-5);
  const double r = normal_reference_roughness(1.0);
  const double bias = aimse(1000.0, p, r, 100) - aimse_variance_term(p, 1000.0, 100);
  const double bias2 = aimse(2000.0, p, r, 100) - aimse_variance_term(p, 2000.0, 100);
  EXPECT_NEAR(bias2 / bias, 16.0, 1e-9);
}

TEST(AimseTest, DoublingSampleSizeHalvesVariance) {
  const GammaNoiseParams p{0.4, 2.0};
  EXPECT_DOUBLE_EQ(aimse_variance_term(p, 0.3, 1000), 2.0 * aimse_variance_term(p, 0.3, 2000));
}

TEST(AimseTest, RejectsBadBandwidth) {
  EXPECT_THROW(aimse_variance_term(GammaNoiseParams{0.5, 1.0}, 0.0, 10), ParameterError);
  EXPECT_THROW(aimse_variance_term(GammaNoiseParams{0.5, 1.0}, -1.0, 10), ParameterError);
}

TEST(AimseTest, VanishingTransformInsideSupportIsReported) {
  // shape 2 vanishes at t = 1/eta, inside the support when b < eta
  EXPECT_THROW(kernel_noise_l2(GammaNoiseParams{2.0, 1.0}, 0.5), NumericalError);
}

// --- bandwidth selection ---------------------------------------------------

TEST(SelectBandwidthTest, LocallyOptimal) {
  const double r = normal_reference_roughness(1.3);
  for (BiasConstant c : {BiasConstant::kLegacy, BiasConstant::kKernel}) {
    for (double shape : {0.3, 0.8, 1.0}) {
      const GammaNoiseParams p{shape, 0.6};
      const auto sel = select_bandwidth(p, r, 1000, c);
      const double a = aimse(sel.bandwidth, p, r, 1000, c);
      EXPECT_LE(a, aimse(sel.bandwidth * 1.01, p, r, 1000, c));
      EXPECT_LE(a, aimse(sel.bandwidth * 0.99, p, r, 1000, c));
      EXPECT_GT(sel.aimse_at_optimum, 0.0);
      EXPECT_EQ(sel.sample_size, 1000u);
    }
  }
}

TEST(SelectBandwidthTest, ShrinksWithSampleSize) {
  const double r = normal_reference_roughness(1.0);
  const GammaNoiseParams p{1.0, 1.0};
  const double b100 = select_bandwidth(p, r, 100).bandwidth;
  const double b1000 = select_bandwidth(p, r, 1000).bandwidth;
  const double b10000 = select_bandwidth(p, r, 10000).bandwidth;
  EXPECT_GT(b100, b1000);
  EXPECT_GT(b1000, b10000);
}

TEST(SelectBandwidthTest, NoiseFreeMatchesDenseScan) {
  const double r = normal_reference_roughness(1.0);
  for (BiasConstant c : {BiasConstant::kLegacy, BiasConstant::kKernel}) {
    const std::size_t n = 1000;
    auto f = [&](double b) {
      return 0.681984681984682 / (2.0 * std::numbers::pi * n * b) +
             bias_constant_value(c) * std::pow(b, 4) / 4.0 * r;
    };
    double best_b = 0.0, best = 1e300;
    for (double lb = std::log(1e-3); lb < std::log(10.0); lb += 1e-5) {
      const double v = f(std::exp(lb));
      if (v < best) {
        best = v;
        best_b = std::exp(lb);
      }
    }
    EXPECT_NEAR(select_bandwidth(std::nullopt, r, n, c).bandwidth / best_b, 1.0, 1e-4);
  }
}

TEST(SelectBandwidthTest, LargerConstantGivesSmallerBandwidth) {
  const double r = normal_reference_roughness(1.0);
  const GammaNoiseParams p{0.8, 0.5};
  EXPECT_LT(select_bandwidth(p, r, 1000, BiasConstant::kLegacy).bandwidth,
            select_bandwidth(p, r, 1000, BiasConstant::kKernel).bandwidth);
}

// --- estimator -------------------------------------------------------------------

TEST(EstimateDensityTest, MatchesDirectFrequencyIntegral) {
  for (const GammaNoiseParams p : {GammaNoiseParams{0.8, 1.0}, GammaNoiseParams{1.0, 2.0}}) {
    const auto z = masked_sample(50, p, 31);
    const double b = 0.4;
    const auto grid = linspace(-3.0, 3.0, 11);
    const auto est = estimate_density(z, p, b, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_NEAR(est.density[i], oracle::direct_deconvolution(z, p, b, grid[i]), 1e-6)
          << p.shape << " x=" << grid[i];
    }
  }
}

TEST(EstimateDensityTest, NormalizationWithCalibratedNoise) {
  const auto x = normal_sample(1000, 32);
  const double eta = calibrate_scale(DatasetSummary(x), 0.8, {0.75, 0.9});
  const GammaNoiseParams p{0.8, eta};
  const auto y = sample(p, x.size(), 33);
  std::vector<double> z(x);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
  const auto est = estimate_from_masked(z, p, default_output_grid(z));
  EXPECT_NEAR(est.mass, 1.0, 0.02);
  EXPECT_LE(est.cdf_overshoot, 0.05);
}

TEST(EstimateDensityTest, SymmetricPairGivesEvenEstimate) {
  const std::vector<double> z{-1.3, 1.3};
  const auto grid = linspace(-4.0, 4.0, 41);
  const auto est = estimate_density(z, GammaNoiseParams{0.6, 0.7}, 0.5, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(est.density[i], est.density[grid.size() - 1 - i], 1e-12);
  }
}

TEST(EstimateDensityTest, CdfIsMonotoneAndClamped) {
  const GammaNoiseParams p{0.5, 0.8};
  const auto z = masked_sample(200, p, 34);
  const auto est = estimate_density(z, p, 0.15, default_output_grid(z));
  EXPECT_EQ(est.cdf.front(), 0.0);
  for (std::size_t i = 0; i < est.cdf.size(); ++i) {
    ASSERT_GE(est.cdf[i], 0.0);
    ASSERT_LE(est.cdf[i], 1.0);
    if (i > 0) ASSERT_GE(est.cdf[i], est.cdf[i - 1]);
  }
}

TEST(EstimateDensityTest, RejectsBadGrid) {
  const std::vector<double> z{0.0, 1.0};
  EXPECT_THROW(estimate_density(z, GammaNoiseParams{1.0, 1.0}, 0.3, std::vector<double>{1.0, 0.0}),
               ParameterError);
  EXPECT_THROW(estimate_density(z, GammaNoiseParams{1.0, 1.0}, 0.3, std::vector<double>{}),
               ParameterError);
}

TEST(NoiseFreeEstimateTest, SmallNoiseLimit) {
  const auto x = normal_sample(300, 35);
  const auto grid = linspace(-3.0, 3.0, 61);
  const auto clean = estimate_density(x, std::nullopt, 0.3, grid);
  const auto tiny = estimate_density(x, GammaNoiseParams{1.0, 1e-4}, 0.3, grid);
  EXPECT_LE(max_abs_diff(clean.density, tiny.density), 1e-3);
}

TEST(NoiseFreeEstimateTest, Normalization) {
  const auto x = normal_sample(1000, 36);
  const auto est = noise_free_estimate(x, default_output_grid(x));
  EXPECT_NEAR(est.mass, 1.0, 0.01);
}

TEST(NoiseFreeEstimateTest, LocationEquivariance) {
  const auto x = normal_sample(200, 37);
  std::vector<double> shifted(x);
  for (double& v : shifted) v += 2.5;
  const auto grid = linspace(-3.0, 3.0, 31);
  std::vector<double> grid_shifted(grid);
  for (double& v : grid_shifted) v += 2.5;
  const auto a = estimate_density(x, std::nullopt, 0.25, grid);
  const auto b = estimate_density(shifted, std::nullopt, 0.25, grid_shifted);
  EXPECT_LE(max_abs_diff(a.density, b.density), 1e-12);
}

TEST(NoiseFreeEstimateTest, MatchesRealSpaceKernelSum) {
  // (1/n) sum K_b(x - X_j) with K_b(u) = (1/pi) int_0^{1/b} K~(t b) cos(t u) dt
  const std::vector<double> x{-0.7, 0.2, 1.1};
  const double b = 0.5;
  const auto grid = linspace(-2.0, 2.0, 9);
  const auto est = estimate_density(x, std::nullopt, b, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double expected = 0.0;
    for (double xj : x) {
      expected += oracle::gk([&](double t) { return kernel_ft(t * b) * std::cos(t * (grid[i] - xj)); },
                             0.0, 1.0 / b) / std::numbers::pi;
    }
    EXPECT_NEAR(est.density[i], expected / 3.0, 1e-10);
  }
}

TEST(DeconvolvedVarianceTest, SubtractsNoiseVarianceWithFloor) {
  const std::vector<double> z{-2.0, -1.0, 0.0, 1.0, 2.0};  // variance 2.5
  EXPECT_NEAR(deconvolved_variance(z, {1.0, 0.5}), 2.0, 1e-14);
  EXPECT_NEAR(deconvolved_variance(z, {1.0, 5.0}), 0.25, 1e-14);
}

}  // namespace
}  // namespace gammaobf
