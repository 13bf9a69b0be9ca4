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
#include <vector>

#include "gammaobf/confidentiality.hpp"
#include "gammaobf/deconvolution.hpp"
#include "gammaobf/optimizer.hpp"
#include "gammaobf/rng.hpp"

namespace gammaobf {
namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = scale * rng.normal();
  return x;
}

TEST(ObjectiveTest, IsScaledVarianceTerm) {
  for (double shape : {0.3, 0.75, 1.0}) {
    for (double b : {0.1, 0.4}) {
      const GammaNoiseParams p{shape, 0.8};
      EXPECT_NEAR(objective_J(p, b) / (2.0 * kPi * 500.0 * aimse_variance_term(p, b, 500)), 1.0,
                  1e-9);
    }
  }
}

TEST(ObjectiveTest, GrowsWithScale) {
  const double j1 = objective_J({1.0, 0.5}, 0.3);
  const double j2 = objective_J({1.0, 1.0}, 0.3);
  const double j3 = objective_J({1.0, 2.0}, 0.3);
  EXPECT_LT(j1, j2);
  EXPECT_LT(j2, j3);
}

TEST(ObjectiveTest, NoiseFreeLimit) {
  EXPECT_NEAR(objective_J({1.0, 1e-6}, 0.3) / (0.681984681984682 / 0.3), 1.0, 1e-6);
  EXPECT_NEAR(objective_J({0.4, 1e-7}, 0.3) / (0.681984681984682 / 0.3), 1.0, 1e-6);
}

TEST(ObjectiveTest, PositiveAcrossShapes) {
  for (double shape : default_shape_grid()) EXPECT_GT(objective_J({shape, 1.3}, 0.2), 0.0);
}

TEST(ShapeGridTest, DefaultGrid) {
  const auto g = default_shape_grid();
  ASSERT_EQ(g.size(), 20u);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(g[k], 0.05 * static_cast<double>(k + 1), 1e-12);
  }
  EXPECT_EQ(g.back(), 1.0);
}

TEST(ShapeGridTest, CustomGridAndValidation) {
  const auto g = make_shape_grid(0.2, 1.0, 0.2);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_NEAR(g[2], 0.6, 1e-12);
  EXPECT_THROW(make_shape_grid(0.0, 1.0, 0.1), ParameterError);
  EXPECT_THROW(make_shape_grid(0.1, 1.2, 0.1), ParameterError);
  EXPECT_THROW(make_shape_grid(0.1, 1.0, 0.0), ParameterError);
  EXPECT_THROW(make_shape_grid(0.8, 0.5, 0.1), ParameterError);
}

// --- select_optimal ----------------------------------------------------------

TEST(SelectOptimalTest, SinglePoint) {
  FrontierPoint p{0.4, 2.0, 0.3, 7.0};
  const auto r = select_optimal({p});
  EXPECT_EQ(r.optimal_shape, 0.4);
  EXPECT_EQ(r.optimal_scale, 2.0);
  EXPECT_EQ(r.optimal_objective, 7.0);
}

TEST(SelectOptimalTest, TiesGoToLargerShape) {
  std::vector<FrontierPoint> f{{0.3, 1.0, 0.2, 5.0}, {0.9, 1.5, 0.2, 5.0}, {0.6, 1.2, 0.2, 5.0}};
  EXPECT_EQ(select_optimal(f).optimal_shape, 0.9);
  f[0].objective = 5.0 * (1.0 - 1e-13);  // still a tie
  EXPECT_EQ(select_optimal(f).optimal_shape, 0.9);
  f[0].objective = 5.0 * (1.0 - 1e-9);
  EXPECT_EQ(select_optimal(f).optimal_shape, 0.3);
}

TEST(SelectOptimalTest, EmptyFrontierRejected) {
  EXPECT_THROW(select_optimal({}), ParameterError);
}

TEST(SelectOptimalProperty, ExactArgmin) {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FrontierPoint> f(1 + rng.bits() % 20);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i].shape = 0.05 * static_cast<double>(i + 1);
      f[i].calibrated_scale = 0.1 + rng.uniform();
      f[i].objective = 1.0 + 10.0 * rng.uniform();
    }
    const auto r = select_optimal(f);
    double best = f[0].objective;
    for (const auto& p : f) best = std::min(best, p.objective);
    ASSERT_EQ(r.optimal_objective, best);
    const auto it = std::find_if(f.begin(), f.end(),
                                 [&](const FrontierPoint& p) { return p.shape == r.optimal_shape; });
    ASSERT_NE(it, f.end());
    ASSERT_EQ(it->objective, best);
    ASSERT_EQ(r.optimal_scale, it->calibrated_scale);
  }
}

// --- sweep ---------------------------------------------------------------------

TEST(SweepTest, FrontierPointsAreFeasible) {
  const DatasetSummary d(normal_sample(400, 1));
  const PrivacyBudget budget{0.75, 0.9};
  std::vector<std::string> warnings;
  const auto frontier = sweep(d, budget, default_shape_grid(), BiasConstant::kKernel, &warnings);
  ASSERT_FALSE(frontier.empty());
  const MeasureGrid grid(d);
  for (const auto& p : frontier) {
    EXPECT_GT(p.calibrated_scale, 0.0);
    EXPECT_GT(p.objective, 0.0);
    EXPECT_LE(p.calibration_residual, 0.0);
    EXPECT_LE(grid.sup({p.shape, p.calibrated_scale}, budget.deviation_multiplier), budget.level);
  }
  EXPECT_TRUE(std::is_sorted(frontier.begin(), frontier.end(),
                             [](const auto& a, const auto& b) { return a.shape < b.shape; }));
}

TEST(SweepTest, FailedShapesAreOmittedWithWarning) {
  const DatasetSummary d(normal_sample(300, 2));
  std::vector<std::string> warnings;
  const std::vector<double> shapes{0.05, 0.9, 1.0};
  const auto frontier = sweep(d, {0.75, 0.9}, shapes, BiasConstant::kKernel, &warnings);
  EXPECT_EQ(frontier.size(), 2u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(SweepTest, AllShapesFailing) {
  const DatasetSummary d(normal_sample(300, 2));
  const std::vector<double> shapes{0.05};
  EXPECT_THROW(sweep(d, {0.75, 0.9}, shapes), CalibrationError);
  EXPECT_THROW(sweep(d, {0.75, 0.9}, std::vector<double>{1.5}), ParameterError);
}

TEST(SweepTest, NormalFrontierShape) {
  const DatasetSummary d(normal_sample(1000, 3));
  const auto r = select_noise(d, {0.75, 0.9}, default_shape_grid());
  ASSERT_GE(r.frontier.size(), 5u);
  for (const auto& p : r.frontier) EXPECT_TRUE(std::isfinite(p.calibrated_scale));
  // the calibrated scale falls as the shape grows towards Laplace
  EXPECT_GT(r.frontier.front().calibrated_scale, r.frontier.back().calibrated_scale);
  // the objective has its dip away from the smallest feasible shape
  EXPECT_GT(r.frontier.front().objective, r.optimal_objective);
  EXPECT_GE(r.optimal_shape, 0.5);
}

TEST(SweepTest, RescalingDataRescalesScalesAndKeepsArgmin) {
  const auto x = normal_sample(60, 4);
  std::vector<double> cx(x);
  for (double& v : cx) v *= 3.0;
  const auto shapes = make_shape_grid(0.6, 1.0, 0.1);
  const auto a = select_noise(DatasetSummary(x), {0.75, 0.9}, shapes);
  const auto b = select_noise(DatasetSummary(cx), {0.75, 0.9}, shapes);
  ASSERT_EQ(a.frontier.size(), b.frontier.size());
  for (std::size_t i = 0; i < a.frontier.size(); ++i) {
    EXPECT_NEAR(b.frontier[i].calibrated_scale / (3.0 * a.frontier[i].calibrated_scale), 1.0,
                3e-4);
  }
  EXPECT_EQ(a.optimal_shape, b.optimal_shape);
}

TEST(SelectNoiseTest, Deterministic) {
  const DatasetSummary d(normal_sample(300, 5));
  const auto shapes = make_shape_grid(0.5, 1.0, 0.1);
  const auto a = select_noise(d, {0.75, 0.9}, shapes);
  const auto b = select_noise(d, {0.75, 0.9}, shapes);
  ASSERT_EQ(a.frontier.size(), b.frontier.size());
  for (std::size_t i = 0; i < a.frontier.size(); ++i) {
    EXPECT_EQ(a.frontier[i].calibrated_scale, b.frontier[i].calibrated_scale);
    EXPECT_EQ(a.frontier[i].objective, b.frontier[i].objective);
  }
  EXPECT_EQ(a.optimal_shape, b.optimal_shape);
  EXPECT_EQ(a.optimal_scale, b.optimal_scale);
}

}  // namespace
}  // namespace gammaobf
