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

// Choice of the noise density: for every shape on a grid the scale is
// calibrated to the privacy budget, the AIMSE bandwidth is fixed, and the
// noise-dependent MISE term J is evaluated; the feasible pair with the
// smallest J wins.

#ifndef GAMMAOBF_OPTIMIZER_HPP_
#define GAMMAOBF_OPTIMIZER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gammaobf/confidentiality.hpp"
#include "gammaobf/deconvolution.hpp"
#include "gammaobf/errors.hpp"
#include "gammaobf/noise_model.hpp"

namespace gammaobf {

struct FrontierPoint {
  double shape = 0.0;
  double calibrated_scale = 0.0;
  double bandwidth = 0.0;
  double objective = 0.0;
  double calibration_residual = 0.0;  // grid sup of M-hat minus delta
  bool multiple_crossings = false;
};

struct SelectionReport {
  std::vector<FrontierPoint> frontier;
  double optimal_shape = 0.0;
  double optimal_scale = 0.0;
  double optimal_bandwidth = 0.0;
  double optimal_objective = 0.0;
  PrivacyBudget budget;
  double data_sd = 0.0;
  std::vector<std::string> warnings;

  GammaNoiseParams optimal_params() const { return {optimal_shape, optimal_scale}; }
};

// Integral of |K~(t b)|^2 / |f~(t)|^2 over the real line; the only term of
// the MISE that depends on the noise density.
inline double objective_J(const GammaNoiseParams& noise, double bandwidth) {
  return kernel_noise_l2(noise, bandwidth);
}

// 0.05, 0.10, ..., 1.00
inline std::vector<double> default_shape_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 20; ++k) g.push_back(k / 20.0);
  return g;
}

// Shapes start:step:stop inclusive of stop (to within 1e-9 of a step).
inline std::vector<double> make_shape_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(start > 0.0) || !(stop <= 1.0) || !(stop >= start)) {
    throw ParameterError("shape grid requires 0 < start <= stop <= 1 and step > 0");
  }
  std::vector<double> g;
  for (int k = 0;; ++k) {
    const double v = start + k * step;
    if (v > stop + 1e-9 * step) break;
    g.push_back(std::min(v, stop));
  }
  return g;
}

// One frontier point per shape whose calibration succeeds. Bandwidths use a
// normal reference on the confidential data's own variance.
inline std::vector<FrontierPoint> sweep(const DatasetSummary& data, const PrivacyBudget& budget,
                                        std::span<const double> shape_grid,
                                        BiasConstant bias = BiasConstant::kKernel,
                                        std::vector<std::string>* warnings = nullptr,
                                        std::size_t measure_grid_size = kDefaultMeasureGridSize) {
  budget.validate();
  if (shape_grid.empty()) throw ParameterError("empty shape grid");
  for (double s : shape_grid) {
    if (!(s > 0.0 && s <= 1.0)) throw ParameterError("shapes must lie in (0, 1]");
  }
  const MeasureGrid grid(data, measure_grid_size);
  const double roughness = normal_reference_roughness(data.sd() * data.sd());

  std::vector<FrontierPoint> frontier;
  for (double shape : shape_grid) {
    ScaleCalibration cal;
    try {
      cal = calibrate_scale_detailed(grid, shape, budget);
    } catch (const CalibrationError& e) {
      if (warnings) warnings->push_back(e.what());
      continue;
    }
    if (cal.multiple_crossings && warnings) {
      warnings->push_back("shape " + std::to_string(shape) +
                          ": calibration criterion crosses delta more than once");
    }
    const GammaNoiseParams noise{shape, cal.scale};
    const auto sel = select_bandwidth(noise, roughness, data.n(), bias);
    FrontierPoint p;
    p.shape = shape;
    p.calibrated_scale = cal.scale;
    p.bandwidth = sel.bandwidth;
    p.objective = objective_J(noise, sel.bandwidth);
    p.calibration_residual = cal.residual;
    p.multiple_crossings = cal.multiple_crossings;
    frontier.push_back(p);
  }
  if (frontier.empty()) throw CalibrationError("calibration failed for every shape");
  std::sort(frontier.begin(), frontier.end(),
            [](const FrontierPoint& a, const FrontierPoint& b) { return a.shape < b.shape; });
  return frontier;
}

// Minimal-J point; objectives equal to within 1e-12 (relative) go to the
// larger shape.
inline SelectionReport select_optimal(std::vector<FrontierPoint> frontier,
                                      const PrivacyBudget& budget = {}, double data_sd = 0.0) {
  if (frontier.empty()) throw ParameterError("empty frontier");
  std::size_t best = 0;
  for (std::size_t i = 1; i < frontier.size(); ++i) {
    const double jb = frontier[best].objective;
    const double ji = frontier[i].objective;
    const bool tie = std::abs(ji - jb) <= 1e-12 * std::max(std::abs(ji), std::abs(jb));
    if ((!tie && ji < jb) || (tie && frontier[i].shape > frontier[best].shape)) best = i;
  }
  SelectionReport r;
  r.optimal_shape = frontier[best].shape;
  r.optimal_scale = frontier[best].calibrated_scale;
  r.optimal_bandwidth = frontier[best].bandwidth;
  r.optimal_objective = frontier[best].objective;
  r.frontier = std::move(frontier);
  r.budget = budget;
  r.data_sd = data_sd;
  return r;
}

inline SelectionReport select_noise(const DatasetSummary& data, const PrivacyBudget& budget,
                                    std::span<const double> shape_grid,
                                    BiasConstant bias = BiasConstant::kKernel,
                                    std::size_t measure_grid_size = kDefaultMeasureGridSize) {
  std::vector<std::string> warnings;
  auto frontier = sweep(data, budget, shape_grid, bias, &warnings, measure_grid_size);
  SelectionReport r = select_optimal(std::move(frontier), budget, data.sd());
  r.warnings = std::move(warnings);
  return r;
}

}  // namespace gammaobf

#endif  // GAMMAOBF_OPTIMIZER_HPP_
