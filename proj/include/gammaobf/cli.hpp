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

// Command-line front end: select | obfuscate | estimate | measure | simulate.

#ifndef GAMMAOBF_CLI_HPP_
#define GAMMAOBF_CLI_HPP_

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gammaobf/confidentiality.hpp"
#include "gammaobf/deconvolution.hpp"
#include "gammaobf/errors.hpp"
#include "gammaobf/evaluation.hpp"
#include "gammaobf/io.hpp"
#include "gammaobf/noise_model.hpp"
#include "gammaobf/optimizer.hpp"
#include "gammaobf/rng.hpp"

#ifndef GAMMAOBF_VERSION
#define GAMMAOBF_VERSION "unknown"
#endif

namespace gammaobf::cli {

using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct ShapeGridSpec {
  double start = 0.05;
  double stop = 1.0;
  double step = 0.05;

  std::vector<double> expand() const { return make_shape_grid(start, stop, step); }
};

// "start:stop:step"
inline ShapeGridSpec parse_shape_grid(const std::string& text) {
  ShapeGridSpec g;
  std::istringstream in(text);
  char c1 = 0, c2 = 0;
  if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.step) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof()) {
    throw ParameterError("theta grid must be start:stop:step, got '" + text + "'");
  }
  g.expand();  // validates
  return g;
}

struct RunConfig {
  std::string command;
  fs::path input;
  fs::path output;  // empty: main output to stdout, no sidecars
  PrivacyBudget budget{0.75, 0.9};
  ShapeGridSpec shape_grid;
  std::optional<std::uint64_t> seed;
  std::size_t grid_size = 0;  // 0: the command's default
  BiasConstant bias = BiasConstant::kKernel;
  double theta = 1.0;
  double eta = 0.0;
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::string distribution = "normal";
  std::size_t n = 1000;
  std::size_t reps = 100;
  bool fast = false;
  unsigned threads = 0;

  GammaNoiseParams noise() const { return {theta, eta}; }
};

inline json config_json(const RunConfig& c, std::uint64_t seed) {
  json j;
  j["version"] = GAMMAOBF_VERSION;
  j["command"] = c.command;
  j["input"] = c.input.string();
  j["output"] = c.output.string();
  j["q"] = c.budget.deviation_multiplier;
  j["delta"] = c.budget.level;
  j["theta_grid"] = {{"start", c.shape_grid.start}, {"stop", c.shape_grid.stop},
                     {"step", c.shape_grid.step}};
  j["seed"] = seed;
  j["seed_from_entropy"] = !c.seed.has_value();
  j["grid_size"] = c.grid_size;
  j["bias_constant"] = std::string(to_string(c.bias));
  j["bias_constant_value"] = bias_constant_value(c.bias);
  j["theta"] = c.theta;
  j["eta"] = c.eta;
  if (c.grid_min) j["grid_min"] = *c.grid_min;
  if (c.grid_max) j["grid_max"] = *c.grid_max;
  j["distribution"] = c.distribution;
  j["n"] = c.n;
  j["reps"] = c.reps;
  j["fast"] = c.fast;
  return j;
}

inline json to_json(const FrontierPoint& p) {
  return {{"theta", p.shape},
          {"eta", p.calibrated_scale},
          {"bandwidth", p.bandwidth},
          {"objective", p.objective},
          {"calibration_residual", p.calibration_residual},
          {"multiple_crossings", p.multiple_crossings}};
}

inline json to_json(const SelectionReport& r) {
  json frontier = json::array();
  for (const auto& p : r.frontier) frontier.push_back(to_json(p));
  return {{"frontier", frontier},
          {"optimal", {{"theta", r.optimal_shape},
                       {"eta", r.optimal_scale},
                       {"bandwidth", r.optimal_bandwidth},
                       {"objective", r.optimal_objective}}},
          {"data_sd", r.data_sd},
          {"warnings", r.warnings}};
}

inline json to_json(const StudyReport& r) {
  return {{"S_e", r.sampling_error},
          {"L_e", r.laplace_error},
          {"O_e", r.optimal_error},
          {"frac_laplace", r.frac_laplace},
          {"frac_optimal", r.frac_optimal},
          {"ratio", r.ratio},
          {"optimal", {{"theta", r.optimal_params.shape}, {"eta", r.optimal_params.scale}}},
          {"replications_used", r.replications_used},
          {"replications_dropped", r.replications_dropped},
          {"valid", r.valid}};
}

namespace detail {

inline void write_json(const fs::path& path, const json& j) {
  auto out = io::open_output(path);
  out << j.dump(2) << '\n';
}

// Main output goes to the file when one is given, otherwise to `out`.
template <typename Writer>
void emit(const RunConfig& c, std::ostream& out, Writer&& write) {
  if (c.output.empty()) {
    write(out);
  } else {
    auto f = io::open_output(c.output);
    write(f);
  }
}

inline std::vector<double> output_grid(const RunConfig& c, std::span<const double> values) {
  const std::size_t size = c.grid_size ? c.grid_size : kDefaultOutputGridSize;
  if (c.grid_min || c.grid_max) {
    const auto dflt = default_output_grid(values, 2);
    const double lo = c.grid_min.value_or(dflt.front());
    const double hi = c.grid_max.value_or(dflt.back());
    if (!(hi > lo) || size < 2) throw ParameterError("output grid needs max > min and size >= 2");
    return linspace(lo, hi, size);
  }
  return default_output_grid(values, size);
}

}  // namespace detail

inline SelectionReport cmd_select(const RunConfig& c, std::uint64_t seed, std::ostream& out) {
  const DatasetSummary data(io::read_column(c.input));
  const auto shapes = c.shape_grid.expand();
  const std::size_t gsize = c.grid_size ? c.grid_size : kDefaultMeasureGridSize;
  const SelectionReport r = select_noise(data, c.budget, shapes, c.bias, gsize);
  json j = to_json(r);
  j["config"] = config_json(c, seed);
  detail::emit(c, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  if (!c.output.empty()) {
    std::vector<double> th, eta, bw, obj;
    for (const auto& p : r.frontier) {
      th.push_back(p.shape);
      eta.push_back(p.calibrated_scale);
      bw.push_back(p.bandwidth);
      obj.push_back(p.objective);
    }
    auto f = io::open_output(io::sidecar_path(c.output, "_frontier.csv"));
    io::write_csv(f, {"theta", "eta", "bandwidth", "objective"}, {th, eta, bw, obj});
  }
  return r;
}

inline std::vector<double> cmd_obfuscate(const RunConfig& c, std::uint64_t seed,
                                         std::ostream& out) {
  const GammaNoiseParams p = c.noise();
  p.validate();
  std::vector<double> z = io::read_column(c.input);
  Rng rng(seed);
  for (double& v : z) v += sample_one(p, rng);
  detail::emit(c, out, [&](std::ostream& o) { io::write_column(o, z); });
  if (!c.output.empty()) {
    detail::write_json(io::sidecar_path(c.output, ".json"),
                       {{"rows", z.size()}, {"config", config_json(c, seed)}});
  }
  return z;
}

inline DensityEstimate cmd_estimate(const RunConfig& c, std::uint64_t seed, std::ostream& out) {
  const GammaNoiseParams p = c.noise();
  p.validate();
  const std::vector<double> z = io::read_column(c.input);
  if (z.size() < 2) throw DataError("need at least two rows", 0);
  const auto grid = detail::output_grid(c, z);
  BandwidthSelection sel;
  const DensityEstimate est = estimate_from_masked(z, p, grid, c.bias, &sel);
  detail::emit(c, out, [&](std::ostream& o) {
    io::write_csv(o, {"x", "g_hat", "G_hat"}, {est.grid, est.density, est.cdf});
  });
  if (!c.output.empty()) {
    detail::write_json(io::sidecar_path(c.output, ".json"),
                       {{"bandwidth", est.bandwidth},
                        {"aimse", sel.aimse_at_optimum},
                        {"roughness_estimate", sel.roughness_estimate},
                        {"mass", est.mass},
                        {"cdf_overshoot", est.cdf_overshoot},
                        {"config", config_json(c, seed)}});
  }
  return est;
}

inline double cmd_measure(const RunConfig& c, std::uint64_t seed, std::ostream& out) {
  const GammaNoiseParams p = c.noise();
  p.validate();
  c.budget.validate();
  const DatasetSummary data(io::read_column(c.input));
  const MeasureGrid grid(data, c.grid_size ? c.grid_size : kDefaultMeasureGridSize);
  const double mu = grid.mu(p, c.budget.level);
  const MeasureCurve curve = grid.curve(p, mu);
  const double sup_q = grid.sup(p, c.budget.deviation_multiplier);
  json j = {{"mu", mu},
            {"sup_at_q", sup_q},
            {"meets_budget", sup_q <= c.budget.level},
            {"config", config_json(c, seed)}};
  detail::emit(c, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  if (!c.output.empty()) {
    auto f = io::open_output(io::sidecar_path(c.output, "_curve.csv"));
    io::write_csv(f, {"z", "M_hat"}, {curve.z_grid, curve.values});
  }
  return mu;
}

inline StudyReport cmd_simulate(const RunConfig& c, std::uint64_t seed, std::ostream& out) {
  StudyConfig s;
  const auto law = parse_law(c.distribution);
  if (!law) throw ParameterError("unknown distribution '" + c.distribution + "'");
  s.distribution = *law;
  s.n = c.n;
  s.budget = c.budget;
  s.replications = c.reps;
  s.base_seed = seed;
  s.shape_grid = c.shape_grid.expand();
  s.bias = c.bias;
  s.reselect_each_replication = !c.fast;
  s.error_grid_size = c.grid_size ? c.grid_size : 201;
  s.threads = c.threads;
  const StudyReport r = run_study(s);
  json j = to_json(r);
  j["config"] = config_json(c, seed);
  detail::emit(c, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  if (!c.output.empty()) {
    std::vector<double> rep, se, le, oe, th, eta;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& t : r.trace) {
      rep.push_back(static_cast<double>(t.rep));
      se.push_back(t.ok ? t.sampling_error : nan);
      le.push_back(t.ok ? t.laplace_error : nan);
      oe.push_back(t.ok ? t.optimal_error : nan);
      th.push_back(t.ok ? t.theta_star : nan);
      eta.push_back(t.ok ? t.eta_star : nan);
    }
    auto f = io::open_output(io::sidecar_path(c.output, "_reps.csv"));
    io::write_csv(f, {"rep", "S_e", "L_e", "O_e", "theta_star", "eta_star"},
                  {rep, se, le, oe, th, eta});
  }
  return r;
}

namespace detail {

inline void add_common(CLI::App* sub, RunConfig& c, std::string& grid_text,
                       std::string& bias_text) {
  sub->add_option("--input,-i", c.input, "Input CSV (one numeric column)");
  sub->add_option("--output,-o", c.output, "Output file; sidecars are written next to it");
  sub->add_option("--seed", c.seed, "RNG seed (default: OS entropy, recorded in the report)");
  sub->add_option("--q", c.budget.deviation_multiplier, "Deviation multiplier Q")
      ->capture_default_str();
  sub->add_option("--delta", c.budget.level, "Confidentiality level delta")
      ->capture_default_str();
  sub->add_option("--theta-grid", grid_text, "Shape grid start:stop:step")->capture_default_str();
  sub->add_option("--grid-size", c.grid_size, "Evaluation grid size (0: command default)");
  sub->add_option("--bias-constant", bias_text, "AIMSE bias constant")
      ->check(CLI::IsMember({"legacy", "kernel"}))
      ->capture_default_str();
}

inline void add_noise(CLI::App* sub, RunConfig& c) {
  sub->add_option("--theta", c.theta, "Noise shape")->capture_default_str();
  sub->add_option("--eta", c.eta, "Noise scale")->required();
}

}  // namespace detail

// Parses argv and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Gamma-noise obfuscation and deconvolution density estimation"};
  app.set_version_flag("--version", GAMMAOBF_VERSION);
  app.require_subcommand(1);

  RunConfig c;
  std::string grid_text = "0.05:1:0.05";
  std::string bias_text = "kernel";

  auto* sel = app.add_subcommand("select", "Sweep shapes and choose the optimal noise");
  auto* obf = app.add_subcommand("obfuscate", "Add Gamma noise to a column");
  auto* est = app.add_subcommand("estimate", "Deconvolution density/CDF estimate");
  auto* mea = app.add_subcommand("measure", "Empirical confidentiality measure");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo error study");
  for (auto* s : {sel, obf, est, mea, sim}) detail::add_common(s, c, grid_text, bias_text);
  for (auto* s : {sel, obf, est, mea}) s->get_option("--input")->required();
  for (auto* s : {obf, est, mea}) detail::add_noise(s, c);
  est->add_option("--grid-min", c.grid_min, "Output grid lower end");
  est->add_option("--grid-max", c.grid_max, "Output grid upper end");
  sim->add_option("--distribution", c.distribution, "Reference law")
      ->check(CLI::IsMember({"exponential", "normal", "laplace", "uniform"}))
      ->capture_default_str();
  sim->add_option("--n", c.n, "Sample size")->capture_default_str();
  sim->add_option("--reps", c.reps, "Replications")->capture_default_str();
  sim->add_flag("--fast", c.fast, "Select once on replication 0 and reuse the pair");
  sim->add_option("--threads", c.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  for (auto* s : app.get_subcommands()) c.command = s->get_name();
  const std::uint64_t seed = c.seed ? *c.seed : entropy_seed();
  try {
    c.bias = *parse_bias_constant(bias_text);
    c.shape_grid = parse_shape_grid(grid_text);
    c.budget.validate();
    if (c.command == "select") cmd_select(c, seed, out);
    else if (c.command == "obfuscate") cmd_obfuscate(c, seed, out);
    else if (c.command == "estimate") cmd_estimate(c, seed, out);
    else if (c.command == "measure") cmd_measure(c, seed, out);
    else cmd_simulate(c, seed, out);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DegenerateSupportError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}

}  // namespace gammaobf::cli

#endif  // GAMMAOBF_CLI_HPP_
