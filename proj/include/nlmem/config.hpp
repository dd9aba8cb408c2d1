#pragma once

// Run configuration: JSON (de)serialization, presets, and construction of
// the system and grid a configuration describes.

#include "nlmem/grid.hpp"
#include "nlmem/model.hpp"
#include "nlmem/solver.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace nlmem {

/// {family: "poly", delta, power, epsilon?} | {family: "table", spacing, weights[]}
/// | {family: "exponential", rate}
struct KernelSpec {
  std::string family = "poly";
  double delta = 0.0;
  int power = 0;
  double epsilon = 0.0;
  double spacing = 0.0;
  std::vector<double> weights;
  double rate = 0.0;
};

auto make_space_kernel(const KernelSpec& spec) -> SpaceKernel;
auto make_time_kernel(const KernelSpec& spec) -> TimeKernel;

/// Piecewise-linear table {x: [...], y: [...]} (clamped to the end values
/// outside the range unless `zero_outside`) or polynomial {poly: [c0, c1, ...]}.
struct FunctionSpec {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> poly;
  bool zero_outside = false;
};

auto make_function(const FunctionSpec& spec) -> ScalarFn;

struct CustomSpecies {
  std::string name;
  FunctionSpec flux;
  double velocity_factor = 1.0;
  FunctionSpec velocity_shape;
  FunctionSpec initial;
};

struct CustomModel {
  std::vector<CustomSpecies> species;
  /// "none" or "exchange" (nearest-neighbour chain R^k = S^{k-1} - S^k)
  std::string source = "none";
};

struct ModelConfig {
  /// "two_lane" or "custom"
  std::string preset = "two_lane";
  TwoLaneParams two_lane;
  CustomModel custom;
  std::optional<KernelSpec> mu;
  std::optional<KernelSpec> gamma;
  std::optional<KernelSpec> eta;
  std::optional<KernelSpec> theta;
  BoundOverrides bounds;
};

struct GridConfig {
  double x_min = -4.0;
  double x_max = 4.0;
  double dx = 7.8125e-3;
  /// nullopt selects 0.95 times the admissible CFL bound
  std::optional<double> lambda = 0.1286;
  double beta = 0.333433;
  double final_time = 0.5;
};

struct RunConfig {
  ModelConfig model;
  GridConfig grid;
  std::vector<double> snapshot_times{0.01667, 0.3334, 0.5};
  bool guard_boundary = true;
  double boundary_radius = 0.0;
  double boundary_tolerance = 1e-8;
  bool dump_conv = false;
};

/// Two-lane runs used for the memory and source comparisons.
auto figures_config() -> RunConfig;
/// Two-lane baseline for the perturbation sweeps (finer grid, separate
/// source kernels).
auto sweep_config() -> RunConfig;

auto build_system(const ModelConfig& config) -> SystemSpec;
auto make_grid(const RunConfig& config, const SystemSpec& spec) -> Grid;
auto solver_options(const RunConfig& config) -> SolverOptions;

/// Builds, grids and runs the configuration.
auto run_config(const RunConfig& config) -> RunResult;

auto to_json(const RunConfig& config) -> nlohmann::json;
/// Missing keys keep the defaults of `base`. Throws config errors with the
/// offending key.
auto run_config_from_json(const nlohmann::json& j, RunConfig base = figures_config()) -> RunConfig;
/// A top-level "base": "figures"|"sweep" key replaces `base`.
auto load_run_config(const std::string& path, RunConfig base = figures_config()) -> RunConfig;

}  // namespace nlmem
