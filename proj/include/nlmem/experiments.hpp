#pragma once

// Paired comparisons, one-coefficient perturbation sweeps and grid
// self-convergence studies on top of run configurations.

#include "nlmem/config.hpp"
#include "nlmem/diagnostics.hpp"
#include "nlmem/solver.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace nlmem {

struct GapRow {
  double time = 0.0;
  double gap = 0.0;  ///< L1 distance between the two runs at this snapshot
};

struct Comparison {
  RunResult reference;
  RunResult variant;
  std::vector<GapRow> gaps;
};

/// L1 gaps between snapshots with matching step indices.
auto snapshot_gaps(const RunResult& a, const RunResult& b) -> std::vector<GapRow>;

/// Reference keeps the configured memory flag forced on; the variant is the
/// memoryless counterpart.
auto compare_memory(const RunConfig& config) -> Comparison;
/// Reference has the source on; the variant has R = 0.
auto compare_source(const RunConfig& config) -> Comparison;

enum class SweepTarget { mu, g, gamma, eta, theta, source };

auto to_string(SweepTarget target) -> const char*;
/// Accepts mu, g, gamma, eta, theta, source (also Gamma and R).
auto parse_sweep_target(const std::string& name) -> SweepTarget;

struct SweepSpec {
  SweepTarget target = SweepTarget::mu;
  std::vector<double> eps{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  RunConfig baseline = sweep_config();
  /// worker threads for the perturbed runs; 0 picks the hardware count
  std::size_t threads = 0;
};

/// Throws invalid-parameter unless eps is non-empty, positive and strictly
/// decreasing.
void validate(const SweepSpec& sweep);

/// Baseline with one coefficient perturbed by eps. Perturbing eta or theta
/// requires separate source kernels (eta_x/eta_t set).
auto apply_perturbation(RunConfig config, SweepTarget target, double eps) -> RunConfig;

/// Memoizes run results by the JSON form of their configuration.
class RunCache {
 public:
  auto get(const RunConfig& config) -> std::shared_ptr<const RunResult>;
  [[nodiscard]] auto size() const -> std::size_t;
  [[nodiscard]] auto hits() const -> std::size_t;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const RunResult>> entries_;
  std::size_t hits_ = 0;
};

struct SweepResult {
  SweepTarget target = SweepTarget::mu;
  ErrorReport report;
  std::shared_ptr<const RunResult> baseline;
  /// final states per row (empty matrix for failed rows)
  std::vector<StateMatrix> finals;
};

/// Runs every eps row (rows in parallel), measures the L1 error against the
/// baseline at the final time and fills the rates. A failing row records its
/// message and the sweep continues.
auto perturbation_sweep(const SweepSpec& sweep, RunCache* cache = nullptr) -> SweepResult;

struct RefinementRow {
  double dx = 0.0;
  /// L1 distance between the run at dx and the run at dx/2 averaged onto dx
  double distance = 0.0;
  /// previous distance / this distance (0 on the first row)
  double factor = 0.0;
};

/// Runs dx, dx/2, ..., dx/2^levels at fixed lambda and compares consecutive
/// resolutions on the coarser grid.
auto self_convergence(const RunConfig& config, std::size_t levels, std::size_t threads = 0)
    -> std::vector<RefinementRow>;

}  // namespace nlmem
