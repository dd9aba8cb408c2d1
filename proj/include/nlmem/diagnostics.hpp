#pragma once

// Norms, errors, convergence rates and regularity monitors.

#include "nlmem/grid.hpp"
#include "nlmem/solver.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlmem {

/// dx * sum_k sum_i |a - b|; throws shape-mismatch on differing shapes.
auto l1_distance(const StateMatrix& a, const StateMatrix& b, double dx) -> double;

/// Per-species breakdown of l1_distance.
auto l1_distance_by_species(const StateMatrix& a, const StateMatrix& b, double dx) -> std::vector<double>;

/// log2(e_coarse / e_fine); nullopt when either error is not positive.
auto rate(double e_coarse, double e_fine) -> std::optional<double>;

/// sum_i |u_{i+1} - u_i|
auto total_variation(std::span<const double> u) -> double;

/// Averages blocks of `factor` cells, mapping a fine solution onto a grid
/// `factor` times coarser.
auto coarsen(const StateMatrix& fine, std::size_t factor) -> StateMatrix;

struct ErrorRow {
  double eps = 0.0;
  double error = 0.0;
  /// log2(e_{2 eps} / e_eps) against the previous (larger) eps
  std::optional<double> alpha;
  std::vector<double> per_species;
  /// non-empty when the run for this row failed
  std::string failure;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
};

/// Fills alpha for consecutive rows (rows ordered by decreasing eps).
void fill_rates(ErrorReport& report);

struct RegularitySummary {
  std::vector<double> min;  ///< per species, over all recorded steps
  std::vector<double> max;
  std::vector<double> mass_drift;  ///< per species, max |m(t) - m(0)|
  double total_mass_drift = 0.0;
  double tv_initial = 0.0;
  double tv_max = 0.0;
  double tv_growth = 0.0;  ///< tv_max / tv_initial (0 when tv_initial = 0)
  /// smallest C with sum TV(t) <= e^{C t} sum TV(0) + e^{C t} - 1 at every step
  double tv_constant = 0.0;
  /// smallest C with ||U(t)||_inf <= e^{C t (1 + ||U0||_1)} ||U0||_inf
  double linf_constant = 0.0;
  /// max over steps of ||U^n - U^{n-1}||_1 / dt
  double lipschitz_time = 0.0;
};

auto regularity_report(const RunResult& result) -> RegularitySummary;

}  // namespace nlmem
