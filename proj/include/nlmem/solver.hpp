#pragma once

// Explicit finite-volume marching scheme with the nonlocal Lax-Friedrichs
// flux and an explicit source update.

#include "nlmem/convolution.hpp"
#include "nlmem/grid.hpp"
#include "nlmem/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace nlmem {

/// F(nu, a, b) = nu/2 (f(a) + f(b)) - beta (b - a) / (2 lambda)
auto lf_flux(double velocity, double u_left, double u_right, const ScalarFn& flux, double lambda, double beta)
    -> double;

/// Flux part of the cell update with the convolution arguments frozen:
///   u - lambda [F(nu_right, u, u_right) - F(nu_left, u_left, u)]
auto marching_update(double u_left, double u, double u_right, double nu_left, double nu_right, const ScalarFn& flux,
                     double lambda, double beta) -> double;

struct SolverOptions {
  double beta = 0.333433;
  std::vector<double> snapshot_times;
  /// Keep full per-pair c and d interface fields in each snapshot.
  bool dump_conv = false;
  /// Abort when the mass within `boundary_radius` of either end exceeds
  /// `boundary_tolerance` times the total mass. A radius <= 0 uses the
  /// largest flux-kernel support.
  bool guard_boundary = true;
  double boundary_radius = 0.0;
  double boundary_tolerance = 1e-8;
  /// Warn (not fail) when lambda exceeds the conservative CFL bound.
  bool warn_cfl = true;
};

struct Snapshot {
  double time = 0.0;
  std::size_t step = 0;
  StateMatrix u;
  /// Velocity argument fed to each species, aggregated over s by the mean
  /// and averaged to cell centers: (k, i).
  StateMatrix c;
  /// Source convolution, mean over s at cell centers: (k, i).
  StateMatrix d;
  /// Present with dump_conv: layout [pair * interfaces + j].
  std::vector<double> c_faces;
  std::vector<double> d_faces;

  friend auto operator==(const Snapshot&, const Snapshot&) -> bool = default;
};

struct DiagnosticsRow {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<double> mass;
  double total_mass = 0.0;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> tv;
  /// ||U^n - U^{n-1}||_1 / (t^n - t^{n-1}); zero at step 0
  double time_derivative_l1 = 0.0;
  /// largest |c| over all pairs and interfaces used in this step
  double max_conv = 0.0;

  friend auto operator==(const DiagnosticsRow&, const DiagnosticsRow&) -> bool = default;
};

struct RunResult {
  Grid grid;
  double beta = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
  CflReport cfl;
  double wall_seconds = 0.0;

  [[nodiscard]] auto final_state() const -> const StateMatrix& { return snapshots.back().u; }
};

class Solver {
 public:
  Solver(const SystemSpec& spec, const Grid& grid, SolverOptions options = {});

  /// Advances one level: convolutions from levels 0..n-1, fluxes and sources
  /// at level n-1, then pushes level n into the history. Throws
  /// numerical-blowup on a non-finite state and boundary-contact when mass
  /// reaches the domain ends.
  void step();

  /// Steps to the final time, recording snapshots and per-step diagnostics.
  auto run() -> RunResult;

  [[nodiscard]] auto state() const noexcept -> const StateMatrix& { return state_; }
  [[nodiscard]] auto step_index() const noexcept -> std::size_t { return step_; }
  [[nodiscard]] auto time() const noexcept -> double { return time_; }
  [[nodiscard]] auto history() const noexcept -> const StateHistory& { return history_; }
  [[nodiscard]] auto grid() const noexcept -> const Grid& { return grid_; }
  [[nodiscard]] auto cfl() const noexcept -> const CflReport& { return cfl_; }
  [[nodiscard]] auto done() const noexcept -> bool { return step_ >= grid_.steps; }

  [[nodiscard]] auto diagnostics_row() const -> DiagnosticsRow;
  [[nodiscard]] auto snapshot() const -> Snapshot;

 private:
  void check_boundary() const;

  const SystemSpec& spec_;
  Grid grid_;
  SolverOptions options_;
  StateMatrix state_;
  StateMatrix previous_;
  StateHistory history_;
  CflReport cfl_;
  std::size_t step_ = 0;
  double time_ = 0.0;
  std::size_t boundary_cells_ = 0;
  // scratch
  std::vector<double> conv_faces_;
  std::vector<double> source_cells_;
  std::vector<double> velocity_faces_;
  std::vector<double> flux_faces_;
};

/// Projects the initial data and runs to grid.final_time.
auto run(const SystemSpec& spec, const Grid& grid, const SolverOptions& options = {}) -> RunResult;

}  // namespace nlmem
