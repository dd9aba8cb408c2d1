#pragma once

// Uniform space-time mesh, projection of initial data and the CFL check.

#include "nlmem/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nlmem {

/// Uniform mesh on [x_min, x_max] with `cells` cells; cell i covers
/// [x_min + i dx, x_min + (i+1) dx). Interface j is the left edge of cell j,
/// j = 0..cells. Time levels t^n = n dt, the last step shortened to land on T.
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 0.0;
  std::size_t cells = 0;
  double dt = 0.0;
  double lambda = 0.0;
  double final_time = 0.0;
  std::size_t steps = 0;
  double last_dt = 0.0;

  /// Throws invalid-parameter unless (x_max - x_min) / dx is an integer
  /// within 1e-12 and dx, lambda > 0, T >= 0.
  static auto make(double x_min, double x_max, double dx, double lambda, double final_time) -> Grid;

  [[nodiscard]] auto interfaces() const noexcept -> std::size_t { return cells + 1; }
  [[nodiscard]] auto cell_center(std::size_t i) const -> double { return x_min + (static_cast<double>(i) + 0.5) * dx; }
  [[nodiscard]] auto interface_position(std::size_t j) const -> double { return x_min + static_cast<double>(j) * dx; }
  /// Time after `n` steps.
  [[nodiscard]] auto time_at(std::size_t n) const -> double;
  /// Length of step n (1-based), i.e. dt except for a shortened final step.
  [[nodiscard]] auto step_length(std::size_t n) const -> double { return n == steps ? last_dt : dt; }
};

/// Species-major matrix of cell values: (k, i) -> data[k * cells + i].
class StateMatrix {
 public:
  StateMatrix() = default;
  StateMatrix(std::size_t species, std::size_t cells, double fill = 0.0)
      : species_(species), cells_(cells), data_(species * cells, fill) {}

  [[nodiscard]] auto species() const noexcept -> std::size_t { return species_; }
  [[nodiscard]] auto cells() const noexcept -> std::size_t { return cells_; }
  [[nodiscard]] auto operator()(std::size_t k, std::size_t i) -> double& { return data_[k * cells_ + i]; }
  [[nodiscard]] auto operator()(std::size_t k, std::size_t i) const -> double { return data_[k * cells_ + i]; }
  [[nodiscard]] auto row(std::size_t k) -> std::span<double> { return {data_.data() + k * cells_, cells_}; }
  [[nodiscard]] auto row(std::size_t k) const -> std::span<const double> { return {data_.data() + k * cells_, cells_}; }
  [[nodiscard]] auto data() noexcept -> std::vector<double>& { return data_; }
  [[nodiscard]] auto data() const noexcept -> const std::vector<double>& { return data_; }

  friend auto operator==(const StateMatrix&, const StateMatrix&) -> bool = default;

 private:
  std::size_t species_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> data_;
};

/// Cell averages of the initial data by 5-point Gauss-Legendre per cell.
/// Overshoots of [0,1] below 1e-12 are clamped; larger ones throw
/// invalid-model.
auto project_initial(const SystemSpec& spec, const Grid& grid) -> StateMatrix;

struct CflReport {
  bool admissible = false;
  /// right-hand side of the CFL inequality at the given dt
  double bound = 0.0;
  /// largest lambda satisfying the inequality at fixed dx
  double max_lambda = 0.0;
  double max_dt = 0.0;
  ModelBounds constants;
};

/// lambda <= min(1, 4 - 6 beta, 6 beta, 1 - dt |R|_Lip) / (1 + 6 |f|_Lip ||nu||_inf).
/// Throws invalid-parameter for beta outside (0, 2/3).
auto check_cfl(const ModelBounds& constants, double lambda, double beta, double dt) -> CflReport;
auto check_cfl(const SystemSpec& spec, double lambda, double beta, double dt) -> CflReport;

}  // namespace nlmem
