#pragma once

// Spatial and temporal interaction kernels and their cell-average
// discretization. Kernels are immutable after construction.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace nlmem {

struct SpaceAxis {};
struct TimeAxis {};

/// Polynomial family  x -> renorm * scale * (delta - x)^power * (1 + tilt * x / delta)
/// on (0, delta), zero elsewhere.
struct PolyShape {
  int power = 0;
  double scale = 1.0;
  double tilt = 0.0;
  double renorm = 1.0;
};

/// One-sided kernel supported on (0, support). `Axis` only distinguishes
/// space kernels from time kernels at the type level.
template <class Axis>
class Kernel {
 public:
  using Density = std::function<double(double)>;
  /// Exact integral over [a, b] with 0 <= a <= b <= support.
  using Integral = std::function<double(double, double)>;

  Kernel(double support, Density density, Integral integral = {},
         std::optional<PolyShape> poly = std::nullopt);

  [[nodiscard]] auto support() const noexcept -> double { return support_; }
  [[nodiscard]] auto finite_support() const noexcept -> bool;
  [[nodiscard]] auto has_exact_integral() const noexcept -> bool { return static_cast<bool>(integral_); }
  [[nodiscard]] auto poly() const noexcept -> const std::optional<PolyShape>& { return poly_; }

  /// Density value; zero outside (0, support).
  [[nodiscard]] auto evaluate(double x) const -> double;
  [[nodiscard]] auto operator()(double x) const -> double { return evaluate(x); }

  /// Integral over [a, b] clipped to the support. Closed form when
  /// available, otherwise 5-point Gauss-Legendre on [a, b].
  [[nodiscard]] auto integrate(double a, double b) const -> double;

  /// Total integral over the support.
  [[nodiscard]] auto mass() const -> double;

  /// Integral of kernel(x) * x / support; only defined for finite support.
  [[nodiscard]] auto first_moment() const -> double;

 private:
  double support_;
  Density density_;
  Integral integral_;
  std::optional<PolyShape> poly_;
};

using SpaceKernel = Kernel<SpaceAxis>;
using TimeKernel = Kernel<TimeAxis>;

/// Cell averages of a kernel over [q*spacing, (q+1)*spacing), q = 0..size-1.
struct DiscreteKernel {
  std::vector<double> weights;
  double spacing = 0.0;

  [[nodiscard]] auto size() const noexcept -> std::size_t { return weights.size(); }
  [[nodiscard]] auto operator[](std::size_t q) const -> double { return q < weights.size() ? weights[q] : 0.0; }
  /// spacing * sum of weights
  [[nodiscard]] auto mass() const -> double;
};

/// L = (power + 1) / delta^(power + 1), so the kernel integrates to one.
auto make_poly_space_kernel(double delta, int power) -> SpaceKernel;
auto make_poly_time_kernel(double delta, int power) -> TimeKernel;

/// Multiplicative tilt (1 + eps * x / delta) with renormalization to unit
/// mass. The base must be an untilted polynomial kernel.
auto perturb_space_kernel(const SpaceKernel& base, double eps) -> SpaceKernel;
auto perturb_time_kernel(const TimeKernel& base, double eps) -> TimeKernel;

/// Piecewise-constant kernel: weights[q] on [q*spacing, (q+1)*spacing).
auto make_table_space_kernel(double spacing, std::vector<double> weights) -> SpaceKernel;
auto make_table_time_kernel(double spacing, std::vector<double> weights) -> TimeKernel;

/// rate * exp(-rate * t), infinite support.
auto make_exponential_time_kernel(double rate) -> TimeKernel;

/// Arbitrary density; integrals fall back to Gauss-Legendre quadrature.
auto make_space_kernel(double support, std::function<double(double)> density) -> SpaceKernel;
auto make_time_kernel(double support, std::function<double(double)> density) -> TimeKernel;

/// Number of cells of width `spacing` needed to cover the support.
auto covering_cells(double support, double spacing) -> std::size_t;

/// Cell averages over [q*spacing, (q+1)*spacing). For kernels with infinite
/// support `max_cells` bounds the window and must be nonzero. Warns when
/// fewer than 4 cells cover the support.
template <class Axis>
auto discretize(const Kernel<Axis>& kernel, double spacing, std::size_t max_cells = 0) -> DiscreteKernel;

/// 5-point Gauss-Legendre rule on [a, b].
auto gauss_legendre5(const std::function<double(double)>& fn, double a, double b) -> double;

}  // namespace nlmem
