#pragma once

// System definition: N species with flux f^k, velocity nu^k, source R^k,
// N x N kernel matrices and initial data, plus the two-lane traffic preset.

#include "nlmem/kernels.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nlmem {

using ScalarFn = std::function<double(double)>;

/// nu^k evaluated on the N convolution values (c^{s,k})_s feeding species k.
using VelocityFn = std::function<double(std::span<const double>)>;

/// R^k(u, d). `u` holds the N local states; `d` holds N*N source
/// convolutions laid out as d[k*N + s] = d^{s,k}.
using SourceFn = std::function<double(std::span<const double>, std::span<const double>)>;

enum class VelocityAggregation { mean, sum, diagonal };
enum class KernelOrientation { literal, downstream };
/// Where the perturbed shape g_eps replaces g inside the velocities: every
/// nu^k (flux and exchange term), only the flux velocities, or only the
/// nu^k(A), nu^k(B) factors of the exchange term.
enum class VelocityScope { all, flux, source };

auto to_string(VelocityAggregation a) -> const char*;
auto to_string(KernelOrientation o) -> const char*;
auto to_string(VelocityScope v) -> const char*;

/// Reduces the convolution vector feeding species k to the scalar argument
/// of a scalar velocity law.
auto aggregate(VelocityAggregation how, std::span<const double> conv, std::size_t k) -> double;

struct KernelPair {
  SpaceKernel space;
  TimeKernel time;
};

/// N x N matrix of kernel pairs; entry (s, k) convolves species s and feeds
/// species k.
class KernelMatrix {
 public:
  KernelMatrix(std::size_t n, const KernelPair& fill) : n_(n), entries_(n * n, fill) {}

  [[nodiscard]] auto size() const noexcept -> std::size_t { return n_; }
  [[nodiscard]] auto at(std::size_t s, std::size_t k) -> KernelPair& { return entries_.at(k * n_ + s); }
  [[nodiscard]] auto at(std::size_t s, std::size_t k) const -> const KernelPair& { return entries_.at(k * n_ + s); }
  /// Entries in pair order p = k*N + s.
  [[nodiscard]] auto entries() const noexcept -> const std::vector<KernelPair>& { return entries_; }

 private:
  std::size_t n_;
  std::vector<KernelPair> entries_;
};

struct Species {
  std::string name;
  ScalarFn flux;
  VelocityFn velocity;
  SourceFn source;  ///< empty means R^k = 0
  ScalarFn initial;
};

/// User-supplied constants used instead of sampled estimates.
struct BoundOverrides {
  std::optional<double> flux_lipschitz;
  std::optional<double> velocity_sup;
  std::optional<double> source_lipschitz;
};

struct SystemSpec {
  std::vector<Species> species;
  KernelMatrix flux_kernels;
  KernelMatrix source_kernels;
  /// false replaces every time kernel by a Dirac mass at zero
  bool memory = true;
  KernelOrientation orientation = KernelOrientation::literal;
  BoundOverrides bounds;
  std::string label;

  [[nodiscard]] auto species_count() const noexcept -> std::size_t { return species.size(); }
  [[nodiscard]] auto has_source() const -> bool;
};

/// Constants entering the CFL condition: max_k |f^k|_Lip, max_k sup|nu^k|
/// and max_k |R^k|_Lip.
struct ModelBounds {
  double flux_lipschitz = 0.0;
  double velocity_sup = 0.0;
  double source_lipschitz = 0.0;
};

/// Samples difference quotients over [0,1] (flux), [0,1]^N (velocity) and
/// [0,1]^(N + N^2) (source). Overrides in `spec.bounds` take precedence.
auto estimate_bounds(const SystemSpec& spec) -> ModelBounds;

/// Parameters of the two-lane traffic model.
struct TwoLaneParams {
  double eps_mu = 0.0;
  double eps_g = 0.0;
  double eps_gamma = 0.0;
  double eps_eta = 0.0;
  double eps_theta = 0.0;
  double eps_source = 0.0;  ///< R scaled by (1 + eps_source)
  VelocityScope eps_g_scope = VelocityScope::all;
  bool with_source = true;
  bool with_memory = true;
  VelocityAggregation aggregation = VelocityAggregation::mean;
  KernelOrientation orientation = KernelOrientation::literal;
  double lane_factor_slow = 1.5;
  double lane_factor_fast = 2.5;
  double delta_x = 0.078125;
  double delta_t = 0.4;
  int space_power = 3;
  int time_power = 2;
  /// When set, the source kernels are separate polynomial kernels with these
  /// radii; otherwise the source reuses the flux kernels.
  std::optional<double> eta_x;
  std::optional<double> eta_t;
};

/// g_eps(x) = (1 - x) (1 + eps sin(pi x))
auto velocity_shape(double eps) -> ScalarFn;

auto build_two_lane(const TwoLaneParams& params) -> SystemSpec;
auto build_two_lane(double eps_mu, double eps_g, bool with_source, bool with_memory) -> SystemSpec;

/// R^k at (u, conv); conv uses the d[k*N + s] layout of SourceFn.
auto eval_source(const SystemSpec& spec, std::span<const double> u, std::span<const double> conv, std::size_t k)
    -> double;

/// Checks f(0) = f(1) = 0, R(0,0) = 0, initial data in [0,1] on a sample
/// grid over `sample_range`, kernel nonnegativity and unit mass. Returns one
/// message per violation.
auto validate(const SystemSpec& spec, std::pair<double, double> sample_range = {-10.0, 10.0})
    -> std::vector<std::string>;

}  // namespace nlmem
