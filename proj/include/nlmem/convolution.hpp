#pragma once

// Discrete space-time convolutions
//
//   c^{s,k,n}_{j} = dx dt sum_{m <= n} sum_p mu^{s,k}_{q(j,p)} Gamma^{s,k}_{n-m} U^{s,m}_p
//
// evaluated through separability: the spatial sum of every time level is
// computed once when the level is pushed and cached, and the time sum runs
// over a sliding window of cached levels whose length covers the support of
// the time kernels.
//
// Interface j (0..cells) is the left edge of cell j. With the literal
// orientation weight q multiplies cell j - 1 - q (support upstream of the
// interface); the downstream orientation multiplies cell j + q. Cells
// outside the grid hold zero.

#include "nlmem/grid.hpp"
#include "nlmem/kernels.hpp"
#include "nlmem/model.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace nlmem {

/// Fixed-capacity ring buffer; pushing into a full buffer evicts the oldest
/// element. Slots are reused, so vector payloads keep their allocation.
template <class T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity)
      : slots_(capacity == 0 ? 1 : capacity), head_(slots_.size() - 1) {}

  [[nodiscard]] auto capacity() const noexcept -> std::size_t { return slots_.size(); }
  [[nodiscard]] auto size() const noexcept -> std::size_t { return size_; }
  [[nodiscard]] auto empty() const noexcept -> bool { return size_ == 0; }

  /// Slot that the next commit() publishes as the newest element.
  [[nodiscard]] auto next_slot() -> T& { return slots_[(head_ + 1) % slots_.size()]; }
  void commit() {
    head_ = (head_ + 1) % slots_.size();
    if (size_ < slots_.size()) ++size_;
  }
  void push(T value) {
    next_slot() = std::move(value);
    commit();
  }

  /// lag 0 is the newest element.
  [[nodiscard]] auto recent(std::size_t lag) const -> const T& {
    return slots_[(head_ + slots_.size() - lag % slots_.size()) % slots_.size()];
  }

 private:
  std::vector<T> slots_;
  std::size_t head_;
  std::size_t size_ = 0;
};

/// Cell averages of an N x N kernel matrix, pair order p = k*N + s.
struct DiscreteKernelMatrix {
  std::size_t species = 0;
  std::vector<DiscreteKernel> space;
  std::vector<DiscreteKernel> time;

  /// Levels needed by the time sums: the longest time-kernel window.
  [[nodiscard]] auto window() const -> std::size_t;
};

/// Discretizes every entry; infinite-support time kernels get
/// `history_cap` cells (the full run history).
auto discretize(const KernelMatrix& kernels, double dx, double dt, std::size_t history_cap) -> DiscreteKernelMatrix;

/// Spatial convolutions of one time level at all interfaces:
///   out[p * interfaces + j] = dx * sum_q w^{p}[q] U^{s}_{cell(j, q)}.
void spatial_conv(const StateMatrix& level, const DiscreteKernelMatrix& kernels, KernelOrientation orientation,
                  double dx, std::span<double> out);

/// Per-level history of states and cached spatial convolutions.
class StateHistory {
 public:
  StateHistory(DiscreteKernelMatrix flux_kernels, DiscreteKernelMatrix source_kernels, std::size_t cells,
               double dx, double dt, bool memory, KernelOrientation orientation, bool with_source);

  /// Discretizes the kernels of `spec` on `grid`.
  StateHistory(const SystemSpec& spec, const Grid& grid);

  /// Appends time level `level_counter()`.
  void push(const StateMatrix& level);

  /// Number of levels pushed so far (n + 1 once level n is in).
  [[nodiscard]] auto level_counter() const noexcept -> std::size_t { return levels_pushed_; }
  /// Levels currently resident.
  [[nodiscard]] auto retained_levels() const noexcept -> std::size_t { return states_.size(); }
  [[nodiscard]] auto flux_window() const noexcept -> std::size_t { return flux_window_; }
  [[nodiscard]] auto source_window() const noexcept -> std::size_t { return source_window_; }
  [[nodiscard]] auto species() const noexcept -> std::size_t { return species_; }
  [[nodiscard]] auto cells() const noexcept -> std::size_t { return cells_; }
  [[nodiscard]] auto interfaces() const noexcept -> std::size_t { return cells_ + 1; }
  [[nodiscard]] auto pairs() const noexcept -> std::size_t { return species_ * species_; }
  [[nodiscard]] auto memory() const noexcept -> bool { return memory_; }

  /// State of the level `lag` steps back from the newest.
  [[nodiscard]] auto state(std::size_t lag) const -> const StateMatrix& { return states_.recent(lag); }
  /// Cached spatial flux convolution of the level `lag` steps back.
  [[nodiscard]] auto flux_spatial(std::size_t lag) const -> const std::vector<double>& { return flux_cache_.recent(lag); }
  [[nodiscard]] auto source_spatial(std::size_t lag) const -> const std::vector<double>&;

  [[nodiscard]] auto flux_kernels() const noexcept -> const DiscreteKernelMatrix& { return flux_kernels_; }
  [[nodiscard]] auto source_kernels() const noexcept -> const DiscreteKernelMatrix& { return source_kernels_; }
  [[nodiscard]] auto orientation() const noexcept -> KernelOrientation { return orientation_; }

  /// c^{s,k,n} at all interfaces for the newest level n; layout
  /// out[p * interfaces + j]. Memoryless mode returns the spatial part of
  /// level n.
  void flux_convolution(std::span<double> out) const;

  /// d^{s,k,n} at all interfaces, same layout as flux_convolution.
  void source_convolution(std::span<double> out) const;

  /// d^{s,k,n} at cell centers (mean of the two adjacent interfaces);
  /// layout out[p * cells + i].
  void source_convolution_cells(std::span<double> out) const;

 private:
  void accumulate_time(const RingBuffer<std::vector<double>>& cache, const DiscreteKernelMatrix& kernels,
                       std::span<double> out) const;

  DiscreteKernelMatrix flux_kernels_;
  DiscreteKernelMatrix source_kernels_;
  std::size_t species_;
  std::size_t cells_;
  double dx_;
  double dt_;
  bool memory_;
  KernelOrientation orientation_;
  bool with_source_;
  bool shared_space_;
  std::size_t flux_window_;
  std::size_t source_window_;
  std::size_t levels_pushed_ = 0;
  RingBuffer<StateMatrix> states_;
  RingBuffer<std::vector<double>> flux_cache_;
  RingBuffer<std::vector<double>> source_cache_;
};

}  // namespace nlmem
