#include "nlmem/convolution.hpp"

#include "nlmem/error.hpp"

#include <algorithm>
#include <cmath>

namespace nlmem {

namespace {

auto same_space_weights(const DiscreteKernelMatrix& a, const DiscreteKernelMatrix& b) -> bool {
  if (a.species != b.species || a.space.size() != b.space.size()) return false;
  for (std::size_t p = 0; p < a.space.size(); ++p) {
    if (a.space[p].weights != b.space[p].weights) return false;
  }
  return true;
}

auto history_cap(const Grid& grid) -> std::size_t { return std::max<std::size_t>(grid.steps + 1, 1); }

}  // namespace

auto DiscreteKernelMatrix::window() const -> std::size_t {
  std::size_t w = 1;
  for (const auto& k : time) w = std::max(w, k.size());
  return w;
}

auto discretize(const KernelMatrix& kernels, double dx, double dt, std::size_t history_cap) -> DiscreteKernelMatrix {
  DiscreteKernelMatrix out;
  out.species = kernels.size();
  out.space.reserve(kernels.entries().size());
  out.time.reserve(kernels.entries().size());
  for (const auto& pair : kernels.entries()) {
    out.space.push_back(discretize(pair.space, dx));
    const std::size_t cap = pair.time.finite_support() ? 0 : history_cap;
    auto time = discretize(pair.time, dt, cap);
    // a finite window longer than the run never contributes past the cap
    if (time.size() > history_cap) time.weights.resize(history_cap);
    out.time.push_back(std::move(time));
  }
  return out;
}

void spatial_conv(const StateMatrix& level, const DiscreteKernelMatrix& kernels, KernelOrientation orientation,
                  double dx, std::span<double> out) {
  const std::size_t n = kernels.species;
  const std::size_t cells = level.cells();
  const std::size_t faces = cells + 1;
  if (level.species() != n || out.size() != n * n * faces) {
    throw Error(ErrorKind::shape_mismatch, "spatial_conv: state or output shape does not match the kernels");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t p = k * n + s;
      const auto& w = kernels.space[p].weights;
      const auto u = level.row(s);
      double* dst = out.data() + p * faces;
      for (std::size_t q = 0; q < w.size(); ++q) {
        const double wq = w[q];
        if (wq == 0.0) continue;
        if (orientation == KernelOrientation::literal) {
          // face j reads cell j - 1 - q
          for (std::size_t j = q + 1; j < faces; ++j) dst[j] += wq * u[j - 1 - q];
        } else {
          // face j reads cell j + q
          for (std::size_t j = 0; j + q < cells; ++j) dst[j] += wq * u[j + q];
        }
      }
      for (std::size_t j = 0; j < faces; ++j) dst[j] *= dx;
    }
  }
}

StateHistory::StateHistory(DiscreteKernelMatrix flux_kernels, DiscreteKernelMatrix source_kernels, std::size_t cells,
                           double dx, double dt, bool memory, KernelOrientation orientation, bool with_source)
    : flux_kernels_(std::move(flux_kernels)),
      source_kernels_(std::move(source_kernels)),
      species_(flux_kernels_.species),
      cells_(cells),
      dx_(dx),
      dt_(dt),
      memory_(memory),
      orientation_(orientation),
      with_source_(with_source),
      shared_space_(same_space_weights(flux_kernels_, source_kernels_)),
      flux_window_(memory ? flux_kernels_.window() : 1),
      source_window_(with_source ? (memory ? source_kernels_.window() : 1) : 0),
      states_(std::max(flux_window_, source_window_)),
      flux_cache_(shared_space_ ? std::max(flux_window_, source_window_) : flux_window_),
      source_cache_(shared_space_ || !with_source ? 1 : source_window_) {
  if (source_kernels_.species != species_) {
    throw Error(ErrorKind::shape_mismatch, "flux and source kernel matrices differ in size");
  }
  if (!(dx > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "history needs dx > 0 and dt > 0");
  }
}

StateHistory::StateHistory(const SystemSpec& spec, const Grid& grid)
    : StateHistory(discretize(spec.flux_kernels, grid.dx, grid.dt, history_cap(grid)),
                   discretize(spec.source_kernels, grid.dx, grid.dt, history_cap(grid)), grid.cells, grid.dx,
                   grid.dt, spec.memory, spec.orientation, spec.has_source()) {}

void StateHistory::push(const StateMatrix& level) {
  if (level.species() != species_ || level.cells() != cells_) {
    throw Error(ErrorKind::shape_mismatch, "StateHistory::push: level shape does not match the history");
  }
  states_.push(level);

  const std::size_t size = pairs() * interfaces();
  auto& flux_slot = flux_cache_.next_slot();
  flux_slot.resize(size);
  spatial_conv(level, flux_kernels_, orientation_, dx_, flux_slot);
  flux_cache_.commit();

  if (with_source_ && !shared_space_) {
    auto& source_slot = source_cache_.next_slot();
    source_slot.resize(size);
    spatial_conv(level, source_kernels_, orientation_, dx_, source_slot);
    source_cache_.commit();
  }
  ++levels_pushed_;
}

auto StateHistory::source_spatial(std::size_t lag) const -> const std::vector<double>& {
  return shared_space_ ? flux_cache_.recent(lag) : source_cache_.recent(lag);
}

void StateHistory::accumulate_time(const RingBuffer<std::vector<double>>& cache, const DiscreteKernelMatrix& kernels,
                                   std::span<double> out) const {
  const std::size_t faces = interfaces();
  if (out.size() != pairs() * faces) {
    throw Error(ErrorKind::shape_mismatch, "convolution output has the wrong size");
  }
  if (levels_pushed_ == 0) {
    throw Error(ErrorKind::invalid_parameter, "convolution requested on an empty history");
  }
  if (!memory_) {
    const auto& newest = cache.recent(0);
    std::copy(newest.begin(), newest.end(), out.begin());
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t available = std::min(levels_pushed_, cache.size());
  for (std::size_t p = 0; p < pairs(); ++p) {
    const auto& gamma = kernels.time[p].weights;
    const std::size_t lags = std::min(available, gamma.size());
    double* dst = out.data() + p * faces;
    for (std::size_t lag = 0; lag < lags; ++lag) {
      const double weight = dt_ * gamma[lag];
      if (weight == 0.0) continue;
      const double* src = cache.recent(lag).data() + p * faces;
      for (std::size_t j = 0; j < faces; ++j) dst[j] += weight * src[j];
    }
  }
}

void StateHistory::flux_convolution(std::span<double> out) const {
  accumulate_time(flux_cache_, flux_kernels_, out);
}

void StateHistory::source_convolution(std::span<double> out) const {
  if (!with_source_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  accumulate_time(shared_space_ ? flux_cache_ : source_cache_, source_kernels_, out);
}

void StateHistory::source_convolution_cells(std::span<double> out) const {
  const std::size_t faces = interfaces();
  if (out.size() != pairs() * cells_) {
    throw Error(ErrorKind::shape_mismatch, "cell-centered convolution output has the wrong size");
  }
  std::vector<double> at_faces(pairs() * faces);
  source_convolution(at_faces);
  for (std::size_t p = 0; p < pairs(); ++p) {
    const double* src = at_faces.data() + p * faces;
    double* dst = out.data() + p * cells_;
    for (std::size_t i = 0; i < cells_; ++i) dst[i] = 0.5 * (src[i] + src[i + 1]);
  }
}

}  // namespace nlmem
