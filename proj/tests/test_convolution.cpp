#include "nlmem/convolution.hpp"
#include "nlmem/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace nlmem;

namespace {

auto uniform_matrix(std::size_t n, const DiscreteKernel& space, const DiscreteKernel& time) -> DiscreteKernelMatrix {
  DiscreteKernelMatrix m;
  m.species = n;
  m.space.assign(n * n, space);
  m.time.assign(n * n, time);
  return m;
}

auto random_matrix(std::mt19937_64& rng, std::size_t n, double dx, double dt) -> DiscreteKernelMatrix {
  std::uniform_int_distribution<std::size_t> len(1, 6);
  DiscreteKernelMatrix m;
  m.species = n;
  for (std::size_t p = 0; p < n * n; ++p) {
    m.space.push_back({oracle::random_weights(rng, len(rng)), dx});
    m.time.push_back({oracle::random_weights(rng, len(rng)), dt});
  }
  return m;
}

}  // namespace

TEST_CASE("ring buffer keeps the newest entries") {
  RingBuffer<int> rb(3);
  CHECK(rb.empty());
  for (int i = 0; i < 5; ++i) rb.push(i);
  CHECK(rb.size() == 3);
  CHECK(rb.recent(0) == 4);
  CHECK(rb.recent(1) == 3);
  CHECK(rb.recent(2) == 2);
}

TEST_CASE("spatial convolution of constant, zero and impulse states") {
  const double dx = 0.1;
  const std::size_t cells = 16;
  const DiscreteKernel w{{4.0, 3.0, 2.0, 1.0}, dx};
  const auto kernels = uniform_matrix(1, w, DiscreteKernel{{1.0}, 1.0});
  std::vector<double> out(cells + 1);

  StateMatrix constant(1, cells, 0.7);
  spatial_conv(constant, kernels, KernelOrientation::literal, dx, out);
  for (std::size_t j = w.size(); j <= cells; ++j) CHECK(out[j] == doctest::Approx(0.7).epsilon(1e-14));

  StateMatrix zero(1, cells);
  spatial_conv(zero, kernels, KernelOrientation::literal, dx, out);
  for (double v : out) CHECK(v == 0.0);

  for (std::size_t p = 0; p < cells; ++p) {
    StateMatrix impulse(1, cells);
    impulse(0, p) = 1.0 / dx;
    spatial_conv(impulse, kernels, KernelOrientation::literal, dx, out);
    for (std::size_t j = 0; j <= cells; ++j) {
      // interface j sees cell j - 1 - q
      const double expected = (j >= p + 1) ? w[j - 1 - p] : 0.0;
      CHECK(out[j] == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("downstream orientation mirrors the stencil") {
  const double dx = 0.1;
  const std::size_t cells = 12;
  const DiscreteKernel w{{4.0, 3.0, 2.0, 1.0}, dx};
  const auto kernels = uniform_matrix(1, w, DiscreteKernel{{1.0}, 1.0});
  std::vector<double> out(cells + 1);
  StateMatrix impulse(1, cells);
  const std::size_t p = 6;
  impulse(0, p) = 1.0 / dx;
  spatial_conv(impulse, kernels, KernelOrientation::downstream, dx, out);
  for (std::size_t j = 0; j <= cells; ++j) {
    const double expected = j <= p ? w[p - j] : 0.0;
    CHECK(out[j] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("translation equivariance at interior interfaces") {
  std::mt19937_64 rng(3);
  const double dx = 0.05;
  const std::size_t cells = 32;
  const DiscreteKernel w{oracle::random_weights(rng, 5), dx};
  const auto kernels = uniform_matrix(1, w, DiscreteKernel{{1.0}, 1.0});
  auto u = oracle::random_state(rng, 1, cells);
  StateMatrix shifted(1, cells);
  for (std::size_t i = 1; i < cells; ++i) shifted(0, i) = u(0, i - 1);
  std::vector<double> a(cells + 1);
  std::vector<double> b(cells + 1);
  spatial_conv(u, kernels, KernelOrientation::literal, dx, a);
  spatial_conv(shifted, kernels, KernelOrientation::literal, dx, b);
  for (std::size_t j = 1; j + 1 <= cells; ++j) CHECK(b[j + 1] == doctest::Approx(a[j]).epsilon(1e-14));
}

TEST_CASE("cached separable convolution matches the brute-force sum") {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t cells = 4 + trial % 12;
    const std::size_t steps = 1 + trial % 9;
    const double dx = 0.05;
    const double dt = 0.02;
    const auto flux = random_matrix(rng, 2, dx, dt);
    const auto source = random_matrix(rng, 2, dx, dt);
    StateHistory history(flux, source, cells, dx, dt, true, KernelOrientation::literal, true);
    std::vector<StateMatrix> levels;
    const std::size_t faces = cells + 1;
    std::vector<double> c(4 * faces);
    std::vector<double> d(4 * faces);
    for (std::size_t n = 0; n <= steps; ++n) {
      levels.push_back(oracle::random_state(rng, 2, cells));
      history.push(levels.back());
      CHECK(history.retained_levels() <= std::max(flux.window(), source.window()));
      history.flux_convolution(c);
      history.source_convolution(d);
      const auto c_ref = oracle::convolution(levels, flux, dx, dt, true);
      const auto d_ref = oracle::convolution(levels, source, dx, dt, true);
      for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::abs(c[i] - c_ref[i]) <= 1e-13);
        CHECK(std::abs(d[i] - d_ref[i]) <= 1e-13);
      }
    }
  }
}

TEST_CASE("memoryless history uses the newest level only") {
  std::mt19937_64 rng(5);
  const double dx = 0.1;
  const double dt = 0.05;
  const auto flux = random_matrix(rng, 2, dx, dt);
  StateHistory history(flux, flux, 10, dx, dt, false, KernelOrientation::literal, false);
  CHECK(history.flux_window() == 1);
  std::vector<StateMatrix> levels;
  std::vector<double> c(4 * 11);
  for (int n = 0; n < 4; ++n) {
    levels.push_back(oracle::random_state(rng, 2, 10));
    history.push(levels.back());
    history.flux_convolution(c);
    const auto ref = oracle::convolution(levels, flux, dx, dt, false);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(c[i] - ref[i]) <= 1e-14);
  }
  CHECK(history.retained_levels() == 1);
}

TEST_CASE("first level convolution is a single weighted term") {
  const double dx = 0.1;
  const double dt = 0.05;
  const DiscreteKernel w{{5.0, 5.0}, dx};
  const DiscreteKernel g{{8.0, 6.0, 4.0, 2.0}, dt};
  const auto kernels = uniform_matrix(1, w, g);
  StateHistory history(kernels, kernels, 8, dx, dt, true, KernelOrientation::literal, false);
  history.push(StateMatrix(1, 8, 0.5));
  std::vector<double> c(9);
  history.flux_convolution(c);
  // interior interfaces: S = 0.5, c = dt gamma[0] S
  CHECK(c[4] == doctest::Approx(dt * 8.0 * 0.5).epsilon(1e-14));
}

TEST_CASE("constant history saturates to the state value") {
  const auto spec = build_two_lane(0.0, 0.0, true, true);
  const auto grid = Grid::make(-1.0, 1.0, 0.0078125, 0.1286, 0.5);
  StateHistory history(spec, grid);
  const std::size_t window = history.flux_window();
  CHECK(window == covering_cells(0.4, grid.dt));
  const StateMatrix level(2, grid.cells, 0.6);
  std::vector<double> c(4 * grid.interfaces());
  for (std::size_t n = 0; n < window + 3; ++n) history.push(level);
  CHECK(history.retained_levels() == window);
  history.flux_convolution(c);
  const std::size_t faces = grid.interfaces();
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(c[p * faces + faces / 2] == doctest::Approx(0.6).epsilon(1e-10));
  }
  std::vector<double> cells(4 * grid.cells);
  history.source_convolution_cells(cells);
  CHECK(cells[grid.cells / 2] == doctest::Approx(0.6).epsilon(1e-10));
}

TEST_CASE("convolutions of states in [0,1] stay in [0,1]") {
  std::mt19937_64 rng(17);
  const auto spec = build_two_lane(0.0, 0.0, true, true);
  const auto grid = Grid::make(-0.5, 0.5, 0.0078125, 0.1286, 0.5);
  StateHistory history(spec, grid);
  std::vector<double> c(4 * grid.interfaces());
  for (int n = 0; n < 60; ++n) {
    history.push(oracle::random_state(rng, 2, grid.cells));
    history.flux_convolution(c);
    for (double v : c) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("history rejects mismatched levels and empty queries") {
  const DiscreteKernel w{{1.0}, 1.0};
  const auto kernels = uniform_matrix(1, w, w);
  StateHistory history(kernels, kernels, 4, 1.0, 1.0, true, KernelOrientation::literal, false);
  std::vector<double> c(5);
  CHECK_THROWS_AS(history.flux_convolution(c), Error);
  CHECK_THROWS_AS(history.push(StateMatrix(1, 5)), Error);
  history.push(StateMatrix(1, 4));
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(history.flux_convolution(wrong), Error);
}
