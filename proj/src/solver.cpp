#include "nlmem/solver.hpp"

#include "nlmem/error.hpp"
#include "nlmem/log.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace nlmem {

auto lf_flux(double velocity, double u_left, double u_right, const ScalarFn& flux, double lambda, double beta)
    -> double {
  return 0.5 * velocity * (flux(u_left) + flux(u_right)) - beta * (u_right - u_left) / (2.0 * lambda);
}

auto marching_update(double u_left, double u, double u_right, double nu_left, double nu_right, const ScalarFn& flux,
                     double lambda, double beta) -> double {
  return u - lambda * (lf_flux(nu_right, u, u_right, flux, lambda, beta) - lf_flux(nu_left, u_left, u, flux, lambda, beta));
}

namespace {

auto max_space_support(const KernelMatrix& kernels) -> double {
  double r = 0.0;
  for (const auto& pair : kernels.entries()) r = std::max(r, pair.space.support());
  return r;
}

}  // namespace

Solver::Solver(const SystemSpec& spec, const Grid& grid, SolverOptions options)
    : spec_(spec),
      grid_(grid),
      options_(std::move(options)),
      state_(project_initial(spec, grid)),
      previous_(state_),
      history_(spec, grid),
      cfl_(check_cfl(spec, grid.lambda, options_.beta, grid.dt)) {
  if (spec.flux_kernels.size() != spec.species_count() || spec.source_kernels.size() != spec.species_count()) {
    throw Error(ErrorKind::invalid_model, "kernel matrices do not match the species count");
  }
  if (options_.warn_cfl && !cfl_.admissible) {
    std::ostringstream msg;
    msg << "lambda = " << grid.lambda << " exceeds the conservative CFL bound " << cfl_.bound
        << " (|f|_Lip = " << cfl_.constants.flux_lipschitz << ", ||nu||_inf = " << cfl_.constants.velocity_sup
        << ", |R|_Lip = " << cfl_.constants.source_lipschitz << ")";
    warn(msg.str());
  }
  if (options_.guard_boundary) {
    const double radius = options_.boundary_radius > 0.0 ? options_.boundary_radius : max_space_support(spec.flux_kernels);
    boundary_cells_ = std::min(grid.cells / 2, static_cast<std::size_t>(std::ceil(radius / grid.dx - 1e-9)));
  }
  const std::size_t pairs = history_.pairs();
  conv_faces_.resize(pairs * grid.interfaces());
  source_cells_.resize(pairs * grid.cells);
  velocity_faces_.resize(grid.interfaces());
  flux_faces_.resize(grid.interfaces());
  history_.push(state_);
  check_boundary();
}

void Solver::check_boundary() const {
  if (boundary_cells_ == 0) return;
  double total = 0.0;
  double edge = 0.0;
  for (std::size_t k = 0; k < state_.species(); ++k) {
    const auto row = state_.row(k);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double m = std::abs(row[i]);
      total += m;
      if (i < boundary_cells_ || i + boundary_cells_ >= row.size()) edge += m;
    }
  }
  if (total > 0.0 && edge > options_.boundary_tolerance * total) {
    std::ostringstream msg;
    msg << "mass fraction " << edge / total << " within " << boundary_cells_ << " cells of the domain boundary at step "
        << step_ << " (t = " << time_ << "); enlarge the domain";
    throw Error(ErrorKind::boundary_contact, msg.str());
  }
}

void Solver::step() {
  if (done()) return;
  const std::size_t n = step_ + 1;
  const std::size_t species = spec_.species_count();
  const std::size_t cells = grid_.cells;
  const std::size_t faces = grid_.interfaces();
  const double dt_n = grid_.step_length(n);
  // a shortened final step is the convex fraction of a full flux step
  const double fraction = dt_n / grid_.dt;
  const double lambda = grid_.lambda;
  const double beta = options_.beta;

  history_.flux_convolution(conv_faces_);
  const bool with_source = spec_.has_source();
  if (with_source) history_.source_convolution_cells(source_cells_);

  StateMatrix next(species, cells);
  std::vector<double> z(species);
  for (std::size_t k = 0; k < species; ++k) {
    const auto& sp = spec_.species[k];
    const auto u = state_.row(k);
    for (std::size_t j = 0; j < faces; ++j) {
      for (std::size_t s = 0; s < species; ++s) z[s] = conv_faces_[(k * species + s) * faces + j];
      velocity_faces_[j] = sp.velocity(z);
      const double left = j > 0 ? u[j - 1] : 0.0;
      const double right = j < cells ? u[j] : 0.0;
      flux_faces_[j] = lf_flux(velocity_faces_[j], left, right, sp.flux, lambda, beta);
    }
    auto out = next.row(k);
    for (std::size_t i = 0; i < cells; ++i) {
      out[i] = u[i] - fraction * lambda * (flux_faces_[i + 1] - flux_faces_[i]);
    }
  }

  if (with_source) {
    std::vector<double> local(species);
    std::vector<double> d(species * species);
    for (std::size_t i = 0; i < cells; ++i) {
      for (std::size_t s = 0; s < species; ++s) local[s] = state_(s, i);
      for (std::size_t p = 0; p < species * species; ++p) d[p] = source_cells_[p * cells + i];
      for (std::size_t k = 0; k < species; ++k) {
        const auto& source = spec_.species[k].source;
        if (source) next(k, i) += dt_n * source(local, d);
      }
    }
  }

  for (double v : next.data()) {
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite state at step " << n << " (t = " << grid_.time_at(n) << ")";
      throw Error(ErrorKind::numerical_blowup, msg.str());
    }
  }

  previous_ = std::move(state_);
  state_ = std::move(next);
  step_ = n;
  time_ = grid_.time_at(n);
  history_.push(state_);
  check_boundary();
}

auto Solver::diagnostics_row() const -> DiagnosticsRow {
  const std::size_t species = state_.species();
  DiagnosticsRow row;
  row.step = step_;
  row.time = time_;
  row.mass.resize(species);
  row.min.resize(species);
  row.max.resize(species);
  row.tv.resize(species);
  double change = 0.0;
  for (std::size_t k = 0; k < species; ++k) {
    const auto u = state_.row(k);
    const auto prev = previous_.row(k);
    double mass = 0.0;
    double tv = 0.0;
    double lo = u.empty() ? 0.0 : u[0];
    double hi = lo;
    for (std::size_t i = 0; i < u.size(); ++i) {
      mass += u[i];
      lo = std::min(lo, u[i]);
      hi = std::max(hi, u[i]);
      if (i + 1 < u.size()) tv += std::abs(u[i + 1] - u[i]);
      change += std::abs(u[i] - prev[i]);
    }
    row.mass[k] = grid_.dx * mass;
    row.min[k] = lo;
    row.max[k] = hi;
    row.tv[k] = tv;
    row.total_mass += row.mass[k];
  }
  if (step_ > 0) {
    row.time_derivative_l1 = grid_.dx * change / grid_.step_length(step_);
  }
  // conv_faces_ holds the convolutions that produced the current level
  if (step_ > 0) {
    for (double v : conv_faces_) row.max_conv = std::max(row.max_conv, std::abs(v));
  }
  return row;
}

auto Solver::snapshot() const -> Snapshot {
  const std::size_t species = state_.species();
  const std::size_t cells = grid_.cells;
  const std::size_t faces = grid_.interfaces();
  const std::size_t pairs = species * species;
  Snapshot snap;
  snap.time = time_;
  snap.step = step_;
  snap.u = state_;
  snap.c = StateMatrix(species, cells);
  snap.d = StateMatrix(species, cells);

  std::vector<double> c_faces(pairs * faces);
  history_.flux_convolution(c_faces);
  std::vector<double> d_faces(pairs * faces, 0.0);
  history_.source_convolution(d_faces);

  const double inv = 1.0 / static_cast<double>(species);
  for (std::size_t k = 0; k < species; ++k) {
    for (std::size_t s = 0; s < species; ++s) {
      const std::size_t p = k * species + s;
      for (std::size_t i = 0; i < cells; ++i) {
        snap.c(k, i) += inv * 0.5 * (c_faces[p * faces + i] + c_faces[p * faces + i + 1]);
        snap.d(k, i) += inv * 0.5 * (d_faces[p * faces + i] + d_faces[p * faces + i + 1]);
      }
    }
  }
  if (options_.dump_conv) {
    snap.c_faces = std::move(c_faces);
    snap.d_faces = std::move(d_faces);
  }
  return snap;
}

auto Solver::run() -> RunResult {
  const auto started = std::chrono::steady_clock::now();

  // nearest time level for each requested snapshot time; the final level is always kept
  std::set<std::size_t> targets{grid_.steps};
  for (double t : options_.snapshot_times) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw Error(ErrorKind::invalid_parameter, "snapshot times must be finite and >= 0");
    }
    std::size_t best = 0;
    double best_gap = std::abs(t);
    const auto guess = static_cast<std::size_t>(std::floor(t / grid_.dt));
    for (std::size_t cand : {guess, guess + 1}) {
      const std::size_t c = std::min(cand, grid_.steps);
      const double gap = std::abs(grid_.time_at(c) - t);
      if (gap < best_gap) {
        best_gap = gap;
        best = c;
      }
    }
    targets.insert(best);
  }

  RunResult result;
  result.grid = grid_;
  result.beta = options_.beta;
  result.cfl = cfl_;
  result.diagnostics.reserve(grid_.steps - step_ + 1);

  auto record = [&] {
    result.diagnostics.push_back(diagnostics_row());
    if (targets.count(step_) != 0U) result.snapshots.push_back(snapshot());
  };
  record();
  while (!done()) {
    step();
    record();
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

auto run(const SystemSpec& spec, const Grid& grid, const SolverOptions& options) -> RunResult {
  Solver solver(spec, grid, options);
  return solver.run();
}

}  // namespace nlmem
