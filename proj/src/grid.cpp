#include "nlmem/grid.hpp"

#include "nlmem/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlmem {

auto Grid::make(double x_min, double x_max, double dx, double lambda, double final_time) -> Grid {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw Error(ErrorKind::invalid_parameter, "grid needs x_min < x_max");
  }
  if (!(dx > 0.0) || !(lambda > 0.0) || !(final_time >= 0.0) || !std::isfinite(final_time)) {
    throw Error(ErrorKind::invalid_parameter, "grid needs dx > 0, lambda > 0 and a finite T >= 0");
  }
  const double length = x_max - x_min;
  const double ratio = length / dx;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(rounded * dx - length) > 1e-12 * std::max(1.0, length)) {
    std::ostringstream msg;
    msg << "domain length " << length << " is not a multiple of dx = " << dx;
    throw Error(ErrorKind::invalid_parameter, msg.str());
  }

  Grid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.dx = dx;
  g.cells = static_cast<std::size_t>(rounded);
  g.lambda = lambda;
  g.dt = lambda * dx;
  g.final_time = final_time;
  if (final_time == 0.0) {
    g.steps = 0;
    g.last_dt = 0.0;
  } else {
    const double n = final_time / g.dt;
    g.steps = static_cast<std::size_t>(std::ceil(n * (1.0 - 1e-12)));
    g.steps = std::max<std::size_t>(g.steps, 1);
    g.last_dt = final_time - static_cast<double>(g.steps - 1) * g.dt;
  }
  return g;
}

auto Grid::time_at(std::size_t n) const -> double {
  if (n >= steps) return final_time;
  return static_cast<double>(n) * dt;
}

auto project_initial(const SystemSpec& spec, const Grid& grid) -> StateMatrix {
  const std::size_t n = spec.species_count();
  StateMatrix out(n, grid.cells);
  constexpr double clamp_tol = 1e-12;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& u0 = spec.species[k].initial;
    if (!u0) throw Error(ErrorKind::invalid_model, "species without initial data");
    for (std::size_t i = 0; i < grid.cells; ++i) {
      const double lo = grid.interface_position(i);
      double v = gauss_legendre5(u0, lo, lo + grid.dx) / grid.dx;
      if (!std::isfinite(v) || v < -clamp_tol || v > 1.0 + clamp_tol) {
        std::ostringstream msg;
        msg << "initial data of species " << (k + 1) << " leaves [0,1] in cell " << i << " (average " << v << ")";
        throw Error(ErrorKind::invalid_model, msg.str());
      }
      out(k, i) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

auto check_cfl(const ModelBounds& c, double lambda, double beta, double dt) -> CflReport {
  if (!(beta > 0.0 && beta < 2.0 / 3.0)) {
    throw Error(ErrorKind::invalid_parameter, "beta must lie in (0, 2/3)");
  }
  if (!(lambda > 0.0) || !(dt >= 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "CFL check needs lambda > 0 and dt >= 0");
  }
  const double structural = std::min({1.0, 4.0 - 6.0 * beta, 6.0 * beta});
  const double denom = 1.0 + 6.0 * c.flux_lipschitz * c.velocity_sup;

  CflReport r;
  r.constants = c;
  r.bound = std::min(structural, 1.0 - dt * c.source_lipschitz) / denom;
  // relative slack so lambda = max_lambda itself is admissible
  r.admissible = lambda <= r.bound * (1.0 + 1e-12);
  // dt = lambda dx appears on both sides:
  //   lambda denom <= structural  and  lambda (denom + dx |R|) <= 1
  const double dx = dt / lambda;
  r.max_lambda = std::min(structural / denom, 1.0 / (denom + dx * c.source_lipschitz));
  r.max_dt = r.max_lambda * dx;
  return r;
}

auto check_cfl(const SystemSpec& spec, double lambda, double beta, double dt) -> CflReport {
  return check_cfl(estimate_bounds(spec), lambda, beta, dt);
}

}  // namespace nlmem
