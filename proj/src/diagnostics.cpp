#include "nlmem/diagnostics.hpp"

#include "nlmem/error.hpp"

#include <algorithm>
#include <cmath>

namespace nlmem {

namespace {

void require_same_shape(const StateMatrix& a, const StateMatrix& b) {
  if (a.species() != b.species() || a.cells() != b.cells()) {
    throw Error(ErrorKind::shape_mismatch, "states differ in shape");
  }
}

auto sup_norm(const DiagnosticsRow& row) -> double {
  double m = 0.0;
  for (std::size_t k = 0; k < row.max.size(); ++k) {
    m = std::max({m, std::abs(row.max[k]), std::abs(row.min[k])});
  }
  return m;
}

auto tv_sum(const DiagnosticsRow& row) -> double {
  double s = 0.0;
  for (double v : row.tv) s += v;
  return s;
}

}  // namespace

auto l1_distance_by_species(const StateMatrix& a, const StateMatrix& b, double dx) -> std::vector<double> {
  require_same_shape(a, b);
  std::vector<double> out(a.species(), 0.0);
  for (std::size_t k = 0; k < a.species(); ++k) {
    const auto ra = a.row(k);
    const auto rb = b.row(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) sum += std::abs(ra[i] - rb[i]);
    out[k] = dx * sum;
  }
  return out;
}

auto l1_distance(const StateMatrix& a, const StateMatrix& b, double dx) -> double {
  double total = 0.0;
  for (double v : l1_distance_by_species(a, b, dx)) total += v;
  return total;
}

auto rate(double e_coarse, double e_fine) -> std::optional<double> {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::nullopt;
  return std::log2(e_coarse / e_fine);
}

auto total_variation(std::span<const double> u) -> double {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) tv += std::abs(u[i + 1] - u[i]);
  return tv;
}

auto coarsen(const StateMatrix& fine, std::size_t factor) -> StateMatrix {
  if (factor == 0 || fine.cells() % factor != 0) {
    throw Error(ErrorKind::shape_mismatch, "coarsening factor must divide the cell count");
  }
  StateMatrix out(fine.species(), fine.cells() / factor);
  for (std::size_t k = 0; k < fine.species(); ++k) {
    for (std::size_t i = 0; i < out.cells(); ++i) {
      double sum = 0.0;
      for (std::size_t r = 0; r < factor; ++r) sum += fine(k, i * factor + r);
      out(k, i) = sum / static_cast<double>(factor);
    }
  }
  return out;
}

void fill_rates(ErrorReport& report) {
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    auto& row = report.rows[r];
    row.alpha.reset();
    if (r == 0) continue;
    const auto& prev = report.rows[r - 1];
    if (!row.failure.empty() || !prev.failure.empty()) continue;
    row.alpha = rate(prev.error, row.error);
  }
}

auto regularity_report(const RunResult& result) -> RegularitySummary {
  RegularitySummary s;
  if (result.diagnostics.empty()) return s;
  const auto& first = result.diagnostics.front();
  const std::size_t species = first.mass.size();
  s.min = first.min;
  s.max = first.max;
  s.mass_drift.assign(species, 0.0);
  s.tv_initial = tv_sum(first);
  s.tv_max = s.tv_initial;
  const double sup0 = sup_norm(first);
  const double mass0 = first.total_mass;

  for (const auto& row : result.diagnostics) {
    for (std::size_t k = 0; k < species; ++k) {
      s.min[k] = std::min(s.min[k], row.min[k]);
      s.max[k] = std::max(s.max[k], row.max[k]);
      s.mass_drift[k] = std::max(s.mass_drift[k], std::abs(row.mass[k] - first.mass[k]));
    }
    s.total_mass_drift = std::max(s.total_mass_drift, std::abs(row.total_mass - mass0));
    const double tv = tv_sum(row);
    s.tv_max = std::max(s.tv_max, tv);
    s.lipschitz_time = std::max(s.lipschitz_time, row.time_derivative_l1);
    if (row.time > 0.0) {
      const double tv_c = std::log((tv + 1.0) / (s.tv_initial + 1.0)) / row.time;
      s.tv_constant = std::max(s.tv_constant, tv_c);
      if (sup0 > 0.0) {
        const double sup = sup_norm(row);
        const double l_c = std::log(sup / sup0) / (row.time * (1.0 + std::abs(mass0)));
        s.linf_constant = std::max(s.linf_constant, l_c);
      }
    }
  }
  s.tv_growth = s.tv_initial > 0.0 ? s.tv_max / s.tv_initial : 0.0;
  return s;
}

}  // namespace nlmem
