#include "nlmem/experiments.hpp"

#include "nlmem/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace nlmem {

namespace {

auto worker_count(std::size_t requested, std::size_t jobs) -> std::size_t {
  std::size_t n = requested;
  if (n == 0) n = std::max(1U, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs job(0..count-1) on `threads` workers; jobs must not throw.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = worker_count(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& t : pool) t.join();
}

auto compare(const RunConfig& reference, const RunConfig& variant) -> Comparison {
  Comparison c;
  c.reference = run_config(reference);
  c.variant = run_config(variant);
  c.gaps = snapshot_gaps(c.reference, c.variant);
  return c;
}

}  // namespace

auto snapshot_gaps(const RunResult& a, const RunResult& b) -> std::vector<GapRow> {
  std::vector<GapRow> gaps;
  for (const auto& sa : a.snapshots) {
    const auto it = std::find_if(b.snapshots.begin(), b.snapshots.end(),
                                 [&](const Snapshot& sb) { return sb.step == sa.step; });
    if (it == b.snapshots.end()) continue;
    gaps.push_back({sa.time, l1_distance(sa.u, it->u, a.grid.dx)});
  }
  return gaps;
}

auto compare_memory(const RunConfig& config) -> Comparison {
  RunConfig with = config;
  with.model.two_lane.with_memory = true;
  RunConfig without = config;
  without.model.two_lane.with_memory = false;
  return compare(with, without);
}

auto compare_source(const RunConfig& config) -> Comparison {
  RunConfig with = config;
  with.model.two_lane.with_source = true;
  RunConfig without = config;
  without.model.two_lane.with_source = false;
  return compare(with, without);
}

auto to_string(SweepTarget target) -> const char* {
  switch (target) {
    case SweepTarget::mu: return "mu";
    case SweepTarget::g: return "g";
    case SweepTarget::gamma: return "gamma";
    case SweepTarget::eta: return "eta";
    case SweepTarget::theta: return "theta";
    case SweepTarget::source: return "source";
  }
  return "?";
}

auto parse_sweep_target(const std::string& name) -> SweepTarget {
  if (name == "mu") return SweepTarget::mu;
  if (name == "g") return SweepTarget::g;
  if (name == "gamma" || name == "Gamma") return SweepTarget::gamma;
  if (name == "eta") return SweepTarget::eta;
  if (name == "theta") return SweepTarget::theta;
  if (name == "source" || name == "R") return SweepTarget::source;
  throw Error(ErrorKind::invalid_parameter, "unknown sweep target '" + name + "'");
}

void validate(const SweepSpec& sweep) {
  if (sweep.eps.empty()) throw Error(ErrorKind::invalid_parameter, "sweep needs at least one eps");
  for (std::size_t i = 0; i < sweep.eps.size(); ++i) {
    if (!(sweep.eps[i] > 0.0) || sweep.eps[i] > 1.0) {
      throw Error(ErrorKind::invalid_parameter, "sweep eps must lie in (0, 1]");
    }
    if (i > 0 && !(sweep.eps[i] < sweep.eps[i - 1])) {
      throw Error(ErrorKind::invalid_parameter, "sweep eps must be strictly decreasing");
    }
  }
}

auto apply_perturbation(RunConfig config, SweepTarget target, double eps) -> RunConfig {
  auto& tl = config.model.two_lane;
  switch (target) {
    case SweepTarget::mu: tl.eps_mu = eps; break;
    case SweepTarget::g: tl.eps_g = eps; break;
    case SweepTarget::gamma: tl.eps_gamma = eps; break;
    case SweepTarget::eta:
    case SweepTarget::theta:
      if (!tl.eta_x || !tl.eta_t) {
        throw Error(ErrorKind::invalid_parameter,
                    std::string("perturbing ") + to_string(target) + " needs separate source kernels (eta_x, eta_t)");
      }
      (target == SweepTarget::eta ? tl.eps_eta : tl.eps_theta) = eps;
      break;
    case SweepTarget::source: tl.eps_source = eps; break;
  }
  return config;
}

auto RunCache::get(const RunConfig& config) -> std::shared_ptr<const RunResult> {
  const std::string key = to_json(config).dump();
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto result = std::make_shared<const RunResult>(run_config(config));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(result)).first->second;
}

auto RunCache::size() const -> std::size_t {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

auto RunCache::hits() const -> std::size_t {
  std::lock_guard lock(mutex_);
  return hits_;
}

auto perturbation_sweep(const SweepSpec& sweep, RunCache* cache) -> SweepResult {
  validate(sweep);
  RunCache local;
  RunCache& runs = cache != nullptr ? *cache : local;

  SweepResult result;
  result.target = sweep.target;
  std::vector<RunConfig> configs;
  configs.reserve(sweep.eps.size());
  for (double eps : sweep.eps) configs.push_back(apply_perturbation(sweep.baseline, sweep.target, eps));

  // baseline first so the rows share one cached result
  result.baseline = runs.get(sweep.baseline);
  const double dx = result.baseline->grid.dx;
  const auto& reference = result.baseline->final_state();

  result.report.rows.resize(sweep.eps.size());
  result.finals.resize(sweep.eps.size());
  parallel_for(sweep.eps.size(), sweep.threads, [&](std::size_t r) {
    auto& row = result.report.rows[r];
    row.eps = sweep.eps[r];
    try {
      // perturbed rows are not cached: each is used once
      const auto perturbed = run_config(configs[r]);
      row.per_species = l1_distance_by_species(perturbed.final_state(), reference, dx);
      row.error = 0.0;
      for (double e : row.per_species) row.error += e;
      result.finals[r] = perturbed.final_state();
    } catch (const std::exception& e) {
      row.failure = e.what();
      row.error = std::nan("");
    }
  });
  fill_rates(result.report);
  return result;
}

auto self_convergence(const RunConfig& config, std::size_t levels, std::size_t threads)
    -> std::vector<RefinementRow> {
  if (levels == 0) throw Error(ErrorKind::invalid_parameter, "self-convergence needs at least one refinement");
  std::vector<RunConfig> configs(levels + 1, config);
  for (std::size_t l = 0; l <= levels; ++l) {
    configs[l].grid.dx = config.grid.dx / std::pow(2.0, static_cast<double>(l));
    configs[l].snapshot_times = {};
  }
  std::vector<StateMatrix> finals(levels + 1);
  std::vector<std::string> failures(levels + 1);
  parallel_for(levels + 1, threads, [&](std::size_t l) {
    try {
      finals[l] = run_config(configs[l]).final_state();
    } catch (const std::exception& e) {
      failures[l] = e.what();
    }
  });
  for (const auto& f : failures) {
    if (!f.empty()) throw Error(ErrorKind::numerical_blowup, "self-convergence run failed: " + f);
  }
  std::vector<RefinementRow> rows;
  for (std::size_t l = 0; l < levels; ++l) {
    RefinementRow row;
    row.dx = configs[l].grid.dx;
    row.distance = l1_distance(finals[l], coarsen(finals[l + 1], 2), row.dx);
    if (!rows.empty() && row.distance > 0.0) row.factor = rows.back().distance / row.distance;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nlmem
