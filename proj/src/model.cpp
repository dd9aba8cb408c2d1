#include "nlmem/model.hpp"

#include "nlmem/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace nlmem {

namespace {

constexpr double pi = std::numbers::pi;

auto in_unit_interval(double x) -> bool { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

auto to_string(VelocityAggregation a) -> const char* {
  switch (a) {
    case VelocityAggregation::mean: return "mean";
    case VelocityAggregation::sum: return "sum";
    case VelocityAggregation::diagonal: return "diagonal";
  }
  return "mean";
}

auto to_string(KernelOrientation o) -> const char* {
  return o == KernelOrientation::literal ? "literal" : "downstream";
}

auto to_string(VelocityScope v) -> const char* {
  switch (v) {
    case VelocityScope::all: return "all";
    case VelocityScope::flux: return "flux";
    case VelocityScope::source: return "source";
  }
  return "?";
}

auto aggregate(VelocityAggregation how, std::span<const double> conv, std::size_t k) -> double {
  switch (how) {
    case VelocityAggregation::diagonal:
      return conv[k];
    case VelocityAggregation::sum:
    case VelocityAggregation::mean: {
      double sum = 0.0;
      for (double v : conv) sum += v;
      return how == VelocityAggregation::sum ? sum : sum / static_cast<double>(conv.size());
    }
  }
  return 0.0;
}

auto SystemSpec::has_source() const -> bool {
  return std::any_of(species.begin(), species.end(), [](const Species& s) { return static_cast<bool>(s.source); });
}

auto velocity_shape(double eps) -> ScalarFn {
  return [eps](double x) { return (1.0 - x) * (1.0 + eps * std::sin(pi * x)); };
}

auto build_two_lane(const TwoLaneParams& params) -> SystemSpec {
  for (double eps : {params.eps_mu, params.eps_g, params.eps_gamma, params.eps_eta, params.eps_theta,
                     params.eps_source}) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
      throw Error(ErrorKind::invalid_parameter, "two-lane perturbation sizes must lie in [0, 1]");
    }
  }

  const auto g = velocity_shape(0.0);
  const auto g_eps = velocity_shape(params.eps_g);
  const auto flux = [g](double x) { return x * g(x); };

  const auto how = params.aggregation;
  const double slow = params.lane_factor_slow;
  const double fast = params.lane_factor_fast;
  const auto lane_velocity = [how](const ScalarFn& shape, double factor, std::size_t k) -> VelocityFn {
    return [shape, how, factor, k](std::span<const double> z) { return factor * shape(aggregate(how, z, k)); };
  };
  const auto& g_flux = params.eps_g_scope == VelocityScope::source ? g : g_eps;
  const auto& g_exchange = params.eps_g_scope == VelocityScope::flux ? g : g_eps;
  const VelocityFn nu1 = lane_velocity(g_flux, slow, 0);
  const VelocityFn nu2 = lane_velocity(g_flux, fast, 1);
  const VelocityFn nu1_exchange = lane_velocity(g_exchange, slow, 0);
  const VelocityFn nu2_exchange = lane_velocity(g_exchange, fast, 1);

  auto mu = make_poly_space_kernel(params.delta_x, params.space_power);
  auto gamma = make_poly_time_kernel(params.delta_t, params.time_power);
  if (params.eps_mu > 0.0) mu = perturb_space_kernel(mu, params.eps_mu);
  if (params.eps_gamma > 0.0) gamma = perturb_time_kernel(gamma, params.eps_gamma);

  auto eta = params.eta_x ? make_poly_space_kernel(*params.eta_x, params.space_power)
                          : make_poly_space_kernel(params.delta_x, params.space_power);
  auto theta = params.eta_t ? make_poly_time_kernel(*params.eta_t, params.time_power)
                            : make_poly_time_kernel(params.delta_t, params.time_power);
  if (params.eps_eta > 0.0) eta = perturb_space_kernel(eta, params.eps_eta);
  if (params.eps_theta > 0.0) theta = perturb_time_kernel(theta, params.eps_theta);
  // without separate radii the source shares the (possibly perturbed) flux kernels
  if (!params.eta_x && params.eps_eta == 0.0) eta = mu;
  if (!params.eta_t && params.eps_theta == 0.0) theta = gamma;

  SystemSpec spec{
      .species = {},
      .flux_kernels = KernelMatrix(2, KernelPair{mu, gamma}),
      .source_kernels = KernelMatrix(2, KernelPair{eta, theta}),
      .memory = params.with_memory,
      .orientation = params.orientation,
      .bounds = {},
      .label = "two_lane",
  };

  Species lane1{.name = "U1",
                .flux = flux,
                .velocity = nu1,
                .source = {},
                .initial = [](double x) {
                  if (!(x > -2.0 && x < 2.0)) return 0.0;
                  const double s = std::sin(0.5 * pi * x);
                  return s * s;
                }};
  Species lane2{.name = "U2",
                .flux = flux,
                .velocity = nu2,
                .source = {},
                .initial = [](double x) {
                  if (!(x > -2.0 && x < 2.0)) return 0.0;
                  const double c = std::cos(0.25 * pi * x);
                  return c * c;
                }};

  if (params.with_source) {
    // S^1(a, b, A, B) = (g(b) nu^2(B) - g(a) nu^1(A))^+ a - (...)^- b,
    // R^1 = -S^1, R^2 = +S^1.
    const double scale = 1.0 + params.eps_source;
    auto exchange = [g, nu1 = nu1_exchange, nu2 = nu2_exchange, scale](std::span<const double> u,
                                                                        std::span<const double> d) {
      const double a = u[0];
      const double b = u[1];
      const double drive = g(b) * nu2(d.subspan(2, 2)) - g(a) * nu1(d.subspan(0, 2));
      return scale * (std::max(drive, 0.0) * a - std::max(-drive, 0.0) * b);
    };
    lane1.source = [exchange](std::span<const double> u, std::span<const double> d) { return -exchange(u, d); };
    lane2.source = [exchange](std::span<const double> u, std::span<const double> d) { return exchange(u, d); };
  }

  spec.species = {std::move(lane1), std::move(lane2)};
  return spec;
}

auto build_two_lane(double eps_mu, double eps_g, bool with_source, bool with_memory) -> SystemSpec {
  TwoLaneParams params;
  params.eps_mu = eps_mu;
  params.eps_g = eps_g;
  params.with_source = with_source;
  params.with_memory = with_memory;
  return build_two_lane(params);
}

auto eval_source(const SystemSpec& spec, std::span<const double> u, std::span<const double> conv, std::size_t k)
    -> double {
  const std::size_t n = spec.species_count();
  if (k >= n || u.size() != n || conv.size() != n * n) {
    throw Error(ErrorKind::shape_mismatch, "eval_source: species index or argument sizes do not match the system");
  }
  const auto& source = spec.species[k].source;
  return source ? source(u, conv) : 0.0;
}

auto estimate_bounds(const SystemSpec& spec) -> ModelBounds {
  const std::size_t n = spec.species_count();
  ModelBounds bounds;
  constexpr int samples = 10000;

  if (spec.bounds.flux_lipschitz) {
    bounds.flux_lipschitz = *spec.bounds.flux_lipschitz;
  } else {
    const double h = 1.0 / samples;
    for (const auto& s : spec.species) {
      double prev = s.flux(0.0);
      for (int i = 1; i <= samples; ++i) {
        const double cur = s.flux(i * h);
        bounds.flux_lipschitz = std::max(bounds.flux_lipschitz, std::abs(cur - prev) / h);
        prev = cur;
      }
    }
  }

  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (spec.bounds.velocity_sup) {
    bounds.velocity_sup = *spec.bounds.velocity_sup;
  } else {
    std::vector<double> z(n);
    for (const auto& s : spec.species) {
      // corners of the unit cube first
      for (std::size_t mask = 0; mask < (std::size_t{1} << std::min<std::size_t>(n, 16)); ++mask) {
        for (std::size_t j = 0; j < n; ++j) z[j] = (mask >> j) & 1U ? 1.0 : 0.0;
        bounds.velocity_sup = std::max(bounds.velocity_sup, std::abs(s.velocity(z)));
      }
      for (int i = 0; i < samples; ++i) {
        for (auto& v : z) v = unit(rng);
        bounds.velocity_sup = std::max(bounds.velocity_sup, std::abs(s.velocity(z)));
      }
    }
  }

  if (spec.bounds.source_lipschitz) {
    bounds.source_lipschitz = *spec.bounds.source_lipschitz;
  } else if (spec.has_source()) {
    // in the 1-norm the constant is the largest partial derivative, so
    // difference quotients run along one coordinate at a time
    const std::size_t dim = n + n * n;
    std::vector<double> x(dim), y(dim);
    constexpr double step = 1e-4;
    for (int i = 0; i < samples; ++i) {
      for (auto& v : x) v = unit(rng);
      const std::span<const double> xs(x), ys(y);
      for (std::size_t j = 0; j < dim; ++j) {
        y = x;
        y[j] = x[j] + step <= 1.0 ? x[j] + step : x[j] - step;
        for (const auto& s : spec.species) {
          if (!s.source) continue;
          const double diff = std::abs(s.source(xs.first(n), xs.subspan(n)) - s.source(ys.first(n), ys.subspan(n)));
          bounds.source_lipschitz = std::max(bounds.source_lipschitz, diff / step);
        }
      }
    }
  }
  return bounds;
}

auto validate(const SystemSpec& spec, std::pair<double, double> sample_range) -> std::vector<std::string> {
  std::vector<std::string> violations;
  const std::size_t n = spec.species_count();
  auto report = [&violations](std::size_t k, const std::string& what) {
    std::ostringstream msg;
    msg << "species " << (k + 1) << ": " << what;
    violations.push_back(msg.str());
  };
  if (n == 0) {
    violations.emplace_back("system has no species");
    return violations;
  }
  if (spec.flux_kernels.size() != n || spec.source_kernels.size() != n) {
    violations.emplace_back("kernel matrices do not match the species count");
    return violations;
  }

  constexpr double tol = 1e-12;
  const std::vector<double> zero_u(n, 0.0);
  const std::vector<double> zero_d(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = spec.species[k];
    if (!s.flux || !s.velocity || !s.initial) {
      report(k, "flux, velocity and initial data must all be set");
      continue;
    }
    if (!(std::abs(s.flux(0.0)) <= tol)) report(k, "f(0) != 0");
    if (!(std::abs(s.flux(1.0)) <= tol)) report(k, "f(1) != 0");
    if (s.source && !(std::abs(s.source(zero_u, zero_d)) <= tol)) report(k, "R(0,0) != 0");

    constexpr int samples = 10000;
    const auto [lo, hi] = sample_range;
    const double h = (hi - lo) / samples;
    double worst_lo = 0.0;
    double worst_hi = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double v = s.initial(lo + i * h);
      if (!in_unit_interval(v)) {
        worst_lo = std::min(worst_lo, std::isfinite(v) ? v : -1.0);
        worst_hi = std::max(worst_hi, std::isfinite(v) ? v : 2.0);
      }
    }
    if (worst_lo < 0.0 || worst_hi > 1.0) {
      std::ostringstream msg;
      msg << "initial data exits [0,1] (sampled range " << worst_lo << " .. " << worst_hi << ")";
      report(k, msg.str());
    }
  }

  auto check_kernels = [&violations](const KernelMatrix& m, const char* name) {
    const std::size_t size = m.size();
    for (std::size_t k = 0; k < size; ++k) {
      for (std::size_t s = 0; s < size; ++s) {
        const auto& pair = m.at(s, k);
        std::ostringstream where;
        where << name << " kernel (" << (s + 1) << "," << (k + 1) << ")";
        if (std::abs(pair.space.mass() - 1.0) > 1e-10) violations.push_back(where.str() + ": space mass != 1");
        if (std::abs(pair.time.mass() - 1.0) > 1e-10) violations.push_back(where.str() + ": time mass != 1");
        constexpr int samples = 200;
        bool negative = false;
        for (int i = 1; i < samples; ++i) {
          const double xs = pair.space.support() * i / samples;
          if (pair.space.evaluate(xs) < 0.0) negative = true;
          const double horizon = pair.time.finite_support() ? pair.time.support() : 50.0;
          if (pair.time.evaluate(horizon * i / samples) < 0.0) negative = true;
        }
        if (negative) violations.push_back(where.str() + ": negative values");
      }
    }
  };
  check_kernels(spec.flux_kernels, "flux");
  check_kernels(spec.source_kernels, "source");
  return violations;
}

}  // namespace nlmem
