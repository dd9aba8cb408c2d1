#include "nlmem/config.hpp"

#include "nlmem/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlmem {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config, what); }

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

auto parse_aggregation(const std::string& s) -> VelocityAggregation {
  if (s == "mean") return VelocityAggregation::mean;
  if (s == "sum") return VelocityAggregation::sum;
  if (s == "diagonal") return VelocityAggregation::diagonal;
  config_error("velocity_aggregation must be mean, sum or diagonal (got '" + s + "')");
}

auto parse_orientation(const std::string& s) -> KernelOrientation {
  if (s == "literal") return KernelOrientation::literal;
  if (s == "downstream") return KernelOrientation::downstream;
  config_error("kernel_orientation must be literal or downstream (got '" + s + "')");
}

auto parse_scope(const std::string& s) -> VelocityScope {
  if (s == "all") return VelocityScope::all;
  if (s == "flux") return VelocityScope::flux;
  if (s == "source") return VelocityScope::source;
  config_error("eps_g_scope must be all, flux or source (got '" + s + "')");
}

auto kernel_to_json(const KernelSpec& k) -> json {
  json j{{"family", k.family}};
  if (k.family == "poly") {
    j["delta"] = k.delta;
    j["power"] = k.power;
    j["epsilon"] = k.epsilon;
  } else if (k.family == "table") {
    j["spacing"] = k.spacing;
    j["weights"] = k.weights;
  } else {
    j["rate"] = k.rate;
  }
  return j;
}

auto kernel_from_json(const json& j) -> KernelSpec {
  if (!j.is_object()) config_error("kernel entries must be objects");
  KernelSpec k;
  read(j, "family", k.family);
  if (k.family == "poly") {
    if (!j.contains("delta") || !j.contains("power")) config_error("poly kernel needs 'delta' and 'power'");
    read(j, "delta", k.delta);
    read(j, "power", k.power);
    read(j, "epsilon", k.epsilon);
  } else if (k.family == "table") {
    if (!j.contains("spacing") || !j.contains("weights")) config_error("table kernel needs 'spacing' and 'weights'");
    read(j, "spacing", k.spacing);
    read(j, "weights", k.weights);
  } else if (k.family == "exponential") {
    if (!j.contains("rate")) config_error("exponential kernel needs 'rate'");
    read(j, "rate", k.rate);
  } else {
    config_error("unknown kernel family '" + k.family + "'");
  }
  return k;
}

auto function_to_json(const FunctionSpec& f) -> json {
  if (!f.poly.empty()) return json{{"poly", f.poly}};
  return json{{"x", f.x}, {"y", f.y}, {"zero_outside", f.zero_outside}};
}

auto function_from_json(const json& j, const char* what) -> FunctionSpec {
  if (!j.is_object()) config_error(std::string(what) + " must be an object");
  FunctionSpec f;
  read(j, "poly", f.poly);
  read(j, "x", f.x);
  read(j, "y", f.y);
  read(j, "zero_outside", f.zero_outside);
  if (f.poly.empty() && (f.x.size() < 2 || f.x.size() != f.y.size())) {
    config_error(std::string(what) + " needs 'poly' coefficients or matching 'x'/'y' tables of length >= 2");
  }
  if (f.poly.empty() && !std::is_sorted(f.x.begin(), f.x.end())) {
    config_error(std::string(what) + " table abscissae must be increasing");
  }
  return f;
}

template <class Axis>
void apply_poly_epsilon(Kernel<Axis>& kernel, double eps);

template <>
void apply_poly_epsilon(SpaceKernel& kernel, double eps) {
  if (eps > 0.0) kernel = perturb_space_kernel(kernel, eps);
}
template <>
void apply_poly_epsilon(TimeKernel& kernel, double eps) {
  if (eps > 0.0) kernel = perturb_time_kernel(kernel, eps);
}

auto chain_exchange_source(std::size_t k, std::size_t n, std::vector<ScalarFn> shapes, std::vector<VelocityFn> nus)
    -> SourceFn {
  // S^j(a, b, A, B) = (g^{j+1}(b) nu^{j+1}(B) - g^j(a) nu^j(A))^+ a - (...)^- b between species j and j+1
  auto exchange = [shapes, nus, n](std::size_t j, std::span<const double> u, std::span<const double> d) {
    const double a = u[j];
    const double b = u[j + 1];
    const double drive = shapes[j + 1](b) * nus[j + 1](d.subspan((j + 1) * n, n)) - shapes[j](a) * nus[j](d.subspan(j * n, n));
    return std::max(drive, 0.0) * a - std::max(-drive, 0.0) * b;
  };
  return [exchange, k, n](std::span<const double> u, std::span<const double> d) {
    double r = 0.0;
    if (k > 0) r += exchange(k - 1, u, d);
    if (k + 1 < n) r -= exchange(k, u, d);
    return r;
  };
}

}  // namespace

auto make_space_kernel(const KernelSpec& spec) -> SpaceKernel {
  if (spec.family == "poly") {
    auto k = make_poly_space_kernel(spec.delta, spec.power);
    apply_poly_epsilon(k, spec.epsilon);
    return k;
  }
  if (spec.family == "table") return make_table_space_kernel(spec.spacing, spec.weights);
  config_error("space kernels must be 'poly' or 'table' (got '" + spec.family + "')");
}

auto make_time_kernel(const KernelSpec& spec) -> TimeKernel {
  if (spec.family == "poly") {
    auto k = make_poly_time_kernel(spec.delta, spec.power);
    apply_poly_epsilon(k, spec.epsilon);
    return k;
  }
  if (spec.family == "table") return make_table_time_kernel(spec.spacing, spec.weights);
  if (spec.family == "exponential") return make_exponential_time_kernel(spec.rate);
  config_error("unknown time kernel family '" + spec.family + "'");
}

auto make_function(const FunctionSpec& spec) -> ScalarFn {
  if (!spec.poly.empty()) {
    return [c = spec.poly](double x) {
      double v = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
      return v;
    };
  }
  if (spec.x.size() < 2 || spec.x.size() != spec.y.size()) {
    throw Error(ErrorKind::config, "piecewise-linear function needs matching x/y tables of length >= 2");
  }
  return [xs = spec.x, ys = spec.y, zero = spec.zero_outside](double x) {
    if (x < xs.front()) return zero ? 0.0 : ys.front();
    if (x > xs.back()) return zero ? 0.0 : ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const auto hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
  };
}

auto figures_config() -> RunConfig { return RunConfig{}; }

auto sweep_config() -> RunConfig {
  RunConfig c;
  c.grid.dx = 0.00625;
  c.model.two_lane.eta_x = 0.5;
  c.model.two_lane.eta_t = 0.8;
  c.snapshot_times = {0.5};
  return c;
}

auto build_system(const ModelConfig& config) -> SystemSpec {
  SystemSpec spec = [&config] {
    if (config.preset == "two_lane") return build_two_lane(config.two_lane);
    if (config.preset != "custom") config_error("model preset must be two_lane or custom (got '" + config.preset + "')");

    const auto& custom = config.custom;
    const std::size_t n = custom.species.size();
    if (n == 0) config_error("custom model needs at least one species");
    const auto& tl = config.two_lane;
    KernelPair defaults{make_poly_space_kernel(tl.delta_x, tl.space_power), make_poly_time_kernel(tl.delta_t, tl.time_power)};
    SystemSpec s{.species = {},
                 .flux_kernels = KernelMatrix(n, defaults),
                 .source_kernels = KernelMatrix(n, defaults),
                 .memory = tl.with_memory,
                 .orientation = tl.orientation,
                 .bounds = {},
                 .label = "custom"};
    std::vector<ScalarFn> shapes;
    std::vector<VelocityFn> nus;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& cs = custom.species[k];
      auto shape = make_function(cs.velocity_shape);
      const double factor = cs.velocity_factor;
      const auto how = tl.aggregation;
      VelocityFn nu = [shape, factor, how, k](std::span<const double> z) { return factor * shape(aggregate(how, z, k)); };
      shapes.push_back(shape);
      nus.push_back(nu);
      s.species.push_back(Species{.name = cs.name.empty() ? "U" + std::to_string(k + 1) : cs.name,
                                  .flux = make_function(cs.flux),
                                  .velocity = nu,
                                  .source = {},
                                  .initial = make_function(cs.initial)});
    }
    if (custom.source == "exchange" && n > 1) {
      for (std::size_t k = 0; k < n; ++k) s.species[k].source = chain_exchange_source(k, n, shapes, nus);
    } else if (custom.source != "none" && custom.source != "exchange") {
      config_error("custom source must be none or exchange (got '" + custom.source + "')");
    }
    return s;
  }();

  const std::size_t n = spec.species_count();
  auto override_entries = [n](KernelMatrix& m, const std::optional<KernelSpec>& space, const std::optional<KernelSpec>& time) {
    if (!space && !time) return;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t s = 0; s < n; ++s) {
        if (space) m.at(s, k).space = make_space_kernel(*space);
        if (time) m.at(s, k).time = make_time_kernel(*time);
      }
    }
  };
  override_entries(spec.flux_kernels, config.mu, config.gamma);
  override_entries(spec.source_kernels, config.eta, config.theta);
  spec.bounds = config.bounds;
  return spec;
}

auto make_grid(const RunConfig& config, const SystemSpec& spec) -> Grid {
  const auto& g = config.grid;
  if (g.lambda) return Grid::make(g.x_min, g.x_max, g.dx, *g.lambda, g.final_time);
  // the admissible lambda depends on dt only through dx |R|_Lip, so probe with lambda = 1
  const auto report = check_cfl(estimate_bounds(spec), 1.0, g.beta, g.dx);
  return Grid::make(g.x_min, g.x_max, g.dx, 0.95 * report.max_lambda, g.final_time);
}

auto solver_options(const RunConfig& config) -> SolverOptions {
  SolverOptions o;
  o.beta = config.grid.beta;
  o.snapshot_times = config.snapshot_times;
  o.dump_conv = config.dump_conv;
  o.guard_boundary = config.guard_boundary;
  o.boundary_radius = config.boundary_radius;
  o.boundary_tolerance = config.boundary_tolerance;
  return o;
}

auto run_config(const RunConfig& config) -> RunResult {
  const auto spec = build_system(config.model);
  const auto grid = make_grid(config, spec);
  return run(spec, grid, solver_options(config));
}

auto to_json(const RunConfig& c) -> json {
  const auto& tl = c.model.two_lane;
  json model{{"preset", c.model.preset},
             {"eps_mu", tl.eps_mu},
             {"eps_g", tl.eps_g},
             {"eps_gamma", tl.eps_gamma},
             {"eps_eta", tl.eps_eta},
             {"eps_theta", tl.eps_theta},
             {"eps_source", tl.eps_source},
             {"eps_g_scope", to_string(tl.eps_g_scope)},
             {"with_source", tl.with_source},
             {"with_memory", tl.with_memory},
             {"velocity_aggregation", to_string(tl.aggregation)},
             {"kernel_orientation", to_string(tl.orientation)},
             {"lane_factors", {tl.lane_factor_slow, tl.lane_factor_fast}},
             {"delta_x", tl.delta_x},
             {"delta_t", tl.delta_t},
             {"space_power", tl.space_power},
             {"time_power", tl.time_power}};
  if (tl.eta_x) model["eta_x"] = *tl.eta_x;
  if (tl.eta_t) model["eta_t"] = *tl.eta_t;
  json kernels = json::object();
  if (c.model.mu) kernels["mu"] = kernel_to_json(*c.model.mu);
  if (c.model.gamma) kernels["gamma"] = kernel_to_json(*c.model.gamma);
  if (c.model.eta) kernels["eta"] = kernel_to_json(*c.model.eta);
  if (c.model.theta) kernels["theta"] = kernel_to_json(*c.model.theta);
  if (!kernels.empty()) model["kernels"] = kernels;
  json bounds = json::object();
  if (c.model.bounds.flux_lipschitz) bounds["flux_lipschitz"] = *c.model.bounds.flux_lipschitz;
  if (c.model.bounds.velocity_sup) bounds["velocity_sup"] = *c.model.bounds.velocity_sup;
  if (c.model.bounds.source_lipschitz) bounds["source_lipschitz"] = *c.model.bounds.source_lipschitz;
  if (!bounds.empty()) model["bounds"] = bounds;
  if (c.model.preset == "custom") {
    json species = json::array();
    for (const auto& s : c.model.custom.species) {
      species.push_back({{"name", s.name},
                         {"flux", function_to_json(s.flux)},
                         {"velocity_factor", s.velocity_factor},
                         {"velocity_shape", function_to_json(s.velocity_shape)},
                         {"initial", function_to_json(s.initial)}});
    }
    model["species"] = species;
    model["source"] = c.model.custom.source;
  }

  json grid{{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"dx", c.grid.dx},
            {"beta", c.grid.beta},   {"T", c.grid.final_time}};
  grid["lambda"] = c.grid.lambda ? json(*c.grid.lambda) : json("auto");

  return json{{"model", model},
              {"grid", grid},
              {"output", {{"snapshot_times", c.snapshot_times}, {"dump_conv", c.dump_conv}}},
              {"boundary_guard",
               {{"enabled", c.guard_boundary}, {"radius", c.boundary_radius}, {"tolerance", c.boundary_tolerance}}}};
}

auto run_config_from_json(const json& j, RunConfig base) -> RunConfig {
  if (!j.is_object()) config_error("configuration root must be an object");
  RunConfig c = std::move(base);
  if (j.contains("model")) {
    const auto& m = j.at("model");
    auto& tl = c.model.two_lane;
    read(m, "preset", c.model.preset);
    read(m, "eps_mu", tl.eps_mu);
    read(m, "eps_g", tl.eps_g);
    read(m, "eps_gamma", tl.eps_gamma);
    read(m, "eps_eta", tl.eps_eta);
    read(m, "eps_theta", tl.eps_theta);
    read(m, "eps_source", tl.eps_source);
    read(m, "with_source", tl.with_source);
    read(m, "with_memory", tl.with_memory);
    read(m, "delta_x", tl.delta_x);
    read(m, "delta_t", tl.delta_t);
    read(m, "space_power", tl.space_power);
    read(m, "time_power", tl.time_power);
    if (m.contains("velocity_aggregation")) tl.aggregation = parse_aggregation(m.at("velocity_aggregation").get<std::string>());
    if (m.contains("eps_g_scope")) tl.eps_g_scope = parse_scope(m.at("eps_g_scope").get<std::string>());
    if (m.contains("kernel_orientation")) tl.orientation = parse_orientation(m.at("kernel_orientation").get<std::string>());
    if (m.contains("lane_factors")) {
      std::vector<double> f;
      read(m, "lane_factors", f);
      if (f.size() != 2) config_error("lane_factors needs two entries");
      tl.lane_factor_slow = f[0];
      tl.lane_factor_fast = f[1];
    }
    if (m.contains("eta_x")) {
      if (m.at("eta_x").is_null()) tl.eta_x.reset();
      else tl.eta_x = m.at("eta_x").get<double>();
    }
    if (m.contains("eta_t")) {
      if (m.at("eta_t").is_null()) tl.eta_t.reset();
      else tl.eta_t = m.at("eta_t").get<double>();
    }
    if (m.contains("kernels")) {
      const auto& k = m.at("kernels");
      if (k.contains("mu")) c.model.mu = kernel_from_json(k.at("mu"));
      if (k.contains("gamma")) c.model.gamma = kernel_from_json(k.at("gamma"));
      if (k.contains("eta")) c.model.eta = kernel_from_json(k.at("eta"));
      if (k.contains("theta")) c.model.theta = kernel_from_json(k.at("theta"));
    }
    if (m.contains("bounds")) {
      const auto& b = m.at("bounds");
      if (b.contains("flux_lipschitz")) c.model.bounds.flux_lipschitz = b.at("flux_lipschitz").get<double>();
      if (b.contains("velocity_sup")) c.model.bounds.velocity_sup = b.at("velocity_sup").get<double>();
      if (b.contains("source_lipschitz")) c.model.bounds.source_lipschitz = b.at("source_lipschitz").get<double>();
    }
    if (m.contains("species")) {
      c.model.custom.species.clear();
      for (const auto& s : m.at("species")) {
        CustomSpecies cs;
        read(s, "name", cs.name);
        if (!s.contains("flux") || !s.contains("velocity_shape") || !s.contains("initial")) {
          config_error("custom species need 'flux', 'velocity_shape' and 'initial'");
        }
        cs.flux = function_from_json(s.at("flux"), "flux");
        read(s, "velocity_factor", cs.velocity_factor);
        cs.velocity_shape = function_from_json(s.at("velocity_shape"), "velocity_shape");
        cs.initial = function_from_json(s.at("initial"), "initial");
        c.model.custom.species.push_back(std::move(cs));
      }
    }
    read(m, "source", c.model.custom.source);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    read(g, "x_min", c.grid.x_min);
    read(g, "x_max", c.grid.x_max);
    read(g, "dx", c.grid.dx);
    read(g, "beta", c.grid.beta);
    read(g, "T", c.grid.final_time);
    if (g.contains("lambda")) {
      const auto& l = g.at("lambda");
      if (l.is_string()) {
        if (l.get<std::string>() != "auto") config_error("grid.lambda must be a number or \"auto\"");
        c.grid.lambda.reset();
      } else {
        c.grid.lambda = l.get<double>();
      }
    }
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    read(o, "snapshot_times", c.snapshot_times);
    read(o, "dump_conv", c.dump_conv);
  }
  if (j.contains("boundary_guard")) {
    const auto& b = j.at("boundary_guard");
    read(b, "enabled", c.guard_boundary);
    read(b, "radius", c.boundary_radius);
    read(b, "tolerance", c.boundary_tolerance);
  }
  return c;
}

auto load_run_config(const std::string& path, RunConfig base) -> RunConfig {
  std::ifstream in(path);
  if (!in) config_error("cannot open configuration file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("cannot parse '" + path + "': " + e.what());
  }
  if (j.contains("base")) {
    const auto name = j.at("base").get<std::string>();
    if (name == "sweep") base = sweep_config();
    else if (name != "figures") config_error("base must be figures or sweep (got '" + name + "')");
  }
  return run_config_from_json(j, base);
}

}  // namespace nlmem
