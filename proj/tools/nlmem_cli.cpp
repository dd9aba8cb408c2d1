// Command-line driver: single runs, paired comparisons, perturbation sweeps
// and rate tables. Every subcommand writes CSV/JSON into --out.

#include "nlmem/config.hpp"
#include "nlmem/error.hpp"
#include "nlmem/experiments.hpp"
#include "nlmem/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::string out = "out";
  std::size_t threads = 0;
  bool dump_conv = false;
};

auto load(const Globals& g, nlmem::RunConfig base) -> nlmem::RunConfig {
  nlmem::RunConfig c = g.config.empty() ? std::move(base) : nlmem::load_run_config(g.config, std::move(base));
  if (g.dump_conv) c.dump_conv = true;
  return c;
}

void write_run(const fs::path& dir, const nlmem::RunConfig& config, const nlmem::RunResult& result) {
  nlmem::write_file(dir, "config.json", [&](std::ostream& o) { o << nlmem::to_json(config).dump(2) << '\n'; });
  nlmem::write_file(dir, "snapshots.csv", [&](std::ostream& o) { nlmem::write_snapshots_csv(o, result); });
  nlmem::write_file(dir, "diagnostics.csv", [&](std::ostream& o) { nlmem::write_diagnostics_csv(o, result); });
  nlmem::write_file(dir, "summary.json", [&](std::ostream& o) { o << nlmem::run_summary(result).dump(2) << '\n'; });
  if (config.dump_conv) {
    nlmem::write_file(dir, "conv.csv", [&](std::ostream& o) { nlmem::write_conv_csv(o, result); });
  }
}

void report_run(const std::string& label, const nlmem::RunResult& r) {
  const auto& d = r.diagnostics;
  std::cout << label << ": " << r.grid.cells << " cells, " << r.grid.steps << " steps, "
            << r.wall_seconds << " s; total mass " << d.front().total_mass << " -> " << d.back().total_mass << '\n';
}

void write_comparison(const fs::path& dir, const nlmem::RunConfig& reference, const nlmem::RunConfig& variant,
                      const nlmem::Comparison& c) {
  write_run(dir / "reference", reference, c.reference);
  write_run(dir / "variant", variant, c.variant);
  nlmem::write_file(dir, "gaps.csv", [&](std::ostream& o) { nlmem::write_gaps_csv(o, c.gaps); });
  report_run("reference", c.reference);
  report_run("variant", c.variant);
  for (const auto& g : c.gaps) std::cout << "  t = " << g.time << "  L1 gap = " << g.gap << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume solver for nonlocal balance laws with memory"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for independent runs (0 = all cores)");
  app.add_flag("--dump-conv", g.dump_conv, "Write interface convolution fields per snapshot");

  auto* run = app.add_subcommand("run", "Single run");
  auto* memory = app.add_subcommand("compare-memory", "Memory vs memoryless counterpart");
  auto* source = app.add_subcommand("compare-source", "Source vs no-source counterpart");

  auto* sweep = app.add_subcommand("sweep", "One-coefficient perturbation sweep with L1 errors and rates");
  std::string target = "mu";
  std::vector<double> eps;
  sweep->add_option("--target", target, "mu | g | gamma | eta | theta | source")
      ->check(CLI::IsMember({"mu", "g", "gamma", "Gamma", "eta", "theta", "source", "R"}))
      ->capture_default_str();
  sweep->add_option("--eps", eps, "Perturbation sizes, strictly decreasing (default 2^-1..2^-6)");

  auto* refine = app.add_subcommand("refine", "Grid self-convergence at fixed lambda");
  std::size_t levels = 2;
  double refine_t = 0.1;
  refine->add_option("--levels", levels, "Number of halvings")->capture_default_str();
  refine->add_option("--T", refine_t, "Final time")->capture_default_str();

  auto* rates = app.add_subcommand("rates", "Recompute rates from an eps,e CSV and print the table");
  std::string rates_csv;
  rates->add_option("csv", rates_csv, "Rates CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out = g.out;
    if (*run) {
      const auto config = load(g, nlmem::figures_config());
      const auto result = nlmem::run_config(config);
      write_run(out, config, result);
      report_run("run", result);
    } else if (*memory || *source) {
      const auto config = load(g, nlmem::figures_config());
      auto reference = config;
      auto variant = config;
      if (*memory) {
        reference.model.two_lane.with_memory = true;
        variant.model.two_lane.with_memory = false;
        write_comparison(out, reference, variant, nlmem::compare_memory(config));
      } else {
        reference.model.two_lane.with_source = true;
        variant.model.two_lane.with_source = false;
        write_comparison(out, reference, variant, nlmem::compare_source(config));
      }
    } else if (*sweep) {
      nlmem::SweepSpec spec;
      spec.target = nlmem::parse_sweep_target(target);
      spec.baseline = load(g, nlmem::sweep_config());
      spec.threads = g.threads;
      if (!eps.empty()) spec.eps = eps;
      const auto result = nlmem::perturbation_sweep(spec);
      const std::string name = nlmem::to_string(spec.target);
      nlmem::write_file(out, "rates_" + name + ".csv", [&](std::ostream& o) { nlmem::write_rates_csv(o, result.report); });
      nlmem::write_file(out, "rates_" + name + ".txt",
                        [&](std::ostream& o) { nlmem::write_rate_table(o, result.report, "target " + name); });
      nlmem::write_file(out, "sweep_snapshots_" + name + ".csv",
                        [&](std::ostream& o) { nlmem::write_sweep_snapshots_csv(o, result); });
      nlmem::write_rate_table(std::cout, result.report, "target " + name);
      for (const auto& row : result.report.rows) {
        if (!row.failure.empty()) return 3;
      }
    } else if (*refine) {
      auto config = load(g, nlmem::figures_config());
      config.grid.final_time = refine_t;
      const auto rows = nlmem::self_convergence(config, levels, g.threads);
      nlmem::write_file(out, "refine.csv", [&](std::ostream& o) {
        o << "dx,distance,factor\n";
        for (const auto& r : rows) o << r.dx << ',' << r.distance << ',' << r.factor << '\n';
      });
      for (const auto& r : rows) std::cout << "dx = " << r.dx << "  d = " << r.distance << "  factor = " << r.factor << '\n';
    } else if (*rates) {
      std::ifstream in(rates_csv);
      nlmem::write_rate_table(std::cout, nlmem::read_rates_csv(in), rates_csv);
    }
  } catch (const nlmem::Error& e) {
    std::cerr << "error (" << nlmem::to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
