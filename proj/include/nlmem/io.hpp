#pragma once

// CSV and JSON outputs consumed by the figure scripts.
//
//   snapshots.csv    t,x,species,u,c,d
//   diagnostics.csv  step,t,mass_1..mass_N,total_mass,min_1..,max_1..,tv_1..
//   conv.csv         t,x,s,k,c,d           (interface values, --dump-conv)
//   gaps.csv         t,l1_gap
//   rates.csv        eps,e,alpha           (alpha empty when undefined)
//   sweep_snapshots.csv  eps,x,species,u   (eps = 0 is the baseline)
//
// Species indices are 1-based in every file.

#include "nlmem/diagnostics.hpp"
#include "nlmem/experiments.hpp"
#include "nlmem/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlmem {

void write_snapshots_csv(std::ostream& out, const RunResult& result);
void write_diagnostics_csv(std::ostream& out, const RunResult& result);
/// Requires snapshots recorded with dump_conv.
void write_conv_csv(std::ostream& out, const RunResult& result);
void write_gaps_csv(std::ostream& out, const std::vector<GapRow>& gaps);
void write_rates_csv(std::ostream& out, const ErrorReport& report);
void write_sweep_snapshots_csv(std::ostream& out, const SweepResult& sweep);

/// Aligned table: eps, e, alpha, with failed rows marked.
void write_rate_table(std::ostream& out, const ErrorReport& report, const std::string& title = {});

/// Parses eps,e[,alpha] rows; alpha is recomputed from the errors.
auto read_rates_csv(std::istream& in) -> ErrorReport;

/// Grid, CFL verdict, mass drift and regularity constants of a run.
auto run_summary(const RunResult& result) -> nlohmann::json;

void ensure_directory(const std::filesystem::path& dir);
auto open_output(const std::filesystem::path& path) -> std::ofstream;

/// Opens `dir / name` for writing (creating `dir`) and hands the stream to
/// `write`. Throws config errors when the file cannot be opened.
template <class Writer>
void write_file(const std::filesystem::path& dir, const std::string& name, Writer&& write) {
  ensure_directory(dir);
  auto out = open_output(dir / name);
  write(out);
}

}  // namespace nlmem
