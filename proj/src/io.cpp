#include "nlmem/io.hpp"

#include "nlmem/error.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace nlmem {

namespace {

// shortest form that round-trips
auto num(double v) -> std::string {
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

auto split(const std::string& line) -> std::vector<std::string> {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

auto trim(std::string s) -> std::string {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void write_snapshots_csv(std::ostream& out, const RunResult& result) {
  out << "t,x,species,u,c,d\n";
  const auto& grid = result.grid;
  for (const auto& snap : result.snapshots) {
    for (std::size_t k = 0; k < snap.u.species(); ++k) {
      for (std::size_t i = 0; i < grid.cells; ++i) {
        out << num(snap.time) << ',' << num(grid.cell_center(i)) << ',' << k + 1 << ',' << num(snap.u(k, i)) << ','
            << num(snap.c(k, i)) << ',' << num(snap.d(k, i)) << '\n';
      }
    }
  }
}

void write_diagnostics_csv(std::ostream& out, const RunResult& result) {
  const std::size_t species = result.diagnostics.empty() ? 0 : result.diagnostics.front().mass.size();
  out << "step,t";
  for (std::size_t k = 1; k <= species; ++k) out << ",mass_" << k;
  out << ",total_mass";
  for (std::size_t k = 1; k <= species; ++k) out << ",min_" << k;
  for (std::size_t k = 1; k <= species; ++k) out << ",max_" << k;
  for (std::size_t k = 1; k <= species; ++k) out << ",tv_" << k;
  out << '\n';
  for (const auto& row : result.diagnostics) {
    out << row.step << ',' << num(row.time);
    for (double v : row.mass) out << ',' << num(v);
    out << ',' << num(row.total_mass);
    for (double v : row.min) out << ',' << num(v);
    for (double v : row.max) out << ',' << num(v);
    for (double v : row.tv) out << ',' << num(v);
    out << '\n';
  }
}

void write_conv_csv(std::ostream& out, const RunResult& result) {
  out << "t,x,s,k,c,d\n";
  const auto& grid = result.grid;
  const std::size_t faces = grid.interfaces();
  for (const auto& snap : result.snapshots) {
    if (snap.c_faces.empty()) {
      throw Error(ErrorKind::config, "convolution dump requested but snapshots carry no interface fields");
    }
    const std::size_t species = snap.u.species();
    for (std::size_t k = 0; k < species; ++k) {
      for (std::size_t s = 0; s < species; ++s) {
        const std::size_t p = k * species + s;
        for (std::size_t j = 0; j < faces; ++j) {
          out << num(snap.time) << ',' << num(grid.interface_position(j)) << ',' << s + 1 << ',' << k + 1 << ','
              << num(snap.c_faces[p * faces + j]) << ',' << num(snap.d_faces[p * faces + j]) << '\n';
        }
      }
    }
  }
}

void write_gaps_csv(std::ostream& out, const std::vector<GapRow>& gaps) {
  out << "t,l1_gap\n";
  for (const auto& g : gaps) out << num(g.time) << ',' << num(g.gap) << '\n';
}

void write_rates_csv(std::ostream& out, const ErrorReport& report) {
  out << "eps,e,alpha\n";
  for (const auto& row : report.rows) {
    out << num(row.eps) << ',' << num(row.error) << ',';
    if (row.alpha) out << num(*row.alpha);
    out << '\n';
  }
}

void write_sweep_snapshots_csv(std::ostream& out, const SweepResult& sweep) {
  out << "eps,x,species,u\n";
  const auto& grid = sweep.baseline->grid;
  auto emit = [&](double eps, const StateMatrix& u) {
    for (std::size_t k = 0; k < u.species(); ++k) {
      for (std::size_t i = 0; i < u.cells(); ++i) {
        out << num(eps) << ',' << num(grid.cell_center(i)) << ',' << k + 1 << ',' << num(u(k, i)) << '\n';
      }
    }
  };
  emit(0.0, sweep.baseline->final_state());
  for (std::size_t r = 0; r < sweep.report.rows.size(); ++r) {
    if (sweep.report.rows[r].failure.empty()) emit(sweep.report.rows[r].eps, sweep.finals[r]);
  }
}

void write_rate_table(std::ostream& out, const ErrorReport& report, const std::string& title) {
  if (!title.empty()) out << title << '\n';
  out << std::setw(12) << "eps" << std::setw(16) << "e" << std::setw(10) << "alpha" << '\n';
  for (const auto& row : report.rows) {
    std::ostringstream eps;
    // powers of two print as 1/2^s
    const double s = -std::log2(row.eps);
    if (row.eps > 0.0 && std::abs(s - std::round(s)) < 1e-12 && s >= 0.0) {
      eps << "1/" << static_cast<long long>(std::llround(std::exp2(s)));
    } else {
      eps << row.eps;
    }
    out << std::setw(12) << eps.str();
    if (!row.failure.empty()) {
      out << "  failed: " << row.failure << '\n';
      continue;
    }
    out << std::setw(16) << std::scientific << std::setprecision(6) << row.error << std::defaultfloat;
    if (row.alpha) {
      out << std::setw(10) << std::fixed << std::setprecision(3) << *row.alpha << std::defaultfloat;
    } else {
      out << std::setw(10) << "-";
    }
    out << '\n';
  }
  out << std::setprecision(6);
}

auto read_rates_csv(std::istream& in) -> ErrorReport {
  ErrorReport report;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::config, "rates file is empty");
  const auto header = split(line);
  if (header.size() < 2 || trim(header[0]) != "eps" || trim(header[1]) != "e") {
    throw Error(ErrorKind::config, "rates file must start with the header eps,e[,alpha] (got '" + line + "')");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() < 2) throw Error(ErrorKind::config, "rates line " + std::to_string(lineno) + " has too few fields");
    ErrorRow row;
    try {
      row.eps = std::stod(fields[0]);
      row.error = std::stod(fields[1]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::config, "rates line " + std::to_string(lineno) + " is not numeric");
    }
    report.rows.push_back(row);
  }
  fill_rates(report);
  return report;
}

auto run_summary(const RunResult& result) -> nlohmann::json {
  const auto reg = regularity_report(result);
  const auto& g = result.grid;
  nlohmann::json j;
  j["grid"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"dx", g.dx},       {"cells", g.cells},
               {"dt", g.dt},       {"lambda", g.lambda}, {"T", g.final_time}, {"steps", g.steps}};
  j["beta"] = result.beta;
  j["cfl"] = {{"admissible", result.cfl.admissible},
              {"bound", result.cfl.bound},
              {"max_lambda", result.cfl.max_lambda},
              {"flux_lipschitz", result.cfl.constants.flux_lipschitz},
              {"velocity_sup", result.cfl.constants.velocity_sup},
              {"source_lipschitz", result.cfl.constants.source_lipschitz}};
  j["regularity"] = {{"min", reg.min},
                     {"max", reg.max},
                     {"mass_drift", reg.mass_drift},
                     {"total_mass_drift", reg.total_mass_drift},
                     {"tv_initial", reg.tv_initial},
                     {"tv_max", reg.tv_max},
                     {"tv_growth", reg.tv_growth},
                     {"tv_constant", reg.tv_constant},
                     {"linf_constant", reg.linf_constant},
                     {"lipschitz_time", reg.lipschitz_time}};
  if (!result.diagnostics.empty()) {
    j["mass"] = {{"initial", result.diagnostics.front().mass}, {"final", result.diagnostics.back().mass}};
  }
  nlohmann::json times = nlohmann::json::array();
  for (const auto& s : result.snapshots) times.push_back({{"t", s.time}, {"step", s.step}});
  j["snapshots"] = times;
  j["wall_seconds"] = result.wall_seconds;
  return j;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::config, "cannot create directory '" + dir.string() + "': " + ec.message());
}

auto open_output(const std::filesystem::path& path) -> std::ofstream {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace nlmem
