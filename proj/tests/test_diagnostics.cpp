#include "nlmem/diagnostics.hpp"
#include "nlmem/error.hpp"
#include "nlmem/log.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

using namespace nlmem;

TEST_CASE("L1 distance basics") {
  StateMatrix a(2, 10, 0.3);
  CHECK(l1_distance(a, a, 0.1) == 0.0);
  StateMatrix b = a;
  for (std::size_t i = 0; i < 4; ++i) b(1, i) += 1.0;
  CHECK(l1_distance(a, b, 0.1) == doctest::Approx(0.4).epsilon(1e-14));
  const auto per = l1_distance_by_species(a, b, 0.1);
  CHECK(per[0] == 0.0);
  CHECK(per[1] == doctest::Approx(0.4));
  CHECK_THROWS_AS(l1_distance(a, StateMatrix(2, 9), 0.1), Error);
}

TEST_CASE("projected two-lane data has total mass four") {
  const auto spec = build_two_lane(0.0, 0.0, true, true);
  const auto grid = Grid::make(-4.0, 4.0, 7.8125e-3, 0.1286, 0.5);
  const auto u = project_initial(spec, grid);
  CHECK(std::abs(l1_distance(u, StateMatrix(2, grid.cells), grid.dx) - 4.0) <= 1e-9);
}

TEST_CASE("L1 distance is a metric on random triples") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_state(rng, 2, 20);
    const auto b = oracle::random_state(rng, 2, 20);
    const auto c = oracle::random_state(rng, 2, 20);
    CHECK(l1_distance(a, b, 0.05) == l1_distance(b, a, 0.05));
    CHECK(l1_distance(a, c, 0.05) <= l1_distance(a, b, 0.05) + l1_distance(b, c, 0.05) + 1e-15);
  }
}

TEST_CASE("rates") {
  CHECK(*rate(2.0, 1.0) == 1.0);
  CHECK(*rate(0.3, 0.15) == 1.0);
  CHECK(*rate(0.7, 0.7) == 0.0);
  CHECK(*rate(7.68, 4.14) == doctest::Approx(0.8914).epsilon(1e-4));
  CHECK_FALSE(rate(0.0, 1.0).has_value());
  CHECK_FALSE(rate(1.0, -1.0).has_value());

  ErrorReport report;
  report.rows = {{0.5, 4.0, {}, {}, {}}, {0.25, 2.0, {}, {}, {}}, {0.125, 0.0, {}, {}, {}}, {0.0625, 0.5, {}, {}, "boom"}};
  fill_rates(report);
  CHECK_FALSE(report.rows[0].alpha.has_value());
  CHECK(*report.rows[1].alpha == 1.0);
  CHECK_FALSE(report.rows[2].alpha.has_value());
  CHECK_FALSE(report.rows[3].alpha.has_value());
}

TEST_CASE("total variation and coarsening") {
  const std::vector<double> u{0.0, 1.0, 0.5, 0.5, 2.0};
  CHECK(total_variation(u) == doctest::Approx(3.0));
  StateMatrix fine(1, 4);
  fine(0, 0) = 1.0;
  fine(0, 1) = 3.0;
  fine(0, 2) = 5.0;
  fine(0, 3) = 5.0;
  const auto coarse = coarsen(fine, 2);
  CHECK(coarse.cells() == 2);
  CHECK(coarse(0, 0) == 2.0);
  CHECK(coarse(0, 1) == 5.0);
  CHECK_THROWS_AS(coarsen(fine, 3), Error);
}

TEST_CASE("regularity of a zero run") {
  auto spec = build_two_lane(0.0, 0.0, true, true);
  for (auto& s : spec.species) s.initial = [](double) { return 0.0; };
  SolverOptions o;
  o.warn_cfl = false;
  const auto r = run(spec, Grid::make(-1.0, 1.0, 0.0625, 0.1286, 0.05), o);
  const auto reg = regularity_report(r);
  CHECK(reg.total_mass_drift == 0.0);
  CHECK(reg.mass_drift == std::vector<double>{0.0, 0.0});
  CHECK(reg.max == std::vector<double>{0.0, 0.0});
  CHECK(reg.tv_max == 0.0);
  CHECK(reg.lipschitz_time == 0.0);
}

TEST_CASE("mass drift with and without the exchange source") {
  SolverOptions o;
  o.warn_cfl = false;
  const auto grid = Grid::make(-4.0, 4.0, 0.015625, 0.1286, 0.5);
  const auto plain = regularity_report(run(build_two_lane(0.0, 0.0, false, true), grid, o));
  for (double d : plain.mass_drift) CHECK(d <= 1e-10 * static_cast<double>(grid.steps));

  const auto exch = regularity_report(run(build_two_lane(0.0, 0.0, true, true), grid, o));
  CHECK(exch.total_mass_drift <= 1e-10 * static_cast<double>(grid.steps));
  CHECK(exch.mass_drift[0] > 1e-3);
  CHECK(exch.mass_drift[1] > 1e-3);
  CHECK(exch.lipschitz_time > 0.0);
  CHECK(exch.tv_growth <= 2.0);
}
