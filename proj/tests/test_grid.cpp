#include "nlmem/error.hpp"
#include "nlmem/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlmem;

TEST_CASE("grid geometry") {
  const auto g = Grid::make(-4.0, 4.0, 7.8125e-3, 0.1286, 0.5);
  CHECK(g.cells == 1024);
  CHECK(std::abs(g.cells * g.dx - 8.0) < 1e-12);
  CHECK(g.dt == doctest::Approx(0.1286 * 7.8125e-3));
  CHECK(g.steps == 498);
  CHECK(g.time_at(g.steps) == 0.5);
  CHECK(g.last_dt <= g.dt);
  CHECK(g.last_dt > 0.0);
  CHECK(g.time_at(g.steps - 1) + g.last_dt == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.cell_center(0) == doctest::Approx(-4.0 + 0.5 * 7.8125e-3));
  CHECK(g.interface_position(1024) == doctest::Approx(4.0));

  const auto sweep = Grid::make(-4.0, 4.0, 0.00625, 0.1286, 0.5);
  CHECK(sweep.cells == 1280);
  CHECK(sweep.steps == 623);
}

TEST_CASE("grid rejects non-dividing spacing and bad parameters") {
  CHECK_THROWS_AS(Grid::make(-4.0, 4.0, 0.3, 0.1, 0.5), Error);
  CHECK_THROWS_AS(Grid::make(-4.0, 4.0, 0.0, 0.1, 0.5), Error);
  CHECK_THROWS_AS(Grid::make(4.0, -4.0, 0.1, 0.1, 0.5), Error);
  CHECK_THROWS_AS(Grid::make(-4.0, 4.0, 0.1, -0.1, 0.5), Error);
}

TEST_CASE("zero final time has no steps") {
  const auto g = Grid::make(-1.0, 1.0, 0.1, 0.5, 0.0);
  CHECK(g.steps == 0);
  CHECK(g.time_at(0) == 0.0);
}

TEST_CASE("projection of zero, constant and two-lane data") {
  const auto g = Grid::make(-4.0, 4.0, 7.8125e-3, 0.1286, 0.5);
  auto spec = build_two_lane(0.0, 0.0, true, true);
  const auto u = project_initial(spec, g);
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < g.cells; ++i) {
    m1 += u(0, i);
    m2 += u(1, i);
    CHECK(u(0, i) >= 0.0);
    CHECK(u(0, i) <= 1.0);
  }
  CHECK(std::abs(g.dx * m1 - 2.0) < 1e-10);
  CHECK(std::abs(g.dx * m2 - 2.0) < 1e-10);

  spec.species[0].initial = [](double) { return 0.0; };
  spec.species[1].initial = [](double) { return 0.3; };
  const auto c = project_initial(spec, g);
  for (std::size_t i = 0; i < g.cells; ++i) {
    CHECK(c(0, i) == 0.0);
    CHECK(c(1, i) == doctest::Approx(0.3).epsilon(1e-14));
  }
}

TEST_CASE("projection rejects data outside [0,1]") {
  const auto g = Grid::make(-1.0, 1.0, 0.1, 0.5, 0.1);
  auto spec = build_two_lane(0.0, 0.0, false, true);
  spec.species[0].initial = [](double) { return 1.2; };
  try {
    project_initial(spec, g);
    FAIL("expected invalid-model");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_model);
  }
  spec.species[0].initial = [](double) { return 1.0 + 1e-14; };
  const auto u = project_initial(spec, g);
  CHECK(u(0, 3) == 1.0);
}

TEST_CASE("CFL bound examples") {
  const auto r = check_cfl(ModelBounds{1.0, 2.5, 0.0}, 0.06, 1.0 / 3.0, 0.001);
  CHECK(r.bound == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(r.admissible);
  CHECK_FALSE(check_cfl(ModelBounds{1.0, 2.5, 0.0}, 0.07, 1.0 / 3.0, 0.001).admissible);

  const double beta = 0.2;
  const auto flat = check_cfl(ModelBounds{0.0, 17.0, 0.0}, 0.1, beta, 0.01);
  CHECK(flat.bound == doctest::Approx(std::min({1.0, 4.0 - 6.0 * beta, 6.0 * beta})));

  CHECK_THROWS_AS(check_cfl(ModelBounds{1.0, 1.0, 0.0}, 0.1, 0.0, 0.01), Error);
  CHECK_THROWS_AS(check_cfl(ModelBounds{1.0, 1.0, 0.0}, 0.1, 2.0 / 3.0, 0.01), Error);
}

TEST_CASE("CFL max lambda solves the dt-dependent inequality") {
  const ModelBounds b{1.0, 2.5, 1.7};
  const double dx = 7.8125e-3;
  const auto r = check_cfl(b, 0.1286, 0.333433, 0.1286 * dx);
  CHECK_FALSE(r.admissible);
  // lambda = max_lambda satisfies the inequality with dt = lambda dx
  const auto at = check_cfl(b, r.max_lambda, 0.333433, r.max_lambda * dx);
  CHECK(at.admissible);
  CHECK(r.max_lambda <= at.bound * (1.0 + 1e-12));
  CHECK(r.max_dt == doctest::Approx(r.max_lambda * dx));
}

TEST_CASE("admissible lambda is nonincreasing in the flux and velocity bounds") {
  const double dx = 0.01;
  double prev = 1e300;
  for (double lip : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const auto r = check_cfl(ModelBounds{lip, 2.5, 1.0}, 0.01, 0.3, 0.01 * dx);
    CHECK(r.max_lambda <= prev);
    prev = r.max_lambda;
  }
  prev = 1e300;
  for (double sup : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const auto r = check_cfl(ModelBounds{1.0, sup, 1.0}, 0.01, 0.3, 0.01 * dx);
    CHECK(r.max_lambda <= prev);
    prev = r.max_lambda;
  }
}
