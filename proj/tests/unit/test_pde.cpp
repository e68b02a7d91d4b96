#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "homog/pde.hpp"

using namespace homog;

namespace {

EnvironmentSpec constant_kpp(int dim = 2) {
  EnvironmentSpec s;
  s.dim = dim;
  return s;
}

EnvironmentSpec random_kpp() {
  EnvironmentSpec s;
  s.ellipticity = 0.8;
  s.diffusion_max = 1.2;
  s.drift_max = 0.4;
  s.growth_min = 0.6;
  s.growth_max = 1.4;
  return s;
}

}  // namespace

TEST_CASE("ball datum") {
  const EnvironmentSpec s = constant_kpp();
  const Grid g = make_kpp_grid(s, 0.1, 3.0);
  const SolutionField sol = init_ball_datum(g, build_environment(s, 0), {});
  std::size_t count = 0, expect = 0;
  double mass = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (sol.u[k] > 0.0) {
      ++count;
      CHECK(sol.u[k] == 0.5);
    }
    if (norm(g.node(k)) <= 1.0 + 1e-9) ++expect;
    mass += sol.u[k] * g.h * g.h;
  }
  CHECK(count == expect);
  CHECK(mass == doctest::Approx(M_PI / 2).epsilon(0.05));

  const SolutionField one = init_ball_datum(g, build_environment(s, 0), {}, 1.0);
  CHECK(*std::max_element(one.u.begin(), one.u.end()) == 1.0);
}

TEST_CASE("step bound") {
  EnvironmentSpec s = random_kpp();
  const double h = 0.2;
  const double dt = kpp_stable_dt(s, h);
  CHECK(dt * (2 * 2 * 1.2 / (h * h) + 2 * s.drift_component_max() / h + 1.4) == doctest::Approx(1.0));
  Grid g = make_kpp_grid(s, h, 2.0);
  g.dt = 1.01 * dt;
  CHECK_THROWS_AS(KppSolver(build_environment(s, 0), {}, g), CflViolation);
}

TEST_CASE("constant states") {
  const EnvironmentSpec s = constant_kpp();
  const Grid g = make_kpp_grid(s, 0.2, 2.0);
  const Environment env = build_environment(s, 0);
  KppSolver solver(env, {}, g);
  solver.set_boundary_guard(std::nullopt);

  SolutionField zero{g, env, 0.0, 0.0, std::vector<double>(g.size(), 0.0)};
  solver.step(zero);
  for (double v : zero.u) CHECK(v == 0.0);

  SolutionField third{g, env, 0.0, 0.0, std::vector<double>(g.size(), 0.3)};
  solver.step(third);
  const int m = g.half_nodes();
  CHECK(third.u[g.index(m, m)] == doctest::Approx(0.3 + g.dt * 0.21).epsilon(1e-12));
  CHECK(third.u[g.index(m + 2, m - 3)] == doctest::Approx(0.3 + g.dt * 0.21).epsilon(1e-12));
}

TEST_CASE("interior stays at one") {
  const EnvironmentSpec s = constant_kpp();
  const Grid g = make_kpp_grid(s, 0.2, 3.0);
  const Environment env = build_environment(s, 0);
  KppSolver solver(env, {}, g);
  solver.set_boundary_guard(std::nullopt);
  SolutionField one{g, env, 0.0, 0.0, std::vector<double>(g.size(), 1.0)};
  solver.step(one);
  const int m = g.half_nodes();
  CHECK(one.u[g.index(m, m)] == 1.0);
  for (double v : one.u) CHECK(v <= 1.0);
}

TEST_CASE("solve to the current time is the identity") {
  const EnvironmentSpec s = random_kpp();
  const Grid g = make_kpp_grid(s, 0.25, 4.0);
  const SolutionField a = init_ball_datum(g, build_environment(s, 1), {});
  const SolutionField b = solve_until(a, {}, 0.0);
  CHECK(a.u == b.u);
  CHECK(b.time == 0.0);
}

TEST_CASE("ordered data stay ordered") {
  const EnvironmentSpec s = random_kpp();
  const Grid g = make_kpp_grid(s, 0.25, 4.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int pair = 0; pair < 10; ++pair) {
    const Environment env = build_environment(s, 100 + pair);
    KppSolver solver(env, {}, g);
    solver.set_boundary_guard(std::nullopt);
    SolutionField lo{g, env, 0.0, 0.0, std::vector<double>(g.size())};
    SolutionField hi = lo;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double a = U(rng), b = U(rng);
      lo.u[k] = std::min(a, b);
      hi.u[k] = std::max(a, b);
    }
    for (int n = 0; n < 30; ++n) {
      solver.step(lo);
      solver.step(hi);
      for (std::size_t k = 0; k < g.size(); ++k) REQUIRE(lo.u[k] <= hi.u[k] + 1e-10);
    }
  }
}

TEST_CASE("values stay in the unit interval") {
  const EnvironmentSpec s = random_kpp();
  const Grid g = make_kpp_grid(s, 0.25, 10.0);
  SolutionField sol = init_ball_datum(g, build_environment(s, 4), {}, 1.0);
  sol = solve_until(sol, {}, 1.5);
  for (double v : sol.u) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("front reaching the box edge is an anomaly") {
  const EnvironmentSpec s = constant_kpp();
  const Grid g = make_kpp_grid(s, 0.25, 3.0);
  const SolutionField sol = init_ball_datum(g, build_environment(s, 0), {});
  CHECK_THROWS_AS(solve_until(sol, {}, 10.0), NumericalAnomaly);
}

TEST_CASE("one-dimensional front runs near speed two") {
  const EnvironmentSpec s = constant_kpp(1);
  const Grid g = make_kpp_grid(s, 0.1, 100.0);
  SolutionField sol = init_ball_datum(g, build_environment(s, 0), {});
  sol = solve_until(sol, {}, 40.0);
  const FrontRadii r = front_radii(g, sol.u, 0.5, {});
  CHECK(r.outer == doctest::Approx(80.0).epsilon(0.1));
  CHECK(r.inner <= r.outer + g.h);
}

TEST_CASE("superlevel set and front radii") {
  const EnvironmentSpec s = constant_kpp();
  const Grid g = make_kpp_grid(s, 0.1, 3.0);
  const SolutionField sol = init_ball_datum(g, build_environment(s, 0), {}, 0.5, 0.0, 1.5);
  const RegionMask m = superlevel_set(sol, 0.5);
  CHECK(m.count() == ball_nodes(g, {}, 1.5).size());
  CHECK(superlevel_set(sol, 0.6).empty());
  const FrontRadii r = front_radii(g, sol.u, 0.5, {});
  CHECK(r.outer == doctest::Approx(1.5).epsilon(0.01));
  CHECK(r.inner == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("snapshot format") {
  const EnvironmentSpec s = constant_kpp(1);
  const Grid g = make_kpp_grid(s, 0.5, 1.0);
  std::vector<double> v(g.size(), 0.25);
  std::ostringstream os;
  write_snapshot_csv(os, g, 1.5, v);
  const std::string text = os.str();
  CHECK(text.rfind("# t=1.5", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(g.size()) + 2);
}
