#include <doctest.h>

#include <cmath>

#include "homog/ttime.hpp"
#include "oracles/oracles.hpp"

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

EnvironmentSpec constant_geq(Point v) {
  EnvironmentSpec s;
  s.mode = EnvMode::Geq;
  s.mean_flow = v;
  return s;
}

FrontOptions coarse() {
  FrontOptions o;
  o.h = 0.25;
  return o;
}

}  // namespace

TEST_CASE("travel time to the starting point is zero") {
  const EnvironmentSpec s = random_kpp();
  const TravelTimeRecord r = travel_time_kpp(build_environment(s, 1), 0.0, {}, {}, coarse());
  CHECK(r.tau == 0.0);
  CHECK(r.kind == FrontKind::Kpp);
}

TEST_CASE("one-dimensional travel time agrees with the fine-grid oracle") {
  const EnvironmentSpec s = constant_kpp(1);
  FrontOptions o;
  o.h = 0.1;
  const TravelTimeRecord r = travel_time_kpp(build_environment(s, 0), 0.0, {}, {20.0, 0.0}, o);
  oracle::KppLine line;
  const double expect = line.travel_time(20.0);
  CHECK(r.tau == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("constant-flow arrival time") {
  const EnvironmentSpec s = constant_geq({0.5, 0.0});
  FrontOptions o;
  o.h = 0.1;
  o.margin = 3.0;
  const TravelTimeRecord r = arrival_time_geq(build_environment(s, 0), 0.0, {}, {10.0, 0.0}, o);
  CHECK(r.kind == FrontKind::Geq);
  CHECK(std::abs(r.tau - 10.0 / 1.5) <= o.h / 1.5 + 1e-9);
}

TEST_CASE("degenerate subadditivity triples") {
  const EnvironmentSpec s = random_kpp();
  const Environment env = build_environment(s, 7);
  const FrontOptions o = coarse();
  const double m = m_guess(s);
  const InequalityReport a = check_subadditivity(env, 0.0, {}, {}, {5.0, 0.0}, o, m);
  CHECK(a.ok());
  CHECK(a.rhs - a.lhs == doctest::Approx(0.0));
  const InequalityReport b = check_subadditivity(env, 0.0, {}, {5.0, 0.0}, {5.0, 0.0}, o, m);
  CHECK(b.ok());
  CHECK(b.lhs == b.rhs);
}

TEST_CASE("collinear subadditivity on random environments") {
  const EnvironmentSpec s = random_kpp();
  const FrontOptions o = coarse();
  const double m = m_guess(s);
  for (Seed seed = 0; seed < 3; ++seed) {
    const InequalityReport r =
        check_subadditivity(build_environment(s, seed), 0.0, {}, {5.0, 0.0}, {10.0, 0.0}, o, m);
    CHECK_MESSAGE(r.ok(), r.reproduce);
  }
}

TEST_CASE("restart monotonicity") {
  const FrontOptions o = coarse();
  SUBCASE("constant environment") {
    const EnvironmentSpec s = constant_kpp();
    const double m = m_guess(s);
    const InequalityReport r = check_restart_monotonicity(build_environment(s, 0), 0.0, {}, {}, {4.0, 0.0}, m, o, m);
    CHECK(r.ok());
    CHECK(r.rhs - r.lhs == doctest::Approx(m));
  }
  SUBCASE("random environment") {
    const EnvironmentSpec s = random_kpp();
    const double m = m_guess(s);
    const InequalityReport r = check_restart_monotonicity(build_environment(s, 3), 0.0, {}, {}, {4.0, 3.0}, m, o, m);
    CHECK_MESSAGE(r.ok(), r.reproduce);
  }
  SUBCASE("precondition") {
    const EnvironmentSpec s = constant_kpp();
    CHECK_THROWS_AS(check_restart_monotonicity(build_environment(s, 0), 0.0, {}, {3.0, 0.0}, {4.0, 0.0}, 1.0, o,
                                               m_guess(s)),
                    InvalidSpec);
  }
}

TEST_CASE("target Lipschitz bound") {
  const EnvironmentSpec s = random_kpp();
  const Environment env = build_environment(s, 5);
  const double m = m_guess(s);
  const FrontOptions o = coarse();
  CHECK(check_lipschitz_in_target(env, 0.0, {}, {6.0, 0.0}, {6.0, 0.0}, o, m).ok());
  CHECK(check_lipschitz_in_target(env, 0.0, {}, {6.0, 0.0}, {}, o, m).ok());
  CHECK(check_lipschitz_in_target(env, 0.0, {}, {6.0, 0.0}, {4.0, 2.0}, o, m).ok());
}

TEST_CASE("linear bound and tolerance") {
  TravelTimeRecord rec;
  rec.x = {3.0, 4.0};
  rec.tau = 12.0;
  CHECK(check_linear_bound(rec, 2.0, 0.0).ok());
  rec.tau = 12.5;
  CHECK(check_linear_bound(rec, 2.0, 0.0).margin() == doctest::Approx(-0.5));
  CHECK_FALSE(check_linear_bound(rec, 2.0, 0.0).ok());
  Grid g;
  g.h = 0.25;
  g.dt = 0.01;
  CHECK(inequality_tolerance(g, 3.0) == doctest::Approx(3.02));
}

TEST_CASE("ball sandwich counts") {
  const std::vector<FrontSample> front{{1.0, 5.0, 5.0}, {2.0, 1.0, 1.5}, {4.0, 2.5, 5.0}, {5.0, 0.5, 30.0}};
  const SandwichCount c = check_ball_sandwich(front, 2.0, 0.1);
  CHECK(c.samples == 3);
  CHECK(c.violations == 1);
  CHECK(c.worst_margin < 0.0);
}

TEST_CASE("arrival times commute with grid-aligned shifts") {
  const EnvironmentSpec s = random_kpp();
  const Environment env = build_environment(s, 12);
  const Environment moved = shift(env, 1.5, {2.0, -1.0});
  FrontOptions o = coarse();
  o.dyadic_dt = true;
  const TravelTimeRecord a = travel_time_kpp(moved, 0.0, {}, {4.0, 1.0}, o);
  const TravelTimeRecord b = travel_time_kpp(env, 1.5, {2.0, -1.0}, {6.0, 0.0}, o);
  CHECK(a.tau == b.tau);
}

TEST_CASE("deadline overrun is an anomaly") {
  const EnvironmentSpec s = constant_kpp();
  FrontOptions o = coarse();
  o.deadline_factor = 0.05;
  CHECK_THROWS_AS(travel_time_kpp(build_environment(s, 0), 0.0, {}, {8.0, 0.0}, o), NumericalAnomaly);
}

TEST_CASE("calibration constant dominates its ingredients") {
  const EnvironmentSpec s = random_kpp();
  const MCalibration cal = calibrate_m(s, coarse(), 2, 6.0, 9);
  CHECK(cal.seeds == 2);
  CHECK(cal.m_emp == doctest::Approx(1.5 * std::max({cal.hair_trigger, cal.outer_speed, cal.inner_slowness})));
  CHECK(cal.outer_speed > 1.0);
  CHECK(cal.outer_speed < kpp_speed_bound(s) + 1.0);
}
