#include <doctest.h>

#include <cmath>

#include "fasense/ao.hpp"
#include "test_support.hpp"

using namespace fasense;

TEST_SUITE("ao") {

TEST_CASE("one allowed iteration produces a two-point trace") {
  Scenario sc = testutil::small_scenario();
  sc.ao.max_iterations = 1;
  REQUIRE(validate(sc).empty());
  const Solution sol = run_ao(sc, {.threads = 1});
  CHECK(sol.trace.size() == 2);
  CHECK(sol.iterations_used == 1);
  CHECK(sol.trace.front().iteration == 0);
  CHECK(sol.trace.back().iteration == 1);
}

TEST_CASE("an infinite threshold stops after the first iteration, converged") {
  Scenario sc = testutil::small_scenario();
  sc.ao.epsilon = std::numeric_limits<double>::infinity();
  REQUIRE(validate(sc).empty());
  const Solution sol = run_ao(sc, {.threads = 1});
  CHECK(sol.converged);
  CHECK(sol.iterations_used == 1);
  CHECK(sol.trace.size() == 2);
}

TEST_CASE("the trace never decreases and every iterate is feasible") {
  const Scenario sc = testutil::small_scenario();
  const Solution sol = run_ao(sc, {.threads = 1});
  REQUIRE(sol.trace.size() >= 2);
  // by construction the gates make this exact, not just within tolerance
  const MonotoneCheck strict = check_monotone(sol.trace, 0.0);
  CHECK(strict.pass);
  audit_solution(sc, sol);  // throws on any constraint violation
  CHECK(sol.report.reciprocal_objective == sol.trace.back().objective);
  CHECK(sol.trace.back().objective > sol.trace.front().objective);
}

TEST_CASE("runs are deterministic for any worker count") {
  const Scenario sc = testutil::small_scenario();
  const Solution a = run_ao(sc, {.threads = 1});
  const Solution b = run_ao(sc, {.threads = 3});
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].objective == b.trace[i].objective);
    CHECK(a.trace[i].avg_crb == b.trace[i].avg_crb);
  }
  for (std::size_t n = 0; n < a.path.q.size(); ++n) CHECK(a.path.q[n] == b.path.q[n]);
  for (int n = 0; n < sc.num_slots; ++n) {
    CHECK((a.layouts[static_cast<std::size_t>(n)].x - b.layouts[static_cast<std::size_t>(n)].x)
              .norm() == 0.0);
    CHECK((a.covariances[static_cast<std::size_t>(n)] - b.covariances[static_cast<std::size_t>(n)])
              .norm() == 0.0);
  }
}

TEST_CASE("a warm start resumes from the given state") {
  const Scenario sc = testutil::small_scenario();
  const Solution first = run_ao(sc, {.threads = 1});
  AoOptions opts;
  opts.threads = 1;
  opts.warm_start = WarmStart{first.path, first.covariances, first.layouts};
  const Solution resumed = run_ao(sc, opts);
  CHECK(resumed.trace.front().objective == first.trace.back().objective);
  CHECK(resumed.trace.back().objective >= first.trace.back().objective);
}

TEST_CASE("monotone checking flags the first offending step") {
  std::vector<TracePoint> constant = {{0, 5.0, 1.0}, {1, 5.0, 1.0}, {2, 5.0, 1.0}};
  CHECK(check_monotone(constant, 1e-9).pass);

  std::vector<TracePoint> rising = {{0, 1.0, 1.0}, {1, 2.0, 1.0}, {2, 4.0, 1.0}};
  CHECK(check_monotone(rising, 1e-9).pass);

  std::vector<TracePoint> dip = {{0, 1.0, 1.0}, {1, 3.0, 1.0}, {2, 2.0, 1.0}, {3, 4.0, 1.0}};
  const MonotoneCheck res = check_monotone(dip, 1e-9);
  CHECK(!res.pass);
  CHECK(res.first_violation == 2);
}

TEST_CASE("complexity estimate follows the closed formula") {
  Scenario sc;
  sc.num_slots = 20;
  sc.num_tx = 12;
  sc.num_rx = 12;
  sc.ao.max_iterations = 10;
  sc.ao.epsilon = 1e-3;
  sc.pso.iterations = 50;
  sc.pso.particles = 50;

  // independent re-evaluation of the same closed form
  const double solver = 10.0 * (std::pow(40.0, 3.5) + std::pow(20.0 * 144.0, 3.5)) *
                        std::log(1000.0);
  const double swarm = 20.0 * 50.0 * 50.0 * (12.0 + 12.0);
  CHECK(complexity_estimate(sc) == doctest::Approx(solver + swarm).epsilon(1e-12));

  // no swarm iterations, no swarm cost
  Scenario frozen = sc;
  frozen.pso.iterations = 0;
  CHECK(complexity_estimate(frozen) == doctest::Approx(solver).epsilon(1e-12));

  // doubling the particle count doubles only the swarm part
  Scenario doubled = sc;
  doubled.pso.particles = 100;
  CHECK(complexity_estimate(doubled) == doctest::Approx(solver + 2.0 * swarm).epsilon(1e-12));

  Scenario bad = sc;
  bad.ao.epsilon = 1.0;
  CHECK_THROWS_AS(complexity_estimate(bad), std::invalid_argument);
}

TEST_CASE("the audit names violated constraints") {
  const Scenario sc = testutil::small_scenario();
  Solution sol = run_ao(sc, {.threads = 1});

  Solution bad_power = sol;
  bad_power.covariances[1] *= 5.0;
  CHECK_THROWS_WITH_AS(audit_solution(sc, bad_power), doctest::Contains("power"),
                       std::runtime_error);

  Solution bad_path = sol;
  bad_path.path.q[2] += Vec2(500.0, 0.0);
  CHECK_THROWS_WITH_AS(audit_solution(sc, bad_path), doctest::Contains("velocity"),
                       std::runtime_error);

  Solution bad_layout = sol;
  bad_layout.layouts[0].x(0) = -1.0;
  CHECK_THROWS_WITH_AS(audit_solution(sc, bad_layout), doctest::Contains("layout"),
                       std::runtime_error);
}

}  // TEST_SUITE
