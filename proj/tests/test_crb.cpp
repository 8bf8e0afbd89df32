#include <doctest.h>

#include <cmath>

#include "fasense/crb.hpp"
#include "fasense/oracles.hpp"
#include "fasense/rng.hpp"
#include "fasense/trajectory.hpp"
#include "test_support.hpp"

using namespace fasense;

namespace {

constexpr double kLambda = 0.0107;
constexpr double kNoise = 1e-12;
constexpr int kFrames = 200;

struct Config {
  SteeringContext ctx;
  VecX rx;
  CMatX cov;
};

Config random_config(RngStream& rng, bool rank_one) {
  Config c;
  const int m_tx = 6;
  const int m_rx = 5;
  const VecX tx = sample_feasible_coords(m_tx, 20 * kLambda, 0.5 * kLambda, rng);
  c.rx = sample_feasible_coords(m_rx, 20 * kLambda, 0.5 * kLambda, rng);
  const double theta = rng.uniform(0.05, M_PI / 2 - 0.05);
  c.ctx.theta = theta;
  c.ctx.dist = rng.uniform(100.0, 800.0);
  c.ctx.a = steering_vector(tx, theta, kLambda);
  c.ctx.b = steering_vector(c.rx, theta, kLambda);
  c.ctx.a_dot = steering_derivative(tx, theta, kLambda);
  c.ctx.b_dot = steering_derivative(c.rx, theta, kLambda);
  if (rank_one) {
    CVecX v(m_tx);
    for (int i = 0; i < m_tx; ++i) v(i) = rng.complex_normal();
    c.cov = 1.0 / v.squaredNorm() * (v * v.adjoint());
  } else {
    CMatX z(m_tx, m_tx);
    for (int col = 0; col < m_tx; ++col) {
      for (int row = 0; row < m_tx; ++row) z(row, col) = rng.complex_normal();
    }
    c.cov = z * z.adjoint();
    c.cov /= c.cov.real().trace();
  }
  return c;
}

}  // namespace

TEST_SUITE("crb") {

TEST_CASE("trace identities: closed form equals the direct traces") {
  RngStream rng(21);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Config c = random_config(rng, i % 2 == 0);
    const TraceTerms direct = trace_terms_direct(c.ctx, c.cov);
    const TraceTerms closed = trace_terms_closed(c.ctx, c.rx, kLambda, c.cov);
    worst = std::max(worst, trace_terms_gap(direct, closed));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("trace identities: identical receive positions") {
  RngStream rng(22);
  Config c = random_config(rng, false);
  const int m_rx = static_cast<int>(c.rx.size());
  c.rx = VecX::Constant(m_rx, 2 * kLambda);
  c.ctx.b = steering_vector(c.rx, c.ctx.theta, kLambda);
  c.ctx.b_dot = steering_derivative(c.rx, c.ctx.theta, kLambda);
  const TraceTerms t = trace_identities(c.ctx, c.rx, kLambda, c.cov);
  const double quad = (c.ctx.a.adjoint() * c.cov * c.ctx.a).value().real();
  CHECK(t.psi_psi == doctest::Approx(m_rx * quad).epsilon(1e-12));
}

TEST_CASE("trace identities: zero covariance zeroes every term") {
  RngStream rng(23);
  Config c = random_config(rng, false);
  const TraceTerms t = trace_identities(c.ctx, c.rx, kLambda, CMatX::Zero(6, 6));
  CHECK(t.psi_psi == 0.0);
  CHECK(std::abs(t.dpsi_psi) == 0.0);
  CHECK(t.dpsi_dpsi == 0.0);
  CHECK(t.dpsi_psi_abs2 == 0.0);
}

TEST_CASE("trace identities: dimension mismatch is rejected") {
  RngStream rng(24);
  const Config c = random_config(rng, false);
  CHECK_THROWS_AS(trace_terms_direct(c.ctx, CMatX::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("full CRB is singular overhead and with a degenerate receive array") {
  VecX tx(4), rx(4);
  tx << 0, kLambda, 2 * kLambda, 4 * kLambda;
  rx << 0, kLambda, 2 * kLambda, 4 * kLambda;

  SteeringContext overhead;
  overhead.theta = std::asin(1.0);
  overhead.dist = 100.0;
  overhead.a = steering_vector(tx, overhead.theta, kLambda);
  overhead.b = steering_vector(rx, overhead.theta, kLambda);
  overhead.a_dot = steering_derivative(tx, overhead.theta, kLambda);
  overhead.b_dot = steering_derivative(rx, overhead.theta, kLambda);
  CHECK(std::isinf(
      crb_full(overhead, CMatX::Identity(4, 4), {1, 0}, 100.0, kFrames, kNoise)));

  const VecX rx_equal = VecX::Constant(5, kLambda);
  SteeringContext degenerate;
  degenerate.theta = 0.7;
  degenerate.dist = 200.0;
  degenerate.a = steering_vector(tx, 0.7, kLambda);
  degenerate.b = steering_vector(rx_equal, 0.7, kLambda);
  degenerate.a_dot = steering_derivative(tx, 0.7, kLambda);
  degenerate.b_dot = steering_derivative(rx_equal, 0.7, kLambda);
  // with the rank-1 beam the pipeline produces, zero receive aperture means
  // zero Fisher information in the full form too
  const CMatX beam = 0.25 * (degenerate.a * degenerate.a.adjoint());
  CHECK(std::isinf(crb_full(degenerate, beam, {1, 0}, 200.0, kFrames, kNoise)));
  CHECK(std::isinf(crb_reduced(degenerate.a, rx_equal, 0.7, CMatX::Identity(4, 4), {1, 0},
                               200.0, kFrames, kNoise, kLambda)));
  CHECK(std::isinf(crb_reduced(steering_vector(tx, M_PI / 2, kLambda), rx, M_PI / 2,
                               CMatX::Identity(4, 4), {1, 0}, 100.0, kFrames, kNoise, kLambda)));
}

TEST_CASE("full and reduced forms coincide on rank-1 covariances") {
  RngStream rng(25);
  const double worst = oracle_crb_equivalence(rng, 1000);
  CHECK(worst < 1e-8);
}

TEST_CASE("the full form never exceeds the reduced form") {
  RngStream rng(26);
  // general-rank covariances carry extra transmit-side information
  CHECK(oracle_crb_order(rng, 300) <= 1e-9);
}

TEST_CASE("reduced CRB scalings") {
  RngStream rng(27);
  const Config c = random_config(rng, true);
  const double base = crb_reduced(c.ctx.a, c.rx, c.ctx.theta, c.cov, {1, 0}, c.ctx.dist,
                                  kFrames, kNoise, kLambda);
  REQUIRE(std::isfinite(base));

  // doubling the covariance halves the bound
  const double doubled = crb_reduced(c.ctx.a, c.rx, c.ctx.theta, 2.0 * c.cov, {1, 0},
                                     c.ctx.dist, kFrames, kNoise, kLambda);
  CHECK(doubled == doctest::Approx(base / 2).epsilon(1e-12));

  // common translation of both arrays changes nothing
  VecX tx(6);
  tx << 0, kLambda, 2 * kLambda, 3 * kLambda, 5 * kLambda, 8 * kLambda;
  const CVecX a = steering_vector(tx, c.ctx.theta, kLambda);
  const double here = crb_reduced(a, c.rx, c.ctx.theta, c.cov, {1, 0}, c.ctx.dist, kFrames,
                                  kNoise, kLambda);
  const CVecX a_moved = steering_vector(tx.array() + 2.5 * kLambda, c.ctx.theta, kLambda);
  const VecX rx_moved = c.rx.array() + 2.5 * kLambda;
  const double moved = crb_reduced(a_moved, rx_moved, c.ctx.theta, c.cov, {1, 0}, c.ctx.dist,
                                   kFrames, kNoise, kLambda);
  CHECK(moved == doctest::Approx(here).epsilon(1e-9));
}

TEST_CASE("matched rank-1 beam exposes the a^H R a = P M factor") {
  VecX tx(6), rx(5);
  tx << 0, kLambda, 2 * kLambda, 3 * kLambda, 5 * kLambda, 8 * kLambda;
  rx << 0, kLambda, 3 * kLambda, 6 * kLambda, 10 * kLambda;
  const double theta = 0.8;
  const double dist = 300.0;
  const double power = 1.0;
  const CVecX a = steering_vector(tx, theta, kLambda);
  const CMatX cov = power / 6.0 * (a * a.adjoint());
  const double crb = crb_reduced(a, rx, theta, cov, {1, 0}, dist, kFrames, kNoise, kLambda);
  const double kappa = 2 * M_PI / kLambda * std::cos(theta);
  const double expected = 2 * dist * dist * kNoise /
                          (kFrames * kappa * kappa * (power * 6.0) * aperture_term(rx));
  CHECK(crb == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("CRB depends only on the RCS magnitude") {
  RngStream rng(28);
  const Config c = random_config(rng, true);
  const double zero_phase = crb_reduced(c.ctx.a, c.rx, c.ctx.theta, c.cov, {0.8, 0.0},
                                        c.ctx.dist, kFrames, kNoise, kLambda);
  const std::complex<double> rotated = std::polar(0.8, 2.1);
  const double with_phase = crb_reduced(c.ctx.a, c.rx, c.ctx.theta, c.cov, rotated, c.ctx.dist,
                                        kFrames, kNoise, kLambda);
  CHECK(with_phase == doctest::Approx(zero_phase).epsilon(1e-12));
}

TEST_CASE("CRB is monotone in each resource") {
  RngStream rng(29);
  const Config c = random_config(rng, true);
  auto eval = [&](double cov_scale, double rx_spread, double theta, double dist) {
    const VecX rx = (c.rx.array() - c.rx.mean()) * rx_spread + c.rx.mean();
    const CVecX a = c.ctx.a;  // steering fixed; theta enters the cosine factor
    return crb_reduced(a, rx, theta, cov_scale * c.cov, {1, 0}, dist, kFrames, kNoise, kLambda);
  };
  const double base = eval(1.0, 1.0, 0.7, 300.0);
  CHECK(eval(1.5, 1.0, 0.7, 300.0) < base);  // stronger beam
  CHECK(eval(1.0, 1.3, 0.7, 300.0) < base);  // wider receive aperture
  CHECK(eval(1.0, 1.0, 0.5, 300.0) < base);  // larger cos(theta)
  CHECK(eval(1.0, 1.0, 0.7, 200.0) < base);  // closer target
}

TEST_CASE("reciprocal is additive in the covariance") {
  RngStream rng(30);
  const Config c1 = random_config(rng, true);
  Config c2 = random_config(rng, true);
  c2.ctx = c1.ctx;
  c2.rx = c1.rx;
  auto recip = [&](const CMatX& cov) {
    return crb_reciprocal(crb_reduced(c1.ctx.a, c1.rx, c1.ctx.theta, cov, {1, 0}, c1.ctx.dist,
                                      kFrames, kNoise, kLambda));
  };
  CHECK(recip(c1.cov + c2.cov) ==
        doctest::Approx(recip(c1.cov) + recip(c2.cov)).epsilon(1e-10));
}

TEST_CASE("evaluate fills the report consistently") {
  Scenario sc = testutil::small_scenario();
  sc.q_init = sc.targets[0];
  sc.q_final = sc.targets[0];
  REQUIRE(validate(sc).empty());

  Path path;
  path.q.assign(static_cast<std::size_t>(sc.num_slots), sc.targets[0]);
  const ArrayLayout layout{max_spread_coords(sc.num_tx, sc.aperture),
                           max_spread_coords(sc.num_rx, sc.aperture)};
  std::vector<ArrayLayout> layouts(static_cast<std::size_t>(sc.num_slots), layout);
  std::vector<CMatX> covs(static_cast<std::size_t>(sc.num_slots),
                          sc.p_max_w / sc.num_tx * CMatX::Identity(sc.num_tx, sc.num_tx));

  const CrbReport report = evaluate(sc, path, covs, layouts);
  CHECK(report.per_slot_per_target.rows() == sc.num_slots);
  CHECK(report.per_slot_per_target.cols() == sc.num_targets);

  // overhead slots for target 1 are singular, the other target stays finite
  CHECK(report.infinite_count == sc.num_slots);
  for (int n = 0; n < sc.num_slots; ++n) {
    CHECK(std::isinf(report.per_slot_per_target(n, 0)));
    CHECK(std::isfinite(report.per_slot_per_target(n, 1)));
  }

  // reciprocal objective equals the mean of entry reciprocals, 1/inf := 0
  double acc = 0.0;
  for (int n = 0; n < sc.num_slots; ++n) {
    for (int k = 0; k < sc.num_targets; ++k) {
      acc += crb_reciprocal(report.per_slot_per_target(n, k));
    }
  }
  CHECK(report.reciprocal_objective ==
        doctest::Approx(acc / (sc.num_slots * sc.num_targets)).epsilon(1e-12));

  // average skips the singular entries
  double finite_sum = 0.0;
  for (int n = 0; n < sc.num_slots; ++n) finite_sum += report.per_slot_per_target(n, 1);
  CHECK(report.avg_crb == doctest::Approx(finite_sum / sc.num_slots).epsilon(1e-12));
}

TEST_CASE("identical slots reduce the average to the single value") {
  Scenario sc = testutil::small_scenario();
  sc.num_targets = 1;
  sc.targets = {{300.0, 120.0}};
  sc.rcs_m2 = {1.0};
  sc.q_init = {100.0, 200.0};
  sc.q_final = {100.0, 200.0};
  REQUIRE(validate(sc).empty());

  Path path;
  path.q.assign(static_cast<std::size_t>(sc.num_slots), sc.q_init);
  const ArrayLayout layout{max_spread_coords(sc.num_tx, sc.aperture),
                           max_spread_coords(sc.num_rx, sc.aperture)};
  std::vector<ArrayLayout> layouts(static_cast<std::size_t>(sc.num_slots), layout);
  std::vector<CMatX> covs(static_cast<std::size_t>(sc.num_slots),
                          sc.p_max_w / sc.num_tx * CMatX::Identity(sc.num_tx, sc.num_tx));
  const CrbReport report = evaluate(sc, path, covs, layouts);
  const double single = report.per_slot_per_target(0, 0);
  CHECK(report.avg_crb == doctest::Approx(single).epsilon(1e-12));
  CHECK(report.reciprocal_objective == doctest::Approx(1.0 / single).epsilon(1e-12));
}

TEST_CASE("doubling the noise power doubles every entry") {
  Scenario sc = testutil::small_scenario();
  Scenario noisy = sc;
  noisy.noise_dbm = sc.noise_dbm + 10.0 * std::log10(2.0);
  REQUIRE(validate(noisy).empty());

  Path path = straight_line_path(sc.q_init, sc.q_final, sc.num_slots);
  const ArrayLayout layout{max_spread_coords(sc.num_tx, sc.aperture),
                           max_spread_coords(sc.num_rx, sc.aperture)};
  std::vector<ArrayLayout> layouts(static_cast<std::size_t>(sc.num_slots), layout);
  std::vector<CMatX> covs(static_cast<std::size_t>(sc.num_slots),
                          sc.p_max_w / sc.num_tx * CMatX::Identity(sc.num_tx, sc.num_tx));
  const CrbReport a = evaluate(sc, path, covs, layouts);
  const CrbReport b = evaluate(noisy, path, covs, layouts);
  for (int n = 0; n < sc.num_slots; ++n) {
    for (int k = 0; k < sc.num_targets; ++k) {
      CHECK(b.per_slot_per_target(n, k) ==
            doctest::Approx(2.0 * a.per_slot_per_target(n, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("the report is symmetric under target relabeling") {
  Scenario sc = testutil::small_scenario();
  Scenario swapped = sc;
  std::swap(swapped.targets[0], swapped.targets[1]);

  Path path = straight_line_path(sc.q_init, sc.q_final, sc.num_slots);
  const ArrayLayout layout{max_spread_coords(sc.num_tx, sc.aperture),
                           max_spread_coords(sc.num_rx, sc.aperture)};
  std::vector<ArrayLayout> layouts(static_cast<std::size_t>(sc.num_slots), layout);
  std::vector<CMatX> covs(static_cast<std::size_t>(sc.num_slots),
                          sc.p_max_w / sc.num_tx * CMatX::Identity(sc.num_tx, sc.num_tx));
  const CrbReport a = evaluate(sc, path, covs, layouts);
  const CrbReport b = evaluate(swapped, path, covs, layouts);
  CHECK(a.avg_crb == doctest::Approx(b.avg_crb).epsilon(1e-12));
  CHECK(a.per_slot_per_target(2, 0) == doctest::Approx(b.per_slot_per_target(2, 1)));
}

TEST_CASE("infeasible inputs are rejected with a named constraint") {
  const Scenario sc = testutil::small_scenario();
  Path path = straight_line_path(sc.q_init, sc.q_final, sc.num_slots);
  const ArrayLayout layout{max_spread_coords(sc.num_tx, sc.aperture),
                           max_spread_coords(sc.num_rx, sc.aperture)};
  std::vector<ArrayLayout> layouts(static_cast<std::size_t>(sc.num_slots), layout);
  std::vector<CMatX> covs(static_cast<std::size_t>(sc.num_slots),
                          sc.p_max_w / sc.num_tx * CMatX::Identity(sc.num_tx, sc.num_tx));

  covs[2] *= 10.0;  // power budget blown
  CHECK_THROWS_WITH_AS(evaluate(sc, path, covs, layouts),
                       doctest::Contains("power budget"), std::invalid_argument);
  covs[2] /= 10.0;

  layouts[1].y(0) = -1.0;
  CHECK_THROWS_WITH_AS(evaluate(sc, path, covs, layouts),
                       doctest::Contains("antenna layout"), std::invalid_argument);
}

}  // TEST_SUITE
