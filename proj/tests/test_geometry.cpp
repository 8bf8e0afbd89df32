#include <doctest.h>

#include <cmath>

#include "fasense/geometry.hpp"
#include "fasense/pso.hpp"
#include "fasense/rng.hpp"

using namespace fasense;

namespace {
constexpr double kLambda = 0.0107;
}

TEST_SUITE("geometry") {

TEST_CASE("slant distance") {
  CHECK(slant_distance({10, 20}, {10, 20}, 100.0) == doctest::Approx(100.0));
  CHECK(slant_distance({100, 0}, {0, 0}, 100.0) == doctest::Approx(100.0 * std::sqrt(2.0)));
  CHECK(slant_distance({300, 0}, {0, 0}, 400.0) == doctest::Approx(500.0));
}

TEST_CASE("vertical angle of departure") {
  CHECK(vertical_aod({5, 5}, {5, 5}, 100.0) == doctest::Approx(M_PI / 2));
  CHECK(vertical_aod({100, 0}, {0, 0}, 100.0) == doctest::Approx(M_PI / 4));
  CHECK(vertical_aod({100.0 * std::sqrt(3.0), 0}, {0, 0}, 100.0) == doctest::Approx(M_PI / 6));
}

TEST_CASE("aod increases as the horizontal distance shrinks") {
  double prev = 0.0;
  for (double h = 500.0; h >= 0.0; h -= 50.0) {
    const double theta = vertical_aod({h, 0}, {0, 0}, 120.0);
    CHECK(theta > prev);
    prev = theta;
  }
  CHECK(prev == doctest::Approx(M_PI / 2));
}

TEST_CASE("steering vector basics") {
  const VecX zeros = VecX::Zero(5);
  const CVecX ones = steering_vector(zeros, 0.7, kLambda);
  for (int i = 0; i < 5; ++i) CHECK(ones(i) == std::complex<double>(1.0, 0.0));

  VecX half(1);
  half << kLambda / 2;
  const CVecX v = steering_vector(half, M_PI / 2, kLambda);
  CHECK(v(0).real() == doctest::Approx(-1.0));
  CHECK(v(0).imag() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("steering entries are unit modulus") {
  RngStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX pos = sample_feasible_coords(8, 20 * kLambda, 0.5 * kLambda, rng);
    const CVecX v = steering_vector(pos, rng.uniform(0.01, M_PI / 2), kLambda);
    for (int i = 0; i < v.size(); ++i) CHECK(std::abs(v(i)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("translating the array multiplies by a common phase") {
  RngStream rng(4);
  const VecX pos = sample_feasible_coords(6, 20 * kLambda, 0.5 * kLambda, rng);
  const double theta = 0.9;
  const double shift = 3.2 * kLambda;
  const CVecX base = steering_vector(pos, theta, kLambda);
  const CVecX moved = steering_vector(pos.array() + shift, theta, kLambda);
  const std::complex<double> phase = std::polar(1.0, 2 * M_PI / kLambda * shift * std::sin(theta));
  for (int i = 0; i < base.size(); ++i) {
    CHECK(std::abs(moved(i) - phase * base(i)) < 1e-12);
  }
}

TEST_CASE("steering derivative vanishes overhead and at the origin") {
  VecX pos(3);
  pos << 0.0, kLambda, 2 * kLambda;
  const CVecX overhead = steering_derivative(pos, M_PI / 2, kLambda);
  CHECK(overhead.norm() == 0.0);  // exactly zero by the cosine flush

  const CVecX at_origin = steering_derivative(VecX::Zero(4), 0.8, kLambda);
  CHECK(at_origin.norm() == 0.0);
}

TEST_CASE("steering derivative matches central finite differences") {
  RngStream rng(5);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform(0.0, 10.999));
    const VecX pos = sample_feasible_coords(m, 20 * kLambda, 0.5 * kLambda, rng);
    const double theta = rng.uniform(0.05, M_PI / 2 - 0.05);
    const CVecX analytic = steering_derivative(pos, theta, kLambda);
    const CVecX fd =
        (steering_vector(pos, theta + h, kLambda) - steering_vector(pos, theta - h, kLambda)) /
        (2 * h);
    worst = std::max(worst, (analytic - fd).norm() / analytic.norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("aperture term") {
  VecX equal = VecX::Constant(6, 1.3);
  CHECK(aperture_term(equal) == doctest::Approx(0.0));

  const int m = 12;
  const double s = kLambda / 2;
  VecX uniform(m);
  for (int i = 0; i < m; ++i) uniform(i) = i * s;
  CHECK(aperture_term(uniform) ==
        doctest::Approx(s * s * m * (m * m - 1) / 12.0).epsilon(1e-12));

  const VecX shifted = uniform.array() + 4.2;
  CHECK(aperture_term(shifted) == doctest::Approx(aperture_term(uniform)).epsilon(1e-9));

  RngStream rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    VecX pos(5);
    for (int i = 0; i < 5; ++i) pos(i) = rng.uniform(-1.0, 1.0);
    CHECK(aperture_term(pos) >= 0.0);
  }
}

TEST_CASE("steering context bundles consistent values") {
  VecX tx(3), rx(4);
  tx << 0.0, kLambda, 3 * kLambda;
  rx << 0.0, kLambda, 2 * kLambda, 4 * kLambda;
  const SteeringContext ctx = make_steering_context({50, 60}, {80, 100}, 100.0, tx, rx, kLambda);
  CHECK(ctx.dist == doctest::Approx(slant_distance({50, 60}, {80, 100}, 100.0)));
  CHECK(ctx.theta == doctest::Approx(vertical_aod({50, 60}, {80, 100}, 100.0)));
  CHECK(ctx.a.size() == 3);
  CHECK(ctx.b.size() == 4);
  CHECK((ctx.a - steering_vector(tx, ctx.theta, kLambda)).norm() == 0.0);
  CHECK((ctx.b_dot - steering_derivative(rx, ctx.theta, kLambda)).norm() == 0.0);
}

}  // TEST_SUITE
