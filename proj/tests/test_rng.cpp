#include <doctest.h>

#include <cmath>

#include "fasense/rng.hpp"

using namespace fasense;

TEST_SUITE("rng") {

TEST_CASE("same seed gives the same sequence") {
  RngStream a(123);
  RngStream b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derivation is keyed by path, not consumption") {
  RngStream root(5);
  root.uniform01();  // consuming the parent must not shift derived streams
  RngStream d1 = root.derive({1, 2});
  RngStream d2 = RngStream(5).derive({1, 2});
  for (int i = 0; i < 20; ++i) CHECK(d1.next_u64() == d2.next_u64());

  RngStream other = root.derive({1, 3});
  CHECK(RngStream(5).derive({1, 2}).next_u64() != other.next_u64());
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
  RngStream rng(9);
  for (int i = 0; i < 10'000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments are sane") {
  RngStream rng(11);
  const int n = 200'000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("complex normal has unit second moment") {
  RngStream rng(13);
  const int n = 100'000;
  double power = 0.0;
  for (int i = 0; i < n; ++i) power += std::norm(rng.complex_normal());
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE
