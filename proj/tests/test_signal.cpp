#include <doctest.h>

#include <Eigen/SVD>

#include "fasense/signal.hpp"

using namespace fasense;

TEST_SUITE("signal") {

TEST_CASE("zero covariance gives a zero block") {
  RngStream rng(1);
  const CMatX x = sample_waveform(CMatX::Zero(4, 4), 32, rng);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("waveform sampling is seed-deterministic") {
  const CMatX r = CMatX::Identity(3, 3);
  RngStream a(7);
  RngStream b(7);
  const CMatX xa = sample_waveform(r, 16, a);
  const CMatX xb = sample_waveform(r, 16, b);
  CHECK((xa - xb).norm() == 0.0);
}

TEST_CASE("non-PSD covariance is rejected") {
  CMatX r = CMatX::Identity(3, 3);
  r(2, 2) = -1.0;
  RngStream rng(2);
  CHECK_THROWS_AS(sample_waveform(r, 8, rng), std::invalid_argument);
}

TEST_CASE("sample covariance of an identity process approaches identity") {
  const int m = 4;
  RngStream rng(3);
  const CMatX x = sample_waveform(CMatX::Identity(m, m), 20'000, rng);
  const CMatX sc = sample_covariance(x);
  CHECK((sc - CMatX::Identity(m, m)).norm() / std::sqrt(static_cast<double>(m)) < 0.05);
}

TEST_CASE("sample covariance basics") {
  CMatX single(3, 1);
  single << std::complex<double>(1, 2), std::complex<double>(0, -1), std::complex<double>(2, 0);
  const CMatX outer = sample_covariance(single);
  CHECK((outer - single * single.adjoint()).norm() == doctest::Approx(0.0));

  CHECK(sample_covariance(CMatX::Zero(3, 5)).norm() == 0.0);
}

TEST_CASE("sample covariance is Hermitian PSD") {
  RngStream rng(4);
  CMatX x(4, 50);
  for (int c = 0; c < 50; ++c) {
    for (int r = 0; r < 4; ++r) x(r, c) = rng.complex_normal();
  }
  const CMatX sc = sample_covariance(x);
  CHECK((sc - sc.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<CMatX> eig(sc, Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * sc.real().trace());
}

TEST_CASE("estimation error shrinks as the frame count grows") {
  const int m = 4;
  CMatX r = CMatX::Zero(m, m);
  for (int i = 0; i < m; ++i) r(i, i) = 1.0 + 0.2 * i;
  r(0, 1) = std::complex<double>(0.3, 0.1);
  r(1, 0) = std::conj(r(0, 1));

  double err_small = 0.0;
  double err_large = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng_small = RngStream(seed).derive({stream_tag::kWaveform, 0});
    RngStream rng_large = RngStream(seed).derive({stream_tag::kWaveform, 1});
    err_small += (sample_covariance(sample_waveform(r, 100, rng_small)) - r).norm();
    err_large += (sample_covariance(sample_waveform(r, 10'000, rng_large)) - r).norm();
  }
  CHECK(err_large < err_small);
}

TEST_CASE("response matrix") {
  const CVecX a = CVecX::Ones(3);
  const CVecX b = CVecX::Ones(4);
  const CMatX w = response_matrix({1.0, 0.0}, 0.5, b, a);
  CHECK(w.rows() == 4);
  CHECK(w.cols() == 3);
  CHECK((w - CMatX::Ones(4, 3)).norm() == doctest::Approx(0.0));

  // always rank one
  RngStream rng(5);
  CVecX ar(5), br(6);
  for (int i = 0; i < 5; ++i) ar(i) = rng.complex_normal();
  for (int i = 0; i < 6; ++i) br(i) = rng.complex_normal();
  const CMatX wr = response_matrix({0.7, 0.4}, 120.0, br, ar);
  Eigen::JacobiSVD<CMatX> svd(wr);
  CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));

  // halving with distance
  const CMatX w2 = response_matrix({0.7, 0.4}, 240.0, br, ar);
  CHECK((w2 * 2.0 - wr).norm() < 1e-12 * wr.norm());
}

TEST_CASE("echo with zero noise is the clean product") {
  RngStream rng(6);
  const CMatX r = CMatX::Identity(3, 3);
  const CMatX x = sample_waveform(r, 10, rng);
  const CMatX w = response_matrix({1.0, 0.0}, 100.0, CVecX::Ones(4), CVecX::Ones(3));
  RngStream noise_rng(7);
  const CMatX y = simulate_echo(w, x, 0.0, noise_rng);
  CHECK((y - w * x).norm() == 0.0);
}

TEST_CASE("pure-noise echo has the configured per-entry variance") {
  const int m_r = 10;
  const int frames = 10'000;  // 1e5 samples total
  const double noise_w = 2.5e-13;
  const CMatX w = CMatX::Zero(m_r, 3);
  const CMatX x = CMatX::Zero(3, frames);
  RngStream rng(8);
  const CMatX y = simulate_echo(w, x, noise_w, rng);
  const double measured = y.squaredNorm() / (m_r * frames);
  CHECK(measured == doctest::Approx(noise_w).epsilon(0.05));
}

TEST_CASE("echo is seed-deterministic") {
  const CMatX w = response_matrix({1.0, 0.0}, 50.0, CVecX::Ones(2), CVecX::Ones(2));
  const CMatX x = CMatX::Ones(2, 5);
  RngStream a(9);
  RngStream b(9);
  CHECK((simulate_echo(w, x, 1e-12, a) - simulate_echo(w, x, 1e-12, b)).norm() == 0.0);
}

}  // TEST_SUITE
