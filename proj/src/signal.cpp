#include "fasense/signal.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace fasense {

CMatX sample_waveform(const CMatX& covariance, int frames, RngStream& rng) {
  const Eigen::Index m = covariance.rows();
  if (covariance.cols() != m) throw std::invalid_argument("covariance must be square");
  const double herm_gap = (covariance - covariance.adjoint()).cwiseAbs().maxCoeff();
  const double trace = covariance.real().trace();
  if (herm_gap > 1e-10 * std::max(1.0, trace)) {
    throw std::invalid_argument("covariance is not Hermitian within tolerance");
  }

  Eigen::SelfAdjointEigenSolver<CMatX> eig(covariance);
  const VecX evals = eig.eigenvalues();
  if (trace > 0 && evals.minCoeff() < -1e-10 * trace) {
    throw std::invalid_argument("covariance is not positive semidefinite within tolerance");
  }
  VecX sqrt_evals(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    // Tiny negative eigenvalues from the rank-1 optimizer output flush to 0.
    sqrt_evals(i) = evals(i) > 1e-12 * trace ? std::sqrt(evals(i)) : 0.0;
  }
  const CMatX root = eig.eigenvectors() * sqrt_evals.asDiagonal() * eig.eigenvectors().adjoint();

  CMatX z(m, frames);
  for (int c = 0; c < frames; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) z(r, c) = rng.complex_normal();
  }
  return root * z;
}

CMatX sample_covariance(const CMatX& frames) {
  if (frames.cols() < 1) throw std::invalid_argument("need at least one frame");
  return (frames * frames.adjoint()) / static_cast<double>(frames.cols());
}

CMatX response_matrix(std::complex<double> alpha, double dist, const CVecX& rx_steering,
                      const CVecX& tx_steering) {
  if (dist <= 0) throw std::invalid_argument("distance must be positive");
  return (alpha / (2.0 * dist)) * (rx_steering * tx_steering.adjoint());
}

CMatX simulate_echo(const CMatX& response, const CMatX& frames, double noise_w, RngStream& rng) {
  if (response.cols() != frames.rows()) {
    throw std::invalid_argument("response/frames dimension mismatch");
  }
  CMatX out = response * frames;
  const double sigma = std::sqrt(noise_w);
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += sigma * rng.complex_normal();
  }
  return out;
}

}  // namespace fasense
