#include "fasense/beamform.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace fasense {

double slot_weight(double rcs_mag2, double dist, double theta, const VecX& rx_positions,
                   double wavelength, int frames, double noise_w) {
  const double kappa = 2.0 * M_PI / wavelength * aod_cosine(theta);
  return rcs_mag2 * frames * kappa * kappa * aperture_term(rx_positions) /
         (2.0 * dist * dist * noise_w);
}

double beamform_objective(const std::vector<CVecX>& steering, const std::vector<double>& weights,
                          const CMatX& covariance) {
  double sum = 0.0;
  for (std::size_t k = 0; k < steering.size(); ++k) {
    sum += weights[k] * (steering[k].adjoint() * covariance * steering[k]).value().real();
  }
  return sum;
}

namespace {

/// First entry with magnitude above tolerance made real positive.
CVecX phase_normalize(CVecX u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i));
    if (mag > 1e-12) {
      u *= std::conj(u(i)) / mag;
      break;
    }
  }
  return u;
}

bool lex_real_greater(const CVecX& a, const CVecX& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() > b(i).real();
  }
  return false;
}

}  // namespace

BeamformResult optimize_beamforming_slot(const std::vector<CVecX>& steering,
                                         const std::vector<double>& weights,
                                         double power_budget) {
  if (steering.empty() || steering.size() != weights.size()) {
    throw std::invalid_argument("steering/weight count mismatch");
  }
  const Eigen::Index m = steering.front().size();
  for (const auto& a : steering) {
    if (a.size() != m) throw std::invalid_argument("steering vectors must share a length");
  }
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");
  }

  BeamformResult out;
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (weight_sum == 0.0) {
    out.covariance = power_budget / static_cast<double>(m) * CMatX::Identity(m, m);
    out.objective = 0.0;
    out.degenerate = true;
    return out;
  }

  CMatX mat = CMatX::Zero(m, m);
  for (std::size_t k = 0; k < steering.size(); ++k) {
    if (weights[k] > 0.0) mat += weights[k] * (steering[k] * steering[k].adjoint());
  }
  Eigen::SelfAdjointEigenSolver<CMatX> eig(mat);
  const VecX evals = eig.eigenvalues();
  const double top = evals(m - 1);

  // Deterministic pick among (near-)tied top eigenvalues.
  CVecX u = phase_normalize(eig.eigenvectors().col(m - 1));
  for (Eigen::Index i = m - 2; i >= 0 && evals(i) >= top - 1e-12 * std::abs(top); --i) {
    CVecX cand = phase_normalize(eig.eigenvectors().col(i));
    if (lex_real_greater(cand, u)) u = cand;
  }
  u.normalize();

  out.covariance = power_budget * (u * u.adjoint());
  // Exact Hermitian symmetry regardless of rounding in the outer product.
  out.covariance = 0.5 * (out.covariance + out.covariance.adjoint().eval());
  out.objective = power_budget * top;
  return out;
}

double beampattern_gain(const CMatX& covariance, const VecX& tx_positions, double theta,
                        double wavelength) {
  const CVecX a = steering_vector(tx_positions, theta, wavelength);
  return (a.adjoint() * covariance * a).value().real();
}

}  // namespace fasense
