#pragma once

#include <complex>
#include <vector>

#include "fasense/geometry.hpp"

namespace fasense {

/// Per-target coefficient c_k [rad^-2 W^-1] such that the reciprocal reduced
/// CRB equals c_k * a_k^H R a_k for the slot's frozen geometry.
double slot_weight(double rcs_mag2, double dist, double theta, const VecX& rx_positions,
                   double wavelength, int frames, double noise_w);

struct BeamformResult {
  CMatX covariance;        // Hermitian PSD, trace = budget (unless degenerate)
  double objective = 0.0;  // sum_k c_k a_k^H R a_k at the optimum
  // All weights were zero: the objective is flat, any feasible covariance is
  // optimal, and uniform power over the elements is returned.
  bool degenerate = false;
};

/// sum_k weights[k] * a_k^H R a_k.
double beamform_objective(const std::vector<CVecX>& steering, const std::vector<double>& weights,
                          const CMatX& covariance);

/// Maximizes sum_k c_k a_k^H R a_k over tr(R) <= budget, R >= 0. The
/// objective is linear in R, so the maximum sits at a rank-1 extreme point
/// budget * u u^H with u the top eigenvector of M = sum_k c_k a_k a_k^H; no
/// general-purpose solver is needed. Eigenvalue ties are broken toward the
/// phase-normalized eigenvector with the lexicographically largest real part.
BeamformResult optimize_beamforming_slot(const std::vector<CVecX>& steering,
                                         const std::vector<double>& weights, double power_budget);

/// Transmit power density toward an angle: a(theta)^H R a(theta) [W].
double beampattern_gain(const CMatX& covariance, const VecX& tx_positions, double theta,
                        double wavelength);

}  // namespace fasense
