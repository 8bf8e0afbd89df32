#pragma once

#include <complex>
#include <vector>

#include "fasense/array_layout.hpp"
#include "fasense/geometry.hpp"
#include "fasense/scenario.hpp"

namespace fasense {

struct Path;  // trajectory.hpp

/// Denominators at or below this absolute threshold (SI units) mean the
/// angle is unidentifiable: the CRB is +inf and its reciprocal contributes 0.
inline constexpr double kSingularDenomTol = 1e-30;

/// The four waveform-covariance traces the angle CRB is built from.
/// psi_psi and dpsi_dpsi are real for Hermitian R.
struct TraceTerms {
  double psi_psi = 0.0;                     // tr(Psi^H Psi R)
  std::complex<double> dpsi_psi;            // tr(dPsi^H Psi R)
  double dpsi_dpsi = 0.0;                   // tr(dPsi^H dPsi R)
  double dpsi_psi_abs2 = 0.0;               // |tr(dPsi^H Psi R)|^2
};

/// Direct path: forms Psi = b a^H and dPsi = b_dot a^H + b a_dot^H and takes
/// matrix traces.
TraceTerms trace_terms_direct(const SteeringContext& ctx, const CMatX& covariance);

/// Closed-form path: unit-modulus steering entries collapse the traces to
/// quadratic forms in a, a_dot plus receive-coordinate moments.
TraceTerms trace_terms_closed(const SteeringContext& ctx, const VecX& rx_positions,
                              double wavelength, const CMatX& covariance);

/// Largest relative component discrepancy between two trace computations.
double trace_terms_gap(const TraceTerms& lhs, const TraceTerms& rhs);

/// Computes both paths, enforcing agreement to 1e-8 relative (throws on
/// disagreement, which would be an internal inconsistency). Returns the
/// direct-path values.
TraceTerms trace_identities(const SteeringContext& ctx, const VecX& rx_positions,
                            double wavelength, const CMatX& covariance);

/// Angle CRB [rad^2] in the full trace form. +inf when singular.
double crb_full(const SteeringContext& ctx, const CMatX& covariance, std::complex<double> alpha,
                double dist, int frames, double noise_w);

/// Angle CRB [rad^2] in the reduced closed form:
/// 2 d^2 sigma^2 / (|alpha|^2 N (2pi/lambda cos theta)^2 (a^H R a) * aperture(y)).
/// +inf when singular.
double crb_reduced(const CVecX& tx_steering, const VecX& rx_positions, double theta,
                   const CMatX& covariance, std::complex<double> alpha, double dist, int frames,
                   double noise_w, double wavelength);

/// 1/crb with 1/inf := 0.
inline double crb_reciprocal(double crb) {
  return std::isinf(crb) ? 0.0 : 1.0 / crb;
}

/// Per-mission CRB summary. Entries may be +inf; the average skips them and
/// reports how many were skipped. The optimizer itself always works on the
/// reciprocal objective, where singular entries contribute zero.
struct CrbReport {
  Eigen::MatrixXd per_slot_per_target;  // N x K [rad^2]
  double avg_crb = 0.0;                 // mean over finite entries [rad^2]
  int infinite_count = 0;
  double reciprocal_objective = 0.0;    // (1/(NK)) sum of reciprocals [rad^-2]
};

/// Sum over targets of the reciprocal reduced CRB for one slot. This is the
/// single code path behind the optimization objective, so the alternating
/// loop's stage gates and the final report round identically.
double slot_reciprocal_sum(const Scenario& sc, const Vec2& uav, const CMatX& covariance,
                           const ArrayLayout& layout);

/// Evaluates the reduced CRB for every (slot, target) and both objectives.
/// Throws naming the violated constraint if any per-slot input is infeasible.
CrbReport evaluate(const Scenario& sc, const Path& path, const std::vector<CMatX>& covariances,
                   const std::vector<ArrayLayout>& layouts);

}  // namespace fasense
