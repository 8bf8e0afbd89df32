#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fasense/beamform.hpp"
#include "fasense/pso.hpp"
#include "fasense/rng.hpp"

namespace fasense {

/**
 * Independent brute-force certifiers for the analytic solvers. These are
 * ordinary library members so every frozen expected value in the tests can
 * be regenerated by users.
 */

/// Best objective over n_samples random feasible covariances (complex Gram
/// matrices rescaled to trace = power_budget). Certifies the analytic
/// beamforming solver from below.
double oracle_beamforming(const std::vector<CVecX>& steering, const std::vector<double>& weights,
                          double power_budget, int n_samples, RngStream& rng);

struct GridSearchResult {
  ArrayLayout layout;
  double fitness = 0.0;
  std::int64_t cells = 0;
};

/// Exhaustive feasible grid search over 2 transmit + 2 receive coordinates.
/// Rejects grids above 1e7 cells. Certifies the position swarm on small
/// instances.
GridSearchResult oracle_layout_grid(const SlotContext& ctx, double grid_step);

/// Worst relative discrepancy between the full trace-form CRB and the
/// reduced closed form over n_cases random feasible configurations.
///
/// Configurations draw rank-1 trace-bounded covariances, the shape the
/// beamforming stage always produces. That is exactly the regime where the
/// two forms coincide: for a general-rank covariance the trace form carries
/// an extra transmit-side information term (a^H R a * a_dot^H R a_dot -
/// |a^H R a_dot|^2 >= 0 by Cauchy-Schwarz, zero for rank 1), making it a
/// strictly smaller bound. See oracle_crb_order for that direction.
/// Near-singular cases are excluded: cos(theta) >= 0.05 and the beam is
/// required to actually illuminate the target (a^H R a above 1e-4 of its
/// maximum); both exclusions are part of the oracle's configuration.
double oracle_crb_equivalence(RngStream& rng, int n_cases);

/// Largest violation of full-form <= reduced-form over random *general-rank*
/// covariances, as a relative amount (negative means no violation observed).
double oracle_crb_order(RngStream& rng, int n_cases);

struct CertificateLine {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct CertificateReport {
  std::vector<CertificateLine> lines;
  bool all_pass = true;
};

/// Runs the full certificate suite (trace identities, CRB equivalence and
/// ordering, beamforming optimality, swarm vs. grid, steering derivative vs.
/// finite differences).
CertificateReport run_certificates(std::uint64_t seed);

}  // namespace fasense
