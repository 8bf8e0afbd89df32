#pragma once

#include <optional>
#include <vector>

#include "fasense/array_layout.hpp"
#include "fasense/crb.hpp"
#include "fasense/scenario.hpp"
#include "fasense/trajectory.hpp"

namespace fasense {

struct TracePoint {
  int iteration = 0;     // 0 = initial state
  double objective = 0;  // reciprocal-CRB objective [rad^-2]
  double avg_crb = 0;    // mean finite CRB [rad^2], reporting only
};

struct Solution {
  Path path;
  std::vector<CMatX> covariances;    // per slot
  std::vector<ArrayLayout> layouts;  // per slot
  CrbReport report;
  std::vector<TracePoint> trace;     // objective never decreases across entries
  int iterations_used = 0;
  bool converged = false;
};

/// Which blocks the per-slot antenna-position stage may move.
enum class LayoutMode { kOptimizeBoth, kOptimizeTransmitOnly, kFrozen };

/// Full starting state, e.g. the solution of a neighboring sweep cell.
struct WarmStart {
  Path path;
  std::vector<CMatX> covariances;
  std::vector<ArrayLayout> layouts;
};

struct AoOptions {
  LayoutMode layout_mode = LayoutMode::kOptimizeBoth;
  /// Starting layout; for kFrozen it stays fixed, for kOptimizeTransmitOnly
  /// its receive half stays fixed. Defaults to a half-wavelength array when
  /// it fits the aperture, else max spread.
  std::optional<ArrayLayout> initial_layout;
  /// Overrides the default initial state entirely (must be feasible).
  std::optional<WarmStart> warm_start;
  int threads = 0;  // 0 = hardware concurrency
};

/**
 * Alternating optimization: per iteration, the trajectory subproblem moves
 * the path with frozen steering, then each slot in turn solves the
 * beamforming subproblem and runs the antenna-position swarm. Every stage is
 * gated on the same fixed-order objective computation, so the recorded trace
 * is non-decreasing by construction and the loop stops when an iteration
 * gains less than epsilon (or at max_iterations).
 */
Solution run_ao(const Scenario& sc, const AoOptions& opts = {});

struct MonotoneCheck {
  bool pass = true;
  int first_violation = -1;  // iteration index of the first offending entry
};

/// Verifies objective(l+1) >= objective(l) - tol across the trace.
MonotoneCheck check_monotone(const std::vector<TracePoint>& trace, double tol);

/// Worst-case floating operation-count estimate for one full run:
/// l_max [(2N)^3.5 + (N Mt^2)^3.5] ln(1/eps) + N T_max P (Mt + Mr).
/// Reporting only. Throws if eps >= 1.
double complexity_estimate(const Scenario& sc);

/// Throws naming the first violated constraint (endpoints, velocity, power,
/// PSD, layout bounds/spacing) if the solution is infeasible.
void audit_solution(const Scenario& sc, const Solution& sol);

}  // namespace fasense
