#pragma once

#include <vector>

#include "fasense/array_layout.hpp"
#include "fasense/geometry.hpp"
#include "fasense/rng.hpp"
#include "fasense/scenario.hpp"

namespace fasense {

/**
 * Frozen per-slot state for the antenna-position search: the UAV position,
 * transmit covariance, and per-target geometry are fixed; only the element
 * coordinates move.
 */
struct SlotContext {
  std::vector<double> theta;      // per-target AoD [rad]
  std::vector<double> dist;       // per-target slant distance [m]
  std::vector<double> sin_coeff;  // 2 pi / lambda * sin(theta_k), steering phase slope [rad/m]
  std::vector<double> gain_coeff; // |alpha|^2 N kappa^2 / (2 d^2 sigma^2) [rad^-2 W^-1 m^-2]
  CMatX covariance;               // R for this slot [W]
  CMatX cov_factor;               // F with F F^H = R (low-rank), for fast quadratic forms
  double aperture = 0.0;          // D [m]
  double min_spacing = 0.0;       // D_min [m]
  int num_tx = 0;
  int num_rx = 0;
  VecX frozen_rx;                 // fixed receive coordinates (transmit-only search) or empty
};

/// Builds the frozen context from the live slot state. Pass `frozen_rx` to
/// search transmit coordinates only.
SlotContext make_slot_context(const Scenario& sc, const Vec2& uav, const CMatX& covariance,
                              const VecX& frozen_rx = VecX());

/// Length of the particle coordinate vector (transmit block, plus receive
/// block unless the receive array is frozen).
int particle_dimension(const SlotContext& ctx);

/// Counts constraint violations over each sub-array independently:
/// coordinates outside [0, aperture] plus adjacent sorted pairs closer than
/// min_spacing - kSpacingTol. `m_rx` may be zero (transmit-only particles).
int violation_count(const VecX& coords, int m_tx, int m_rx, double aperture, double min_spacing);

/// Mean reciprocal CRB over targets at the candidate coordinates, minus
/// penalty * violation_count. Steering vectors are rebuilt from the
/// candidate transmit block; the aperture term comes from the receive block
/// (or the frozen receive array).
double slot_fitness(const VecX& coords, const SlotContext& ctx, double penalty);

/// Linearly decaying inertia weight.
double inertia_weight(int t, int t_max, double omega_max, double omega_min);

/// omega * v + c1 r1 (pbest - p) + c2 r2 (pglobal - p), with scalar uniform
/// draws r1, r2 per update and a +-aperture per-coordinate clamp.
VecX step_velocity(const VecX& position, const VecX& velocity, const VecX& personal_best,
                   const VecX& global_best, double omega, double c1, double c2, double aperture,
                   RngStream& rng);

/// p + v clamped coordinate-wise into [0, aperture], each sub-array sorted
/// ascending.
VecX step_position(const VecX& position, const VecX& velocity, int m_tx, int m_rx,
                   double aperture);

/// Uniform sample from the feasible coordinate polytope
/// {0 <= c_1, c_i + min_spacing <= c_{i+1}, c_m <= aperture}.
VecX sample_feasible_coords(int count, double aperture, double min_spacing, RngStream& rng);

struct PsoOutcome {
  ArrayLayout layout;                    // feasible by construction
  double fitness = 0.0;                  // fitness of the returned layout
  std::vector<double> best_fitness_trace;  // global best per iteration (index 0 = initial)
};

/// Penalty particle swarm over antenna coordinates for one slot. The swarm
/// starts from the warm layout, a max-spread layout, and uniformly drawn
/// feasible layouts; only zero-violation positions can become the global
/// best, so the returned layout is always feasible.
PsoOutcome optimize_positions_slot(const SlotContext& ctx, const PsoConfig& cfg,
                                   const ArrayLayout& warm, RngStream rng);

}  // namespace fasense
