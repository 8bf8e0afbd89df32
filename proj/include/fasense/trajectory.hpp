#pragma once

#include <vector>

#include "fasense/array_layout.hpp"
#include "fasense/geometry.hpp"
#include "fasense/scenario.hpp"

namespace fasense {

/// Horizontal UAV positions, one per slot, at fixed altitude.
struct Path {
  std::vector<Vec2> q;
};

/// Endpoint and per-step reach constraints a path must satisfy.
struct PathConstraints {
  Vec2 q_init;
  Vec2 q_final;
  double step_max = 0.0;  // v_max * tau [m]
};

inline PathConstraints path_constraints(const Scenario& sc) {
  return {sc.q_init, sc.q_final, sc.v_max * sc.slot_duration};
}

Path straight_line_path(const Vec2& from, const Vec2& to, int slots);

/// Endpoints exact, every step within step_max + tol.
bool path_feasible(const Path& path, const PathConstraints& c, double tol = 1e-6);

/// Restores feasibility: clamps the endpoints, then cyclically projects
/// interior points onto the per-step reach balls until the largest violation
/// is below 1e-9 (at most 500 sweeps). Throws if the endpoints themselves are
/// out of reach.
Path project_path(Path raw, const PathConstraints& c);

/// Steering state held fixed while the trajectory moves: the angle of
/// departure at the previous path and the transmit steering built from it.
struct FrozenSteering {
  Eigen::MatrixXd theta;                 // N x K [rad]
  std::vector<std::vector<CVecX>> a;     // [slot][target]
};

FrozenSteering freeze_steering(const Path& prev, const Scenario& sc,
                               const std::vector<ArrayLayout>& layouts);

/// Nonnegative weights w(n,k) such that the frozen-steering reciprocal CRB of
/// target k at slot n equals w / (|q[n]-q_k|^2 + H^2).
Eigen::MatrixXd trajectory_weights(const FrozenSteering& frozen,
                                   const std::vector<CMatX>& covariances,
                                   const std::vector<ArrayLayout>& layouts, const Scenario& sc);

/// The frozen-steering objective sum(n,k) w / (|q[n]-q_k|^2 + H^2).
double trajectory_objective(const Path& path, const Eigen::MatrixXd& weights,
                            const std::vector<Vec2>& targets, double altitude);

/// 1 / (|q - target|^2 + H^2), the per-term objective factor.
double inverse_sq_dist(const Vec2& q, const Vec2& target, double altitude);

/// Concave quadratic global lower bound of inverse_sq_dist, tight at q0:
/// f(q0) - (|q-t|^2 - |q0-t|^2) f(q0)^2.
double surrogate_lower_bound(const Vec2& q, const Vec2& q0, const Vec2& target, double altitude);

/// Maximizes the concave surrogate of the frozen-steering objective over the
/// feasible path set by projected gradient ascent with Armijo backtracking.
/// The returned path is feasible and never scores below `prev` on the frozen
/// objective.
Path optimize_trajectory(const Path& prev, const Eigen::MatrixXd& weights, const Scenario& sc);

}  // namespace fasense
