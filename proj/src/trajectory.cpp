#include "fasense/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace fasense {

Path straight_line_path(const Vec2& from, const Vec2& to, int slots) {
  Path p;
  p.q.reserve(static_cast<std::size_t>(slots));
  for (int i = 0; i < slots; ++i) {
    const double t = slots > 1 ? static_cast<double>(i) / (slots - 1) : 0.0;
    p.q.push_back(from + t * (to - from));
  }
  return p;
}

bool path_feasible(const Path& path, const PathConstraints& c, double tol) {
  if (path.q.size() < 2) return false;
  if ((path.q.front() - c.q_init).norm() > tol) return false;
  if ((path.q.back() - c.q_final).norm() > tol) return false;
  for (std::size_t i = 1; i < path.q.size(); ++i) {
    if ((path.q[i] - path.q[i - 1]).norm() > c.step_max + tol) return false;
  }
  return true;
}

Path project_path(Path raw, const PathConstraints& c) {
  const int n = static_cast<int>(raw.q.size());
  if (n < 2) throw std::invalid_argument("path needs at least two slots");
  if ((c.q_final - c.q_init).norm() > (n - 1) * c.step_max + 1e-9) {
    throw std::runtime_error("endpoints unreachable");
  }
  raw.q.front() = c.q_init;
  raw.q.back() = c.q_final;

  auto worst_violation = [&](const Path& p) {
    double excess = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      excess = std::max(excess, (p.q[static_cast<std::size_t>(i) + 1] -
                                 p.q[static_cast<std::size_t>(i)])
                                        .norm() -
                                    c.step_max);
    }
    return excess;
  };
  if (worst_violation(raw) <= 0.0) return raw;

  double prev_residual = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < 500; ++sweep) {
    for (int i = 0; i + 1 < n; ++i) {
      Vec2& p = raw.q[static_cast<std::size_t>(i)];
      Vec2& q = raw.q[static_cast<std::size_t>(i) + 1];
      const Vec2 d = q - p;
      const double len = d.norm();
      if (len <= c.step_max) continue;
      const Vec2 unit = d / len;
      const bool p_fixed = i == 0;
      const bool q_fixed = i + 1 == n - 1;
      if (p_fixed && q_fixed) continue;  // n == 2, feasible by the reach check
      if (p_fixed) {
        q = p + unit * c.step_max;
      } else if (q_fixed) {
        p = q - unit * c.step_max;
      } else {
        const double half = 0.5 * (len - c.step_max);
        p += unit * half;
        q -= unit * half;
      }
    }
    const double residual = worst_violation(raw);
    if (residual < 1e-9) break;
    if (residual > 0.99 * prev_residual) break;  // stalled; the blend closes the rest
    prev_residual = residual;
  }

  // The sweeps converge slowly when the whole chain is taut. Guarantee hard
  // feasibility by blending toward the chord (always feasible thanks to the
  // reach check) with the smallest factor that fits every step.
  if (worst_violation(raw) > 0.0) {
    const Path chord = straight_line_path(c.q_init, c.q_final, n);
    auto blended = [&](double lambda) {
      Path p = raw;
      for (int i = 0; i < n; ++i) {
        p.q[static_cast<std::size_t>(i)] =
            (1.0 - lambda) * raw.q[static_cast<std::size_t>(i)] +
            lambda * chord.q[static_cast<std::size_t>(i)];
      }
      p.q.front() = c.q_init;
      p.q.back() = c.q_final;
      return p;
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (worst_violation(blended(mid)) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    raw = blended(hi);
    if (worst_violation(raw) > 0.0) raw = chord;  // hi rounded onto the infeasible side
  }
  return raw;
}

FrozenSteering freeze_steering(const Path& prev, const Scenario& sc,
                               const std::vector<ArrayLayout>& layouts) {
  FrozenSteering f;
  const int n = sc.num_slots;
  const int k = sc.num_targets;
  f.theta.resize(n, k);
  f.a.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    f.a[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      const double theta = vertical_aod(prev.q[static_cast<std::size_t>(i)], sc.targets[j],
                                        sc.altitude);
      f.theta(i, j) = theta;
      f.a[static_cast<std::size_t>(i)].push_back(
          steering_vector(layouts[static_cast<std::size_t>(i)].x, theta, sc.wavelength));
    }
  }
  return f;
}

Eigen::MatrixXd trajectory_weights(const FrozenSteering& frozen,
                                   const std::vector<CMatX>& covariances,
                                   const std::vector<ArrayLayout>& layouts, const Scenario& sc) {
  const int n = sc.num_slots;
  const int k = sc.num_targets;
  Eigen::MatrixXd w(n, k);
  for (int i = 0; i < n; ++i) {
    const double ap = aperture_term(layouts[static_cast<std::size_t>(i)].y);
    for (int j = 0; j < k; ++j) {
      const CVecX& a = frozen.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double kappa = 2.0 * M_PI / sc.wavelength * aod_cosine(frozen.theta(i, j));
      const double lambda_term =
          kappa * kappa *
          (a.adjoint() * covariances[static_cast<std::size_t>(i)] * a).value().real();
      const double omega_term = std::norm(sc.rcs[static_cast<std::size_t>(j)]) *
                                sc.frames_per_slot * ap;
      w(i, j) = lambda_term * omega_term / (2.0 * sc.noise_w);
    }
  }
  return w;
}

double inverse_sq_dist(const Vec2& q, const Vec2& target, double altitude) {
  return 1.0 / ((q - target).squaredNorm() + altitude * altitude);
}

double surrogate_lower_bound(const Vec2& q, const Vec2& q0, const Vec2& target, double altitude) {
  const double f0 = inverse_sq_dist(q0, target, altitude);
  const double delta = (q - target).squaredNorm() - (q0 - target).squaredNorm();
  return f0 - delta * f0 * f0;
}

double trajectory_objective(const Path& path, const Eigen::MatrixXd& weights,
                            const std::vector<Vec2>& targets, double altitude) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      sum += weights(i, j) *
             inverse_sq_dist(path.q[static_cast<std::size_t>(i)],
                             targets[static_cast<std::size_t>(j)], altitude);
    }
  }
  return sum;
}

namespace {

double surrogate_total(const Path& path, const Path& anchor, const Eigen::MatrixXd& weights,
                       const std::vector<Vec2>& targets, double altitude) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
      sum += weights(i, j) *
             surrogate_lower_bound(path.q[static_cast<std::size_t>(i)],
                                   anchor.q[static_cast<std::size_t>(i)],
                                   targets[static_cast<std::size_t>(j)], altitude);
    }
  }
  return sum;
}

}  // namespace

Path optimize_trajectory(const Path& prev, const Eigen::MatrixXd& weights, const Scenario& sc) {
  const PathConstraints cons = path_constraints(sc);
  if (!path_feasible(prev, cons)) throw std::invalid_argument("previous path infeasible");
  if (weights.maxCoeff() <= 0.0) return prev;  // flat objective

  const int n = sc.num_slots;
  const int k = sc.num_targets;

  // Surrogate coefficients at the anchor (the incoming path). The surrogate
  // is an exactly quadratic concave function with per-slot curvature l(i).
  Eigen::MatrixXd f0(n, k);
  VecX curvature(n);
  for (int i = 0; i < n; ++i) {
    double l = 0.0;
    for (int j = 0; j < k; ++j) {
      f0(i, j) = inverse_sq_dist(prev.q[static_cast<std::size_t>(i)], sc.targets[j], sc.altitude);
      l += 2.0 * weights(i, j) * f0(i, j) * f0(i, j);
    }
    curvature(i) = l;
  }
  const double step0 = 1.0 / curvature.maxCoeff();

  auto gradient = [&](const Path& path) {
    std::vector<Vec2> g(static_cast<std::size_t>(n), Vec2::Zero());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) {
        g[static_cast<std::size_t>(i)] -= 2.0 * weights(i, j) * f0(i, j) * f0(i, j) *
                                          (path.q[static_cast<std::size_t>(i)] - sc.targets[j]);
      }
    }
    return g;
  };
  auto advanced = [&](const Path& path, const std::vector<Vec2>& g, double t) {
    Path out = path;
    for (int i = 0; i < n; ++i) {
      out.q[static_cast<std::size_t>(i)] += t * g[static_cast<std::size_t>(i)];
    }
    return project_path(std::move(out), cons);
  };
  auto sq_dist = [&](const Path& a, const Path& b) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += (a.q[static_cast<std::size_t>(i)] - b.q[static_cast<std::size_t>(i)]).squaredNorm();
    }
    return s;
  };

  constexpr double kArmijoC = 1e-4;
  constexpr double kBacktrack = 0.5;
  constexpr double kGradMapTol = 1e-6;
  constexpr int kMaxIters = 200;

  Path cur = prev;
  double cur_val = surrogate_total(cur, prev, weights, sc.targets, sc.altitude);
  for (int iter = 0; iter < kMaxIters; ++iter) {
    const std::vector<Vec2> g = gradient(cur);
    Path cand = advanced(cur, g, step0);
    const double move_sq = sq_dist(cand, cur);
    if (std::sqrt(move_sq) / step0 < kGradMapTol) break;

    double t = step0;
    double cand_val = surrogate_total(cand, prev, weights, sc.targets, sc.altitude);
    bool accepted = cand_val >= cur_val + kArmijoC / t * move_sq;
    while (!accepted && t > step0 * 1e-20) {
      t *= kBacktrack;
      cand = advanced(cur, g, t);
      cand_val = surrogate_total(cand, prev, weights, sc.targets, sc.altitude);
      accepted = cand_val >= cur_val + kArmijoC / t * sq_dist(cand, cur);
    }
    if (!accepted) break;
    cur = std::move(cand);
    cur_val = cand_val;
  }

  // The surrogate is tight at the anchor and a global lower bound, so the
  // frozen objective cannot have decreased; keep the anchor if rounding says
  // otherwise.
  const double before = trajectory_objective(prev, weights, sc.targets, sc.altitude);
  const double after = trajectory_objective(cur, weights, sc.targets, sc.altitude);
  return after >= before ? cur : prev;
}

}  // namespace fasense
