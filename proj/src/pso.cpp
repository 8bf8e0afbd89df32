#include "fasense/pso.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fasense {

SlotContext make_slot_context(const Scenario& sc, const Vec2& uav, const CMatX& covariance,
                              const VecX& frozen_rx) {
  SlotContext ctx;
  ctx.covariance = covariance;
  ctx.aperture = sc.aperture;
  ctx.min_spacing = sc.min_spacing;
  ctx.num_tx = sc.num_tx;
  ctx.num_rx = sc.num_rx;
  ctx.frozen_rx = frozen_rx;
  for (int k = 0; k < sc.num_targets; ++k) {
    const double theta = vertical_aod(uav, sc.targets[k], sc.altitude);
    const double dist = slant_distance(uav, sc.targets[k], sc.altitude);
    const double kappa = 2.0 * M_PI / sc.wavelength * aod_cosine(theta);
    ctx.theta.push_back(theta);
    ctx.dist.push_back(dist);
    ctx.sin_coeff.push_back(2.0 * M_PI / sc.wavelength * std::sin(theta));
    ctx.gain_coeff.push_back(std::norm(sc.rcs[k]) * sc.frames_per_slot * kappa * kappa /
                             (2.0 * dist * dist * sc.noise_w));
  }

  // Low-rank factor for fast a^H R a evaluation in the swarm inner loop.
  Eigen::SelfAdjointEigenSolver<CMatX> eig(covariance);
  const double trace = std::max(covariance.real().trace(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > 1e-14 * std::max(trace, 1e-300)) keep.push_back(i);
  }
  ctx.cov_factor.resize(covariance.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    ctx.cov_factor.col(static_cast<Eigen::Index>(c)) =
        eig.eigenvectors().col(keep[c]) * std::sqrt(eig.eigenvalues()(keep[c]));
  }
  return ctx;
}

int particle_dimension(const SlotContext& ctx) {
  return ctx.num_tx + (ctx.frozen_rx.size() > 0 ? 0 : ctx.num_rx);
}

namespace {

int sub_array_violations(const double* coords, int count, double aperture, double min_spacing) {
  int violations = 0;
  std::vector<double> sorted(coords, coords + count);
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < count; ++i) {
    if (sorted[static_cast<std::size_t>(i)] < 0.0 ||
        sorted[static_cast<std::size_t>(i)] > aperture) {
      ++violations;
    }
    if (i > 0 && sorted[static_cast<std::size_t>(i)] - sorted[static_cast<std::size_t>(i) - 1] <
                     min_spacing - kSpacingTol) {
      ++violations;
    }
  }
  return violations;
}

struct FitnessParts {
  double objective = 0.0;  // mean reciprocal CRB over targets [rad^-2]
  int violations = 0;
};

FitnessParts eval_candidate(const VecX& coords, const SlotContext& ctx) {
  const int m_tx = ctx.num_tx;
  const bool rx_frozen = ctx.frozen_rx.size() > 0;
  const int m_rx = rx_frozen ? 0 : ctx.num_rx;
  if (coords.size() != m_tx + m_rx) throw std::invalid_argument("particle dimension mismatch");

  FitnessParts parts;
  parts.violations = violation_count(coords, m_tx, m_rx, ctx.aperture, ctx.min_spacing);

  const double ap = rx_frozen ? aperture_term(ctx.frozen_rx)
                              : aperture_term(coords.tail(ctx.num_rx));
  const std::size_t targets = ctx.theta.size();
  CVecX a(m_tx);
  CVecX fa(ctx.cov_factor.cols());
  double sum = 0.0;
  for (std::size_t k = 0; k < targets; ++k) {
    const double slope = ctx.sin_coeff[k];
    for (int i = 0; i < m_tx; ++i) a(i) = std::polar(1.0, slope * coords(i));
    fa.noalias() = ctx.cov_factor.adjoint() * a;
    sum += ctx.gain_coeff[k] * fa.squaredNorm() * ap;
  }
  parts.objective = sum / static_cast<double>(targets);
  return parts;
}

}  // namespace

int violation_count(const VecX& coords, int m_tx, int m_rx, double aperture, double min_spacing) {
  if (coords.size() != m_tx + m_rx) throw std::invalid_argument("coordinate count mismatch");
  int v = sub_array_violations(coords.data(), m_tx, aperture, min_spacing);
  if (m_rx > 0) v += sub_array_violations(coords.data() + m_tx, m_rx, aperture, min_spacing);
  return v;
}

double slot_fitness(const VecX& coords, const SlotContext& ctx, double penalty) {
  const FitnessParts parts = eval_candidate(coords, ctx);
  return parts.objective - penalty * parts.violations;
}

double inertia_weight(int t, int t_max, double omega_max, double omega_min) {
  return omega_max - (omega_max - omega_min) * static_cast<double>(t) / t_max;
}

VecX step_velocity(const VecX& position, const VecX& velocity, const VecX& personal_best,
                   const VecX& global_best, double omega, double c1, double c2, double aperture,
                   RngStream& rng) {
  const double r1 = rng.uniform01();
  const double r2 = rng.uniform01();
  VecX v = omega * velocity + c1 * r1 * (personal_best - position) +
           c2 * r2 * (global_best - position);
  return v.cwiseMax(-aperture).cwiseMin(aperture);
}

VecX step_position(const VecX& position, const VecX& velocity, int m_tx, int m_rx,
                   double aperture) {
  VecX p = (position + velocity).cwiseMax(0.0).cwiseMin(aperture);
  std::sort(p.data(), p.data() + m_tx);
  if (m_rx > 0) std::sort(p.data() + m_tx, p.data() + m_tx + m_rx);
  return p;
}

VecX sample_feasible_coords(int count, double aperture, double min_spacing, RngStream& rng) {
  const double slack = aperture - (count - 1) * min_spacing;
  if (slack < 0.0) throw std::invalid_argument("no feasible layout: aperture too small");
  std::vector<double> u(static_cast<std::size_t>(count));
  for (auto& v : u) v = rng.uniform(0.0, slack);
  std::sort(u.begin(), u.end());
  VecX coords(count);
  for (int i = 0; i < count; ++i) coords(i) = u[static_cast<std::size_t>(i)] + i * min_spacing;
  return coords;
}

PsoOutcome optimize_positions_slot(const SlotContext& ctx, const PsoConfig& cfg,
                                   const ArrayLayout& warm, RngStream rng) {
  const int m_tx = ctx.num_tx;
  const bool rx_frozen = ctx.frozen_rx.size() > 0;
  const int m_rx = rx_frozen ? 0 : ctx.num_rx;
  const int dim = m_tx + m_rx;
  const int swarm = cfg.particles;

  auto pack = [&](const VecX& x, const VecX& y) {
    VecX c(dim);
    c.head(m_tx) = x;
    if (m_rx > 0) c.tail(m_rx) = y;
    return c;
  };

  std::vector<VecX> position(static_cast<std::size_t>(swarm));
  position[0] = pack(warm.x, warm.y);  // warm start at the incumbent layout
  if (swarm > 1) {
    position[1] = pack(max_spread_coords(m_tx, ctx.aperture),
                       m_rx > 0 ? max_spread_coords(m_rx, ctx.aperture) : VecX());
  }
  if (swarm > 2) {
    // Deterministic seed at the aperture-term maximizer.
    position[2] = pack(edge_cluster_coords(m_tx, ctx.aperture, ctx.min_spacing),
                       m_rx > 0 ? edge_cluster_coords(m_rx, ctx.aperture, ctx.min_spacing)
                                : VecX());
  }
  for (int p = 3; p < swarm; ++p) {
    RngStream init_rng = rng.derive({1, static_cast<std::uint64_t>(p)});
    position[static_cast<std::size_t>(p)] =
        pack(sample_feasible_coords(m_tx, ctx.aperture, ctx.min_spacing, init_rng),
             m_rx > 0 ? sample_feasible_coords(m_rx, ctx.aperture, ctx.min_spacing, init_rng)
                      : VecX());
  }

  std::vector<VecX> velocity(static_cast<std::size_t>(swarm), VecX::Zero(dim));
  std::vector<VecX> personal_best = position;
  std::vector<double> personal_fit(static_cast<std::size_t>(swarm));
  VecX global_best;
  double global_fit = -std::numeric_limits<double>::infinity();
  auto consider_global = [&](const VecX& pos, double fit, int violations) {
    if (violations == 0 && fit > global_fit) {
      global_fit = fit;
      global_best = pos;
    }
  };
  for (int p = 0; p < swarm; ++p) {
    const FitnessParts parts = eval_candidate(position[static_cast<std::size_t>(p)], ctx);
    const double fit = parts.objective - cfg.penalty * parts.violations;
    personal_fit[static_cast<std::size_t>(p)] = fit;
    consider_global(position[static_cast<std::size_t>(p)], fit, parts.violations);
  }
  if (global_best.size() == 0) {
    // every generated particle is feasible, so only a bad warm layout gets here
    throw std::invalid_argument("warm-start layout infeasible");
  }

  PsoOutcome out;
  out.best_fitness_trace.push_back(global_fit);

  std::vector<RngStream> step_rng;
  step_rng.reserve(static_cast<std::size_t>(swarm));
  for (int p = 0; p < swarm; ++p) step_rng.push_back(rng.derive({2, static_cast<std::uint64_t>(p)}));

  for (int t = 1; t <= cfg.iterations; ++t) {
    const double omega = inertia_weight(t, cfg.iterations, cfg.omega_max, cfg.omega_min);
    for (int p = 0; p < swarm; ++p) {
      auto& pos = position[static_cast<std::size_t>(p)];
      auto& vel = velocity[static_cast<std::size_t>(p)];
      vel = step_velocity(pos, vel, personal_best[static_cast<std::size_t>(p)], global_best,
                          omega, cfg.c1, cfg.c2, ctx.aperture,
                          step_rng[static_cast<std::size_t>(p)]);
      pos = step_position(pos, vel, m_tx, m_rx, ctx.aperture);
      const FitnessParts parts = eval_candidate(pos, ctx);
      const double fit = parts.objective - cfg.penalty * parts.violations;
      if (fit > personal_fit[static_cast<std::size_t>(p)]) {
        personal_fit[static_cast<std::size_t>(p)] = fit;
        personal_best[static_cast<std::size_t>(p)] = pos;
      }
      consider_global(pos, fit, parts.violations);
    }
    out.best_fitness_trace.push_back(global_fit);
  }

  out.layout.x = global_best.head(m_tx);
  out.layout.y = rx_frozen ? ctx.frozen_rx : VecX(global_best.tail(ctx.num_rx));
  out.fitness = global_fit;
  return out;
}

}  // namespace fasense
