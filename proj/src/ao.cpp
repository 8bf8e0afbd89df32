#include "fasense/ao.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "fasense/beamform.hpp"
#include "fasense/parallel.hpp"
#include "fasense/pso.hpp"
#include "fasense/rng.hpp"

namespace fasense {

namespace {

ArrayLayout default_initial_layout(const Scenario& sc) {
  auto coords = [&](int m) {
    // Dense half-wavelength array when it fits, otherwise max spread.
    const double dense_span = (m - 1) * 0.5 * sc.wavelength;
    return dense_span <= sc.aperture ? uniform_coords(m, 0.5 * sc.wavelength)
                                     : max_spread_coords(m, sc.aperture);
  };
  return {coords(sc.num_tx), coords(sc.num_rx)};
}

double fixed_order_sum(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

Solution run_ao(const Scenario& sc, const AoOptions& opts) {
  const int n = sc.num_slots;
  const ArrayLayout init_layout =
      opts.initial_layout ? *opts.initial_layout : default_initial_layout(sc);
  if (!layout_feasible(init_layout, sc.aperture, sc.min_spacing)) {
    throw std::invalid_argument("initial antenna layout infeasible");
  }

  Solution sol;
  if (opts.warm_start) {
    sol.path = opts.warm_start->path;
    sol.covariances = opts.warm_start->covariances;
    sol.layouts = opts.warm_start->layouts;
  } else {
    sol.path = straight_line_path(sc.q_init, sc.q_final, n);
    sol.layouts.assign(static_cast<std::size_t>(n), init_layout);
    sol.covariances.assign(
        static_cast<std::size_t>(n),
        sc.p_max_w / sc.num_tx * CMatX::Identity(sc.num_tx, sc.num_tx));
  }

  const RngStream root(sc.seed);

  // Cached per-slot objective terms; every stage gate and the reported trace
  // go through slot_reciprocal_sum so accepted updates can never lower the
  // recorded objective, down to the last bit.
  std::vector<double> slot_sums(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    slot_sums[static_cast<std::size_t>(i)] = slot_reciprocal_sum(
        sc, sol.path.q[static_cast<std::size_t>(i)], sol.covariances[static_cast<std::size_t>(i)],
        sol.layouts[static_cast<std::size_t>(i)]);
  }

  sol.report = evaluate(sc, sol.path, sol.covariances, sol.layouts);
  sol.trace.push_back({0, sol.report.reciprocal_objective, sol.report.avg_crb});
  double prev_objective = sol.report.reciprocal_objective;

  for (int l = 1; l <= sc.ao.max_iterations; ++l) {
    // --- trajectory subproblem with frozen steering ---
    {
      const FrozenSteering frozen = freeze_steering(sol.path, sc, sol.layouts);
      const Eigen::MatrixXd weights = trajectory_weights(frozen, sol.covariances, sol.layouts, sc);
      Path candidate = optimize_trajectory(sol.path, weights, sc);
      std::vector<double> cand_sums(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        cand_sums[static_cast<std::size_t>(i)] = slot_reciprocal_sum(
            sc, candidate.q[static_cast<std::size_t>(i)],
            sol.covariances[static_cast<std::size_t>(i)], sol.layouts[static_cast<std::size_t>(i)]);
      }
      // The surrogate maximizes a frozen-steering approximation; accept only
      // if the live objective agrees that the path improved.
      if (fixed_order_sum(cand_sums) >= fixed_order_sum(slot_sums)) {
        sol.path = std::move(candidate);
        slot_sums = std::move(cand_sums);
      }
    }

    // --- per-slot beamforming + antenna positions ---
    parallel_for(n, opts.threads, [&](int i) {
      const std::size_t si = static_cast<std::size_t>(i);
      const Vec2 uav = sol.path.q[si];

      std::vector<CVecX> steering;
      std::vector<double> weights;
      steering.reserve(static_cast<std::size_t>(sc.num_targets));
      weights.reserve(static_cast<std::size_t>(sc.num_targets));
      for (int k = 0; k < sc.num_targets; ++k) {
        const double theta = vertical_aod(uav, sc.targets[k], sc.altitude);
        const double dist = slant_distance(uav, sc.targets[k], sc.altitude);
        steering.push_back(steering_vector(sol.layouts[si].x, theta, sc.wavelength));
        weights.push_back(slot_weight(std::norm(sc.rcs[k]), dist, theta, sol.layouts[si].y,
                                      sc.wavelength, sc.frames_per_slot, sc.noise_w));
      }
      const BeamformResult beam = optimize_beamforming_slot(steering, weights, sc.p_max_w);
      {
        const double cand = slot_reciprocal_sum(sc, uav, beam.covariance, sol.layouts[si]);
        if (cand >= slot_sums[si]) {
          sol.covariances[si] = beam.covariance;
          slot_sums[si] = cand;
        }
      }

      if (opts.layout_mode != LayoutMode::kFrozen) {
        const VecX frozen_rx =
            opts.layout_mode == LayoutMode::kOptimizeTransmitOnly ? sol.layouts[si].y : VecX();
        const SlotContext ctx = make_slot_context(sc, uav, sol.covariances[si], frozen_rx);
        RngStream rng = root.derive({stream_tag::kPsoStep, static_cast<std::uint64_t>(l),
                                     static_cast<std::uint64_t>(i)});
        const PsoOutcome pso = optimize_positions_slot(ctx, sc.pso, sol.layouts[si], rng);
        const double cand = slot_reciprocal_sum(sc, uav, sol.covariances[si], pso.layout);
        if (cand >= slot_sums[si]) {
          sol.layouts[si] = pso.layout;
          slot_sums[si] = cand;
        }
      }
    });

    sol.report = evaluate(sc, sol.path, sol.covariances, sol.layouts);
    const double objective = sol.report.reciprocal_objective;
    sol.trace.push_back({l, objective, sol.report.avg_crb});
    sol.iterations_used = l;
    if (objective - prev_objective < sc.ao.epsilon) {
      sol.converged = true;
      break;
    }
    prev_objective = objective;
  }
  return sol;
}

MonotoneCheck check_monotone(const std::vector<TracePoint>& trace, double tol) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].objective < trace[i - 1].objective - tol) {
      return {false, trace[i].iteration};
    }
  }
  return {true, -1};
}

double complexity_estimate(const Scenario& sc) {
  if (sc.ao.epsilon >= 1.0) throw std::invalid_argument("epsilon must be below 1");
  const double n = sc.num_slots;
  const double mt = sc.num_tx;
  const double mr = sc.num_rx;
  const double solver_part = sc.ao.max_iterations *
                             (std::pow(2.0 * n, 3.5) + std::pow(n * mt * mt, 3.5)) *
                             std::log(1.0 / sc.ao.epsilon);
  const double swarm_part = n * sc.pso.iterations * sc.pso.particles * (mt + mr);
  return solver_part + swarm_part;
}

void audit_solution(const Scenario& sc, const Solution& sol) {
  const PathConstraints cons = path_constraints(sc);
  if (static_cast<int>(sol.path.q.size()) != sc.num_slots) {
    throw std::runtime_error("audit: path slot count mismatch");
  }
  if ((sol.path.q.front() - sc.q_init).norm() > 1e-9) {
    throw std::runtime_error("audit: initial position constraint violated");
  }
  if ((sol.path.q.back() - sc.q_final).norm() > 1e-9) {
    throw std::runtime_error("audit: final position constraint violated");
  }
  for (std::size_t i = 1; i < sol.path.q.size(); ++i) {
    if ((sol.path.q[i] - sol.path.q[i - 1]).norm() > cons.step_max + 1e-6) {
      throw std::runtime_error("audit: velocity constraint violated at slot " +
                               std::to_string(i + 1));
    }
  }
  for (int i = 0; i < sc.num_slots; ++i) {
    const auto& r = sol.covariances[static_cast<std::size_t>(i)];
    const double trace = r.real().trace();
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, trace)) {
      throw std::runtime_error("audit: covariance not Hermitian at slot " + std::to_string(i + 1));
    }
    Eigen::SelfAdjointEigenSolver<CMatX> eig(r, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(trace, 1e-300)) {
      throw std::runtime_error("audit: covariance not PSD at slot " + std::to_string(i + 1));
    }
    if (trace > sc.p_max_w + 1e-9) {
      throw std::runtime_error("audit: power constraint violated at slot " + std::to_string(i + 1));
    }
    if (!layout_feasible(sol.layouts[static_cast<std::size_t>(i)], sc.aperture, sc.min_spacing)) {
      throw std::runtime_error("audit: antenna layout constraint violated at slot " +
                               std::to_string(i + 1));
    }
  }
}

}  // namespace fasense
