#include "fasense/crb.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "fasense/trajectory.hpp"

namespace fasense {

namespace {

void check_dims(const SteeringContext& ctx, const CMatX& covariance) {
  const Eigen::Index mt = ctx.a.size();
  if (ctx.a_dot.size() != mt || covariance.rows() != mt || covariance.cols() != mt) {
    throw std::invalid_argument("steering/covariance dimension mismatch");
  }
  if (ctx.b.size() != ctx.b_dot.size()) {
    throw std::invalid_argument("receive steering dimension mismatch");
  }
}

}  // namespace

TraceTerms trace_terms_direct(const SteeringContext& ctx, const CMatX& covariance) {
  check_dims(ctx, covariance);
  const CMatX psi = ctx.b * ctx.a.adjoint();
  const CMatX dpsi = ctx.b_dot * ctx.a.adjoint() + ctx.b * ctx.a_dot.adjoint();
  TraceTerms t;
  t.psi_psi = (psi.adjoint() * psi * covariance).trace().real();
  t.dpsi_psi = (dpsi.adjoint() * psi * covariance).trace();
  t.dpsi_dpsi = (dpsi.adjoint() * dpsi * covariance).trace().real();
  t.dpsi_psi_abs2 = std::norm(t.dpsi_psi);
  return t;
}

TraceTerms trace_terms_closed(const SteeringContext& ctx, const VecX& rx_positions,
                              double wavelength, const CMatX& covariance) {
  check_dims(ctx, covariance);
  if (rx_positions.size() != ctx.b.size()) {
    throw std::invalid_argument("receive position dimension mismatch");
  }
  const double m_r = static_cast<double>(rx_positions.size());
  const double kappa = 2.0 * M_PI / wavelength * aod_cosine(ctx.theta);  // |kappa|, kappa = -j*this
  const double s1 = rx_positions.sum();
  const double s2 = rx_positions.squaredNorm();

  const double quad_a = (ctx.a.adjoint() * covariance * ctx.a).value().real();
  const std::complex<double> cross = (ctx.a.adjoint() * covariance * ctx.a_dot).value();
  const double quad_adot = (ctx.a_dot.adjoint() * covariance * ctx.a_dot).value().real();

  TraceTerms t;
  t.psi_psi = m_r * quad_a;
  t.dpsi_psi = std::complex<double>(0.0, -kappa) * quad_a * s1 + m_r * cross;
  t.dpsi_dpsi = kappa * kappa * quad_a * s2 + m_r * quad_adot - 2.0 * kappa * cross.imag() * s1;
  t.dpsi_psi_abs2 = std::norm(t.dpsi_psi);
  return t;
}

double trace_terms_gap(const TraceTerms& lhs, const TraceTerms& rhs) {
  auto rel = [](double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
  };
  double gap = rel(lhs.psi_psi, rhs.psi_psi);
  const double cross_scale =
      std::max({std::abs(lhs.dpsi_psi), std::abs(rhs.dpsi_psi), 1e-300});
  gap = std::max(gap, std::abs(lhs.dpsi_psi - rhs.dpsi_psi) / cross_scale);
  gap = std::max(gap, rel(lhs.dpsi_dpsi, rhs.dpsi_dpsi));
  gap = std::max(gap, rel(lhs.dpsi_psi_abs2, rhs.dpsi_psi_abs2));
  return gap;
}

TraceTerms trace_identities(const SteeringContext& ctx, const VecX& rx_positions,
                            double wavelength, const CMatX& covariance) {
  const TraceTerms direct = trace_terms_direct(ctx, covariance);
  const TraceTerms closed = trace_terms_closed(ctx, rx_positions, wavelength, covariance);
  if (trace_terms_gap(direct, closed) > 1e-8) {
    throw std::runtime_error("trace identity paths disagree beyond 1e-8");
  }
  return direct;
}

double crb_full(const SteeringContext& ctx, const CMatX& covariance, std::complex<double> alpha,
                double dist, int frames, double noise_w) {
  const TraceTerms t = trace_terms_direct(ctx, covariance);
  const double numerator = 2.0 * dist * dist * noise_w * t.psi_psi;
  const double information = t.dpsi_dpsi * t.psi_psi - t.dpsi_psi_abs2;
  // A difference below the cancellation noise floor of its operands is
  // indistinguishable from zero Fisher information (e.g. a rank-1 beam with
  // a degenerate receive aperture cancels exactly in real arithmetic but
  // leaves ~1e-16-relative residue here).
  if (information <= 1e-10 * std::abs(t.dpsi_dpsi * t.psi_psi)) {
    return std::numeric_limits<double>::infinity();
  }
  const double denominator = std::norm(alpha) * frames * information;
  if (denominator <= kSingularDenomTol) return std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

double crb_reduced(const CVecX& tx_steering, const VecX& rx_positions, double theta,
                   const CMatX& covariance, std::complex<double> alpha, double dist, int frames,
                   double noise_w, double wavelength) {
  const double kappa = 2.0 * M_PI / wavelength * aod_cosine(theta);
  const double quad = (tx_steering.adjoint() * covariance * tx_steering).value().real();
  const double denominator =
      std::norm(alpha) * frames * kappa * kappa * quad * aperture_term(rx_positions);
  if (denominator <= kSingularDenomTol) return std::numeric_limits<double>::infinity();
  return 2.0 * dist * dist * noise_w / denominator;
}

double slot_reciprocal_sum(const Scenario& sc, const Vec2& uav, const CMatX& covariance,
                           const ArrayLayout& layout) {
  double sum = 0.0;
  for (int k = 0; k < sc.num_targets; ++k) {
    const double theta = vertical_aod(uav, sc.targets[k], sc.altitude);
    const double dist = slant_distance(uav, sc.targets[k], sc.altitude);
    const CVecX a = steering_vector(layout.x, theta, sc.wavelength);
    const double crb = crb_reduced(a, layout.y, theta, covariance, sc.rcs[k], dist,
                                   sc.frames_per_slot, sc.noise_w, sc.wavelength);
    sum += crb_reciprocal(crb);
  }
  return sum;
}

namespace {

void check_covariance_feasible(const CMatX& r, double budget, int slot) {
  const std::string where = " (slot " + std::to_string(slot + 1) + ")";
  const double trace = r.real().trace();
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, trace)) {
    throw std::invalid_argument("constraint violated: covariance not Hermitian" + where);
  }
  Eigen::SelfAdjointEigenSolver<CMatX> eig(r, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(trace, 1e-300)) {
    throw std::invalid_argument("constraint violated: covariance not PSD" + where);
  }
  if (trace > budget + 1e-9) {
    throw std::invalid_argument("constraint violated: covariance trace exceeds power budget" +
                                where);
  }
}

}  // namespace

CrbReport evaluate(const Scenario& sc, const Path& path, const std::vector<CMatX>& covariances,
                   const std::vector<ArrayLayout>& layouts) {
  const int n = sc.num_slots;
  const int k = sc.num_targets;
  if (static_cast<int>(path.q.size()) != n || static_cast<int>(covariances.size()) != n ||
      static_cast<int>(layouts.size()) != n) {
    throw std::invalid_argument("constraint violated: per-slot input count != num_slots");
  }
  if (!path_feasible(path, path_constraints(sc))) {
    throw std::invalid_argument("constraint violated: path endpoints/velocity");
  }
  for (int i = 0; i < n; ++i) {
    check_covariance_feasible(covariances[i], sc.p_max_w, i);
    if (!layout_feasible(layouts[i], sc.aperture, sc.min_spacing)) {
      throw std::invalid_argument("constraint violated: antenna layout (slot " +
                                  std::to_string(i + 1) + ")");
    }
  }

  CrbReport report;
  report.per_slot_per_target.resize(n, k);
  double finite_sum = 0.0;
  int finite_count = 0;
  double reciprocal_total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      const double theta = vertical_aod(path.q[i], sc.targets[j], sc.altitude);
      const double dist = slant_distance(path.q[i], sc.targets[j], sc.altitude);
      const CVecX a = steering_vector(layouts[i].x, theta, sc.wavelength);
      const double crb = crb_reduced(a, layouts[i].y, theta, covariances[i], sc.rcs[j], dist,
                                     sc.frames_per_slot, sc.noise_w, sc.wavelength);
      report.per_slot_per_target(i, j) = crb;
      if (std::isinf(crb)) {
        ++report.infinite_count;
      } else {
        finite_sum += crb;
        ++finite_count;
      }
    }
    // Same code path as the optimizer's stage gates, so the reported
    // objective and the gated per-slot sums round identically.
    reciprocal_total += slot_reciprocal_sum(sc, path.q[i], covariances[i], layouts[i]);
  }
  report.avg_crb = finite_count > 0 ? finite_sum / finite_count
                                    : std::numeric_limits<double>::infinity();
  report.reciprocal_objective = reciprocal_total / (static_cast<double>(n) * k);
  return report;
}

}  // namespace fasense
