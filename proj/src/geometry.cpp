#include "fasense/geometry.hpp"

#include <cmath>
#include <complex>

namespace fasense {

namespace {
constexpr double kOverheadCosTol = 1e-12;
}

double slant_distance(const Vec2& uav, const Vec2& target, double altitude) {
  return std::sqrt((uav - target).squaredNorm() + altitude * altitude);
}

double vertical_aod(const Vec2& uav, const Vec2& target, double altitude) {
  return std::asin(altitude / slant_distance(uav, target, altitude));
}

double aod_cosine(double theta) {
  double c = std::cos(theta);
  return std::abs(c) < kOverheadCosTol ? 0.0 : c;
}

CVecX steering_vector(const VecX& element_positions, double theta, double wavelength) {
  const double k = 2.0 * M_PI / wavelength * std::sin(theta);
  CVecX v(element_positions.size());
  for (Eigen::Index i = 0; i < element_positions.size(); ++i) {
    v(i) = std::polar(1.0, k * element_positions(i));
  }
  return v;
}

CVecX steering_derivative(const VecX& element_positions, double theta, double wavelength) {
  const double c = aod_cosine(theta);
  const double scale = 2.0 * M_PI / wavelength * c;
  const CVecX base = steering_vector(element_positions, theta, wavelength);
  CVecX v(element_positions.size());
  for (Eigen::Index i = 0; i < element_positions.size(); ++i) {
    v(i) = std::complex<double>(0.0, scale * element_positions(i)) * base(i);
  }
  return v;
}

double aperture_term(const VecX& element_positions) {
  // A constant vector is annihilated exactly; do not let the mean's rounding
  // turn the singular case into a ~1e-33 residue.
  if (element_positions.maxCoeff() == element_positions.minCoeff()) return 0.0;
  const double mean = element_positions.mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < element_positions.size(); ++i) {
    const double d = element_positions(i) - mean;
    acc += d * d;
  }
  return acc;
}

SteeringContext make_steering_context(const Vec2& uav, const Vec2& target, double altitude,
                                      const VecX& tx_positions, const VecX& rx_positions,
                                      double wavelength) {
  SteeringContext ctx;
  ctx.dist = slant_distance(uav, target, altitude);
  ctx.theta = std::asin(altitude / ctx.dist);
  ctx.a = steering_vector(tx_positions, ctx.theta, wavelength);
  ctx.b = steering_vector(rx_positions, ctx.theta, wavelength);
  ctx.a_dot = steering_derivative(tx_positions, ctx.theta, wavelength);
  ctx.b_dot = steering_derivative(rx_positions, ctx.theta, wavelength);
  return ctx;
}

}  // namespace fasense
