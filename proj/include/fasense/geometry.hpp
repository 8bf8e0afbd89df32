#pragma once

#include <Eigen/Dense>

namespace fasense {

using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using CVecX = Eigen::VectorXcd;
using CMatX = Eigen::MatrixXcd;

/// Slant distance [m] between a UAV at (uav, altitude) and a ground target.
double slant_distance(const Vec2& uav, const Vec2& target, double altitude);

/// Vertical angle of departure [rad] toward the target, in (0, pi/2].
/// pi/2 means the UAV is directly overhead.
double vertical_aod(const Vec2& uav, const Vec2& target, double altitude);

/// cos(theta) with the sub-ULP band around pi/2 flushed to exactly zero.
/// asin(1) rounds to the double nearest pi/2, whose cosine is ~6e-17; any
/// angle with |cos| below 1e-12 is an overhead geometry for our purposes
/// and must make the CRB exactly singular rather than astronomically large.
double aod_cosine(double theta);

/// Array steering vector: entry i = exp(j * 2*pi/lambda * pos_i * sin(theta)).
/// Used for both transmit and receive linear arrays.
CVecX steering_vector(const VecX& element_positions, double theta, double wavelength);

/// Derivative of the steering vector with respect to theta:
/// entry i = j * 2*pi/lambda * pos_i * cos(theta) * steering_i.
CVecX steering_derivative(const VecX& element_positions, double theta, double wavelength);

/// Centered second moment of element positions [m^2]: sum_i (y_i - mean)^2.
/// Translation invariant, zero iff all positions coincide.
double aperture_term(const VecX& element_positions);

/// Per-(slot,target) steering geometry bundle.
struct SteeringContext {
  double theta = 0.0;  // vertical AoD [rad]
  double dist = 0.0;   // slant distance [m]
  CVecX a;             // transmit steering, unit-modulus entries
  CVecX b;             // receive steering, unit-modulus entries
  CVecX a_dot;         // d a / d theta
  CVecX b_dot;         // d b / d theta
};

SteeringContext make_steering_context(const Vec2& uav, const Vec2& target, double altitude,
                                      const VecX& tx_positions, const VecX& rx_positions,
                                      double wavelength);

}  // namespace fasense
