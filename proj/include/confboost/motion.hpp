#pragma once

#include <Eigen/Dense>

#include "confboost/geometry.hpp"

namespace confboost {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;
using ObsVector = Eigen::Matrix<double, 4, 1>;
using ObsMatrix = Eigen::Matrix<double, 4, 4>;

// Constant-velocity state over [u, v, h, r, du, dv, dh, dr]: box center,
// height, width/height ratio and their per-frame velocities.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Identity();
};

// Noise generators. Standard deviations of the center and height components
// scale with the current box height; the ratio components use constants.
// Setting every field to zero gives Q = 0 (or R = 0).
struct NoiseConfig {
  double process_position = 1.0 / 20.0;
  double process_velocity = 1.0 / 160.0;
  double process_ratio = 1e-2;
  double process_ratio_velocity = 1e-5;
  double observation_position = 1.0 / 20.0;
  double observation_ratio = 1e-2;
  // Initial position std is init_position * h; velocity variance is this
  // many times the matching position variance.
  double init_position = 2.0 / 20.0;
  double init_ratio = 1e-2;
  double init_velocity_multiplier = 10.0;

  static NoiseConfig zero_process();
  static NoiseConfig zero_process(NoiseConfig base);
  void validate() const;
};

ObsVector bbox_to_observation(const BBox& b);
BBox observation_to_bbox(const ObsVector& z);
BBox state_to_bbox(const KalmanState& s);

StateMatrix transition_matrix();
Eigen::Matrix<double, 4, 8> observation_matrix();

StateMatrix process_noise(const KalmanState& s, const NoiseConfig& noise);
ObsMatrix observation_noise(const KalmanState& s, const NoiseConfig& noise);

// Zero velocity, velocity variance = multiplier x position variance.
KalmanState initiate(const BBox& b, const NoiseConfig& noise);

// mean' = F mean, P' = F P F^T + Q. Throws NumericFailure on non-finite input.
KalmanState predict(const KalmanState& s, const NoiseConfig& noise);

// Joseph-form update with observation z = [u, v, h, r] of the box.
KalmanState update(const KalmanState& s, const BBox& obs, const NoiseConfig& noise);

// Predicted observation distribution: H mean and H P H^T + R.
struct Projection {
  ObsVector mean;
  ObsMatrix covariance;
};
Projection project(const KalmanState& s, const NoiseConfig& noise);

// Squared Mahalanobis distance of the box observation under the projection.
double squared_mahalanobis(const Projection& p, const BBox& b);

}  // namespace confboost
