#include "confboost/motion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confboost/errors.hpp"

namespace confboost {

namespace {

void require_finite(const KalmanState& s, const char* where) {
  if (!s.mean.allFinite() || !s.covariance.allFinite()) {
    throw NumericFailure(std::string(where) + ": non-finite Kalman state");
  }
}

void symmetrize(StateMatrix& p) { p = 0.5 * (p + p.transpose()).eval(); }

double height_of(const KalmanState& s) { return std::abs(s.mean(2)); }

Eigen::LDLT<ObsMatrix> factor_innovation(const ObsMatrix& cov, const char* where) {
  Eigen::LDLT<ObsMatrix> ldlt(cov);
  const auto d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !d.allFinite() ||
      !(d.minCoeff() > 1e-12 * std::max(d.maxCoeff(), 1e-300))) {
    throw NumericFailure(std::string(where) + ": innovation covariance is singular");
  }
  return ldlt;
}

}  // namespace

NoiseConfig NoiseConfig::zero_process() { return zero_process(NoiseConfig{}); }

NoiseConfig NoiseConfig::zero_process(NoiseConfig base) {
  base.process_position = 0.0;
  base.process_velocity = 0.0;
  base.process_ratio = 0.0;
  base.process_ratio_velocity = 0.0;
  return base;
}

void NoiseConfig::validate() const {
  const double fields[] = {process_position, process_velocity, process_ratio,
                           process_ratio_velocity, observation_position, observation_ratio,
                           init_position, init_ratio, init_velocity_multiplier};
  for (double f : fields) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw InvalidState("noise scales must be finite and >= 0");
    }
  }
}

ObsVector bbox_to_observation(const BBox& b) {
  require_valid(b, "bbox_to_observation");
  ObsVector z;
  z << b.center_x(), b.center_y(), b.h, b.w / b.h;
  return z;
}

BBox observation_to_bbox(const ObsVector& z) {
  const double h = z(2);
  const double r = z(3);
  if (!(h > 0.0) || !(r > 0.0) || !std::isfinite(h) || !std::isfinite(r)) {
    throw InvalidGeometry("state height and ratio must be positive (h=" + std::to_string(h) +
                          ", r=" + std::to_string(r) + ")");
  }
  return from_center(z(0), z(1), r * h, h);
}

BBox state_to_bbox(const KalmanState& s) {
  return observation_to_bbox(s.mean.head<4>());
}

StateMatrix transition_matrix() {
  StateMatrix f = StateMatrix::Identity();
  f.topRightCorner<4, 4>() = Eigen::Matrix4d::Identity();
  return f;
}

Eigen::Matrix<double, 4, 8> observation_matrix() {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  h.leftCols<4>() = Eigen::Matrix4d::Identity();
  return h;
}

StateMatrix process_noise(const KalmanState& s, const NoiseConfig& noise) {
  const double h = height_of(s);
  const double pos = noise.process_position * h;
  const double vel = noise.process_velocity * h;
  StateVector std_dev;
  std_dev << pos, pos, pos, noise.process_ratio, vel, vel, vel, noise.process_ratio_velocity;
  return std_dev.array().square().matrix().asDiagonal();
}

ObsMatrix observation_noise(const KalmanState& s, const NoiseConfig& noise) {
  const double pos = noise.observation_position * height_of(s);
  ObsVector std_dev;
  std_dev << pos, pos, pos, noise.observation_ratio;
  return std_dev.array().square().matrix().asDiagonal();
}

KalmanState initiate(const BBox& b, const NoiseConfig& noise) {
  KalmanState s;
  s.mean.setZero();
  s.mean.head<4>() = bbox_to_observation(b);
  const double pos = noise.init_position * b.h;
  StateVector var;
  var << pos * pos, pos * pos, pos * pos, noise.init_ratio * noise.init_ratio, 0, 0, 0, 0;
  var.tail<4>() = noise.init_velocity_multiplier * var.head<4>();
  s.covariance = var.asDiagonal();
  return s;
}

KalmanState predict(const KalmanState& s, const NoiseConfig& noise) {
  require_finite(s, "predict");
  const StateMatrix f = transition_matrix();
  KalmanState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + process_noise(s, noise);
  symmetrize(out.covariance);
  require_finite(out, "predict");
  return out;
}

Projection project(const KalmanState& s, const NoiseConfig& noise) {
  require_finite(s, "project");
  const auto h = observation_matrix();
  Projection p;
  p.mean = h * s.mean;
  p.covariance = h * s.covariance * h.transpose() + observation_noise(s, noise);
  p.covariance = 0.5 * (p.covariance + p.covariance.transpose()).eval();
  return p;
}

KalmanState update(const KalmanState& s, const BBox& obs, const NoiseConfig& noise) {
  const ObsVector z = bbox_to_observation(obs);
  const Projection p = project(s, noise);
  const auto ldlt = factor_innovation(p.covariance, "update");
  const auto h = observation_matrix();
  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Eigen::Matrix<double, 8, 4> gain =
      ldlt.solve(h * s.covariance).transpose();
  const StateMatrix ikh = StateMatrix::Identity() - gain * h;
  KalmanState out;
  out.mean = s.mean + gain * (z - p.mean);
  out.covariance = ikh * s.covariance * ikh.transpose() +
                   gain * observation_noise(s, noise) * gain.transpose();
  symmetrize(out.covariance);
  require_finite(out, "update");
  return out;
}

double squared_mahalanobis(const Projection& p, const BBox& b) {
  const ObsVector d = bbox_to_observation(b) - p.mean;
  const auto ldlt = factor_innovation(p.covariance, "mahalanobis");
  return d.dot(ldlt.solve(d));
}

}  // namespace confboost
