#pragma once

#include "confboost/geometry.hpp"
#include "confboost/motion.hpp"

namespace confboost {

struct Detection {
  BBox box;
  double confidence = 0.0;
  int frame = 0;
};

enum class TrackStatus { tentative, confirmed, removed };

// State of one tracked trajectory. last_update counts frames since the last
// successful match: 0 right after an update, incremented by every predict.
struct Tracklet {
  int id = 0;
  KalmanState state;
  int last_update = 0;
  int hits = 0;
  int hit_streak = 0;
  int age = 0;
  TrackStatus status = TrackStatus::tentative;

  BBox box() const { return state_to_bbox(state); }
};

// Reliability of a tracklet's prediction: 1 right after an update, decaying
// linearly to 0 over `horizon` frames without one.
double tracklet_confidence(int last_update, int horizon);
inline double tracklet_confidence(const Tracklet& t, int horizon) {
  return tracklet_confidence(t.last_update, horizon);
}

}  // namespace confboost
