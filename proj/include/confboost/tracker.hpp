#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "confboost/boost.hpp"
#include "confboost/similarity.hpp"
#include "confboost/tracklet.hpp"

namespace confboost {

// One emitted (frame, id, box, score) row.
struct TrackRecord {
  int frame = 0;
  int id = 0;
  BBox box;
  double score = 1.0;
};

// Per-frame detections keyed by frame index.
using DetectionStream = std::map<int, std::vector<Detection>>;

// Externally computed appearance similarity for one frame. det_index refers
// to the frame's detection list as given to the tracker.
struct AppearanceEntry {
  int det_index = 0;
  int track_id = 0;
  double value = 0.0;
};
using AppearanceFrame = std::vector<AppearanceEntry>;
using AppearanceStream = std::map<int, AppearanceFrame>;

struct TrackerConfig {
  BoostConfig boost;
  SimilarityWeights weights;
  PairConfidenceRule pair_rule = PairConfidenceRule::product;
  NoiseConfig noise;
  double tau_s = 0.3;
  // Creation threshold; tau + 0.1 when unset.
  std::optional<double> tau_init;
  int max_age = 30;
  int min_hits = 1;
  int horizon = 30;
  // Linear fill of gaps up to this many frames in the output; 0 disables.
  int interpolate_gap = 0;

  double creation_threshold() const { return tau_init.value_or(boost.tau + 0.1); }
  void validate() const;
};

struct MatchInfo {
  int det_index = 0;
  int track_id = 0;
  // Frames since the tracklet's previous update, at match time.
  int last_update = 0;
  // IoU between the detection and the predicted box.
  double iou = 0.0;
};

struct FrameDiagnostics {
  std::vector<double> boosted;   // per input detection
  std::vector<char> kept;        // survived the confidence threshold
  std::vector<int> track_of;     // matched or created tracklet id, -1 otherwise
  std::vector<int> created;      // ids created this frame
  std::vector<MatchInfo> matches;
};

struct FrameResult {
  int frame = 0;
  std::vector<TrackRecord> records;  // confirmed tracklets updated this frame, by id
  FrameDiagnostics diagnostics;
};

// Online tracker: predict, boost, threshold, associate in a single stage,
// update and manage tracklet lifecycles. Not thread safe; use one instance
// per sequence.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  // Frames must strictly increase. Skipped frames are predicted through.
  FrameResult step(int frame, std::span<const Detection> dets,
                   const AppearanceFrame* appearance = nullptr);

  const std::vector<Tracklet>& tracklets() const { return tracklets_; }
  const TrackerConfig& config() const { return cfg_; }
  // Replaces the configuration; tracklets are kept.
  void set_config(TrackerConfig cfg);
  int last_frame() const { return last_frame_; }

 private:
  void predict_all(int steps);

  TrackerConfig cfg_;
  std::vector<Tracklet> tracklets_;
  int next_id_ = 1;
  int last_frame_ = 0;
};

// Runs a fresh tracker over frames first..last of the stream, including
// frames with no detections. Empty stream gives no results.
std::vector<FrameResult> run_sequence(const DetectionStream& stream, const TrackerConfig& cfg,
                                      const AppearanceStream* appearance = nullptr);

std::vector<TrackRecord> flatten(std::span<const FrameResult> results);

// Linear interpolation of per-id gaps of at most max_gap missing frames.
std::vector<TrackRecord> interpolate_gaps(std::span<const TrackRecord> records, int max_gap);

}  // namespace confboost
