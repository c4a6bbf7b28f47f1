#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "confboost/tracker.hpp"

namespace confboost {

// Synthetic scene: constant-velocity boxes bouncing inside a field, noisy
// detections, occlusion intervals that lower detection confidence without
// dropping the detection, and static ghost false positives.
struct SceneConfig {
  double width = 1920.0;
  double height = 1080.0;
  int objects = 12;
  int frames = 300;
  double speed_min = 1.0;          // px/frame
  double speed_max = 4.0;
  double box_h_min = 80.0;
  double box_h_max = 160.0;
  double aspect_min = 0.35;        // width / height
  double aspect_max = 0.5;
  double position_noise = 1.0;     // std of x, y noise in px
  double size_noise = 1.0;         // std of w, h noise in px
  double conf_min = 0.75;          // regular detections
  double conf_max = 0.95;
  double miss_rate = 0.0;          // probability a regular detection is dropped

  int occlusions_per_object = 2;
  int occlusion_min_frames = 5;
  int occlusion_max_frames = 20;
  double dip_conf_min = 0.2;
  double dip_conf_max = 0.55;
  double tau = 0.6;                // dip confidences stay below this

  int ghosts = 3;
  double ghost_conf_min = 0.45;
  double ghost_conf_max = 0.75;
  double ghost_jitter = 1.0;       // std of per-frame ghost box jitter in px
  double ghost_rate = 1.0;         // probability an active ghost fires per frame
  int ghost_min_frames = 300;      // length of each ghost's active interval
  int ghost_max_frames = 300;

  std::uint64_t seed = 1;

  void validate() const;
};

enum class DetectionKind { regular, occlusion_dip, ghost };

struct DetectionLabel {
  DetectionKind kind = DetectionKind::regular;
  // Ground-truth id for regular and dip detections, ghost index otherwise.
  int source = 0;
};

struct Scene {
  std::vector<TrackRecord> ground_truth;
  DetectionStream detections;
  // Parallel to detections: labels[frame][i] describes detections[frame][i].
  std::map<int, std::vector<DetectionLabel>> labels;
  std::vector<BBox> ghost_sites;
};

// Deterministic in the seed and independent of platform RNG distributions.
Scene generate(const SceneConfig& cfg);

SceneConfig parse_scene_config(std::string_view text, const std::string& source = "<scene>");
SceneConfig load_scene_config(const std::string& path);
std::string format_scene_config(const SceneConfig& cfg);

struct IouBucket {
  int last_update = 0;
  long count = 0;
  double mean = 0.0;
  double q90 = 0.0;
};

// IoU between matched detections and their tracklet's prediction, grouped
// by frames since the tracklet's previous update. Empty buckets are absent.
std::vector<IouBucket> iou_decay_study(const Scene& scene, const TrackerConfig& cfg);
std::vector<IouBucket> iou_decay_table(const std::vector<FrameResult>& results);

std::string format_iou_table(const std::vector<IouBucket>& rows);

}  // namespace confboost
