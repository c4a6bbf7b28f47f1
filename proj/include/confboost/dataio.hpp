#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "confboost/tracker.hpp"

namespace confboost {

// One comma-separated MOT Challenge row. For detections id is -1 and the
// trailing fields are -1; for ground truth `conf` is the consider flag and
// the trailing fields are class and visibility.
struct MotRow {
  int frame = 0;
  int id = -1;
  BBox box;
  double conf = 1.0;
  double extra[3] = {-1.0, -1.0, -1.0};
};

MotRow parse_mot_row(std::string_view line, const std::string& source, std::size_t line_no);
std::vector<MotRow> read_mot_rows(const std::string& path);

struct DetectionReadOptions {
  // Min-max rescale confidences into [0,1] when the file uses another
  // scale. Without it, out-of-range confidences are a parse error.
  bool normalize_confidence = false;
};

DetectionStream read_detections(const std::string& path, const DetectionReadOptions& opts = {});
DetectionStream detections_from_rows(std::span<const MotRow> rows, const std::string& source,
                                     const DetectionReadOptions& opts = {});
void write_detections(const std::string& path, const DetectionStream& stream);
std::string format_detection_row(const Detection& d);

// frame,id,x,y,w,h,conf,-1,-1,-1 with boxes at 2 decimals and scores at 4.
std::string format_result_row(const TrackRecord& r);
// Rejects duplicate (frame, id), id < 1, frame < 1 and empty boxes.
void validate_results(std::span<const TrackRecord> records);
std::string format_results(std::span<const TrackRecord> records);
void write_results(const std::string& path, std::span<const TrackRecord> records);
std::vector<TrackRecord> read_results(const std::string& path);
std::vector<TrackRecord> parse_results(std::string_view text, const std::string& source);

struct GroundTruthFilter {
  bool pedestrian_only = true;      // class column == 1
  bool drop_invisible = true;       // visibility column == 0
  bool drop_inactive = true;        // consider flag == 0
};

std::vector<TrackRecord> read_ground_truth(const std::string& path,
                                           const GroundTruthFilter& filter = {});
std::vector<TrackRecord> ground_truth_from_rows(std::span<const MotRow> rows,
                                                const GroundTruthFilter& filter = {});
// frame,id,x,y,w,h,1,1,1 rows.
void write_ground_truth(const std::string& path, std::span<const TrackRecord> records);

// Per-frame appearance similarity: rows "frame,det_index,track_id,value".
AppearanceStream read_appearance(const std::string& path);

// Flat "key = value" text with '#' comments.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text,
                                                                  const std::string& source);

// Everything a tracking run needs.
struct RunConfig {
  std::string preset = "mot17";
  TrackerConfig tracker;
  std::uint64_t seed = 0;
};

// Named dataset presets: mot17 (tau 0.6, beta_c 0.65), mot20 (tau 0.4,
// beta_c 0.5). Throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

// Unknown keys and out-of-range values are ConfigErrors naming the field.
// A preset key, wherever it appears, is applied before the other keys.
RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);
std::string format_run_config(const RunConfig& cfg);

// Sets use_s / use_sb / use_vt from a list such as "S,SB,VT" and enables the
// likely-object boost; an empty list leaves plain IoU boosting and "none"
// disables boosting. Throws ConfigError for unknown flags.
void apply_boost_flags(BoostConfig& boost, std::string_view flags);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace confboost
