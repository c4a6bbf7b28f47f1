#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "confboost/metrics.hpp"
#include "confboost/simulate.hpp"
#include "confboost/tracker.hpp"

namespace confboost {

// One row of an ablation: which boost pieces are enabled.
struct AblationSetting {
  std::string name;
  bool use_dlo = false;
  bool use_s = false;
  bool use_sb = false;
  bool use_vt = false;

  void apply(BoostConfig& boost) const;
};

// Parses "none;dlo;S;SB+VT;S+SB+VT". Any setting naming S, SB or VT implies
// the likely-object boost. "table" expands to the nine standard rows.
std::vector<AblationSetting> parse_ablation_matrix(std::string_view text);
std::vector<AblationSetting> standard_ablation_matrix();

struct AblationRow {
  AblationSetting setting;
  EvalCounts counts;
  long dip_detections = 0;   // occlusion-dip true positives in the scene
  long dip_recovered = 0;    // of those, kept and matched to an existing tracklet
  long ghost_tracklets = 0;  // emitted ids whose creating detection was a ghost

  double dip_recall() const {
    return dip_detections == 0 ? 0.0 : static_cast<double>(dip_recovered) / dip_detections;
  }
};

struct AblationRun {
  AblationRow row;
  std::vector<FrameResult> frames;
};

AblationRun run_setting(const Scene& scene, const TrackerConfig& base, const AblationSetting& setting);

std::vector<AblationRow> run_ablation(const Scene& scene, const TrackerConfig& base,
                                      const std::vector<AblationSetting>& matrix);

std::string format_ablation_table(const std::vector<AblationRow>& rows);
std::string format_ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace confboost
