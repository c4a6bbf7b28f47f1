#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "confboost/tracker.hpp"

namespace confboost {

struct EvalCounts {
  long gt = 0;          // ground-truth boxes
  long hyp = 0;         // predicted boxes
  long matches = 0;
  long fp = 0;
  long fn = 0;
  long idsw = 0;
  long ids = 0;         // distinct predicted ids
  long idtp = 0;
  long idfp = 0;
  long idfn = 0;

  double mota() const;
  double idf1() const;
};

struct SequenceReport {
  std::string name;
  EvalCounts counts;
};

struct EvalReport {
  EvalCounts total;
  std::vector<SequenceReport> sequences;

  double mota() const { return total.mota(); }
  double idf1() const { return total.idf1(); }
};

// Correspondences for one frame, by ground-truth and predicted id.
struct FrameMatch {
  std::vector<std::pair<int, int>> pairs;  // (gt id, predicted id)
  int fp = 0;
  int fn = 0;
  int idsw = 0;
};

// CLEAR-MOT per-frame matcher. A ground-truth object keeps its previous
// predicted id while their IoU stays at or above the gate; the rest are
// matched by Hungarian on IoU. A match to a different id than the object's
// last one counts as an identity switch.
class ClearMatcher {
 public:
  explicit ClearMatcher(double iou_gate = 0.5) : gate_(iou_gate) {}

  FrameMatch match_frame(std::span<const TrackRecord> gt, std::span<const TrackRecord> hyp);

 private:
  double gate_;
  std::map<int, int> last_match_;
};

// Evaluates one sequence. Frames of `results` beyond the last ground-truth
// frame are ignored.
SequenceReport evaluate_sequence(std::span<const TrackRecord> gt,
                                 std::span<const TrackRecord> results, double iou_gate = 0.5,
                                 const std::string& name = "sequence");

EvalReport summarize(std::vector<SequenceReport> sequences);

// Global id assignment maximizing identity true positives.
EvalCounts identity_counts(std::span<const TrackRecord> gt, std::span<const TrackRecord> results,
                           double iou_gate = 0.5);

long count_ids(std::span<const TrackRecord> results);
long count_idsw(std::span<const TrackRecord> gt, std::span<const TrackRecord> results,
                double iou_gate = 0.5);

std::string format_report_text(const EvalReport& report);
// Header plus one row per sequence and an OVERALL row.
std::string format_report_csv(const EvalReport& report);

}  // namespace confboost
