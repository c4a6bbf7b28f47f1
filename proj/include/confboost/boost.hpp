#pragma once

#include <span>
#include <vector>

#include "confboost/similarity.hpp"

namespace confboost {

// Detection confidence boost settings. The flags select the pieces of the
// improved likely-object boost: averaged similarity (use_s), soft boost
// (use_sb) and the per-tracklet varying threshold (use_vt).
struct BoostConfig {
  double beta_c = 0.65;
  double alpha = 0.65;
  double q = 1.5;
  double beta_high = 0.95;
  double beta_low = 0.8;
  double gamma = 0.0075;
  double tau = 0.6;

  bool use_dlo = true;
  bool use_s = true;
  bool use_sb = true;
  bool use_vt = true;

  bool use_novelty = false;
  double novelty_gate = kChi2Dof4Q95;

  void validate() const;
};

// max_j S_ij, or 0 for a row with no tracklets.
std::vector<double> row_max(const SimilarityMatrix& s);

// c_i' = max(c_i, beta_c * max_j S_ij).
std::vector<double> dlo_boost(std::span<const double> conf, const SimilarityMatrix& s,
                              double beta_c);

// c_i' = max(c_i, alpha * c_i + (1 - alpha) * (max_j S_ij)^q).
std::vector<double> soft_boost(std::span<const double> conf, const SimilarityMatrix& s,
                               double alpha, double q);

// beta_j = max(beta_low, beta_high - gamma * (last_update - 1)).
// Throws InvalidState for last_update < 1.
double varying_threshold(int last_update, const BoostConfig& cfg);

// Raises c_i to at least tau when S_ij >= beta_j for some tracklet j.
std::vector<double> vt_boost(std::span<const double> conf, const SimilarityMatrix& s,
                             std::span<const int> last_updates, const BoostConfig& cfg);

// The similarity the likely-object boost runs on: averaged measure when
// use_s is set, plain IoU otherwise.
SimilarityMatrix likely_object_similarity(std::span<const Detection> dets,
                                          std::span<const TrackletView> tracks,
                                          const BoostConfig& cfg);

// Improved detection confidence boost over a precomputed similarity.
// Without use_sb and use_vt this is the plain DLO boost; otherwise soft boost
// then varying threshold, each applied to the running confidences.
std::vector<double> idc_boost(std::span<const double> conf, const SimilarityMatrix& s,
                              std::span<const int> last_updates, const BoostConfig& cfg);

std::vector<double> idc_boost(std::span<const Detection> dets,
                              std::span<const TrackletView> tracks, const BoostConfig& cfg);

// Detections that are outliers to every tracklet (minimum squared
// Mahalanobis distance above the gate) are taken to be newly appearing
// objects and raised to tau. No-op when there are no tracklets.
std::vector<double> mahalanobis_novelty_boost(std::span<const Detection> dets,
                                              std::span<const TrackletView> tracks,
                                              const BoostConfig& cfg);

// Novelty boost (if enabled) followed by the likely-object boost (if
// enabled). Returns the input confidences when there are no tracklets.
std::vector<double> boost_confidences(std::span<const Detection> dets,
                                      std::span<const TrackletView> tracks,
                                      const BoostConfig& cfg);

}  // namespace confboost
