#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "confboost/motion.hpp"
#include "confboost/tracklet.hpp"

namespace confboost {

// Rows are detections, columns tracklets.
using SimilarityMatrix = Eigen::MatrixXd;

// 0.999 quantile of chi-squared with 4 degrees of freedom. Squared
// Mahalanobis distances at or beyond it map to zero similarity.
inline constexpr double kChi2Dof4Q999 = 18.46682695290317;
// 0.95 quantile, the usual gating value.
inline constexpr double kChi2Dof4Q95 = 9.487729036781154;

enum class PairConfidenceRule { product, mean };

struct SimilarityWeights {
  double iou = 0.5;
  double mahalanobis = 0.25;
  double shape = 0.25;
  // Weight of an externally supplied appearance matrix; 0 disables it.
  double appearance = 0.0;

  void validate() const;
};

// Snapshot of what the similarity measures need from a tracklet, taken
// after the frame's predict step.
struct TrackletView {
  BBox box;
  Projection projection;
  double confidence = 1.0;
  int last_update = 1;
};

TrackletView make_view(const Tracklet& t, const NoiseConfig& noise, int horizon);

// max(0, 1 - d^2 / chi2_0.999(4)).
double mahalanobis_similarity(double squared_distance);
double mahalanobis_similarity(const BBox& detection, const Projection& tracklet);

// (|Dw - Tw| + |Dh - Th|) / max(Dw, Tw).
double shape_mismatch(const BBox& detection, const BBox& tracklet);
// c_ij * exp(-ds).
double shape_similarity(const BBox& detection, const BBox& tracklet, double pair_conf);

double pair_confidence(double detection_conf, double tracklet_conf,
                       PairConfidenceRule rule = PairConfidenceRule::product);

SimilarityMatrix iou_matrix(std::span<const Detection> dets, std::span<const TrackletView> tracks);
SimilarityMatrix soft_biou_matrix(std::span<const Detection> dets,
                                  std::span<const TrackletView> tracks);
SimilarityMatrix mahalanobis_matrix(std::span<const Detection> dets,
                                    std::span<const TrackletView> tracks);
SimilarityMatrix pair_confidence_matrix(std::span<const Detection> dets,
                                        std::span<const TrackletView> tracks,
                                        PairConfidenceRule rule);
// Shape similarity with c_ij taken from `pair_conf` (same shape as output).
SimilarityMatrix shape_matrix(std::span<const Detection> dets, std::span<const TrackletView> tracks,
                              const SimilarityMatrix& pair_conf);

// S = IoU + l_iou * c * IoU + l_mhd * S_mhd + l_shape * S_shape [+ l_app * A].
// Throws ContractError if the component shapes disagree.
SimilarityMatrix combine_association(const SimilarityMatrix& iou, const SimilarityMatrix& pair_conf,
                                     const SimilarityMatrix& mahalanobis,
                                     const SimilarityMatrix& shape, const SimilarityWeights& w,
                                     const SimilarityMatrix* appearance = nullptr);

SimilarityMatrix association_similarity(std::span<const Detection> dets,
                                        std::span<const TrackletView> tracks,
                                        const SimilarityWeights& w,
                                        PairConfidenceRule rule = PairConfidenceRule::product,
                                        const SimilarityMatrix* appearance = nullptr);

// Entrywise mean of any number of equally shaped measures.
SimilarityMatrix average_similarity(std::span<const SimilarityMatrix> measures);

// Mean of soft BIoU, Mahalanobis and shape similarity (with c_ij = 1),
// used to find likely objects among low-confidence detections.
SimilarityMatrix boost_similarity(std::span<const Detection> dets,
                                  std::span<const TrackletView> tracks);

}  // namespace confboost
