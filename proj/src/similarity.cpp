#include "confboost/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confboost/errors.hpp"

namespace confboost {

namespace {

void require_unit(double c, const char* what) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw InvalidConfidence(std::string(what) + " must lie in [0,1], got " + std::to_string(c));
  }
}

void require_same_shape(const SimilarityMatrix& a, const SimilarityMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError(std::string("similarity component '") + what + "' is " +
                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                        ", expected " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
  }
}

template <class F>
SimilarityMatrix fill(std::span<const Detection> dets, std::span<const TrackletView> tracks, F f) {
  SimilarityMatrix m(static_cast<Eigen::Index>(dets.size()),
                     static_cast<Eigen::Index>(tracks.size()));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < tracks.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(dets[i], tracks[j]);
    }
  }
  return m;
}

}  // namespace

void SimilarityWeights::validate() const {
  for (double v : {iou, mahalanobis, shape, appearance}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ContractError("similarity weights must be finite and >= 0");
    }
  }
}

TrackletView make_view(const Tracklet& t, const NoiseConfig& noise, int horizon) {
  return TrackletView{t.box(), project(t.state, noise), tracklet_confidence(t, horizon),
                      t.last_update};
}

double mahalanobis_similarity(double squared_distance) {
  if (!(squared_distance >= 0.0)) {
    throw NumericFailure("squared Mahalanobis distance must be >= 0");
  }
  return std::max(0.0, 1.0 - squared_distance / kChi2Dof4Q999);
}

double mahalanobis_similarity(const BBox& detection, const Projection& tracklet) {
  return mahalanobis_similarity(squared_mahalanobis(tracklet, detection));
}

double shape_mismatch(const BBox& detection, const BBox& tracklet) {
  require_valid(detection, "shape_mismatch: detection");
  require_valid(tracklet, "shape_mismatch: tracklet");
  return (std::abs(detection.w - tracklet.w) + std::abs(detection.h - tracklet.h)) /
         std::max(detection.w, tracklet.w);
}

double shape_similarity(const BBox& detection, const BBox& tracklet, double pair_conf) {
  require_unit(pair_conf, "pair confidence");
  return pair_conf * std::exp(-shape_mismatch(detection, tracklet));
}

double pair_confidence(double detection_conf, double tracklet_conf, PairConfidenceRule rule) {
  require_unit(detection_conf, "detection confidence");
  require_unit(tracklet_conf, "tracklet confidence");
  if (rule == PairConfidenceRule::mean) return 0.5 * (detection_conf + tracklet_conf);
  return detection_conf * tracklet_conf;
}

SimilarityMatrix iou_matrix(std::span<const Detection> dets, std::span<const TrackletView> tracks) {
  return fill(dets, tracks,
              [](const Detection& d, const TrackletView& t) { return iou(d.box, t.box); });
}

SimilarityMatrix soft_biou_matrix(std::span<const Detection> dets,
                                  std::span<const TrackletView> tracks) {
  return fill(dets, tracks, [](const Detection& d, const TrackletView& t) {
    return soft_biou(d.box, t.box, t.confidence);
  });
}

SimilarityMatrix mahalanobis_matrix(std::span<const Detection> dets,
                                    std::span<const TrackletView> tracks) {
  return fill(dets, tracks, [](const Detection& d, const TrackletView& t) {
    return mahalanobis_similarity(d.box, t.projection);
  });
}

SimilarityMatrix pair_confidence_matrix(std::span<const Detection> dets,
                                        std::span<const TrackletView> tracks,
                                        PairConfidenceRule rule) {
  return fill(dets, tracks, [rule](const Detection& d, const TrackletView& t) {
    return pair_confidence(d.confidence, t.confidence, rule);
  });
}

SimilarityMatrix shape_matrix(std::span<const Detection> dets, std::span<const TrackletView> tracks,
                              const SimilarityMatrix& pair_conf) {
  SimilarityMatrix m(static_cast<Eigen::Index>(dets.size()),
                     static_cast<Eigen::Index>(tracks.size()));
  require_same_shape(m, pair_conf, "pair confidence");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = shape_similarity(dets[static_cast<std::size_t>(i)].box,
                                 tracks[static_cast<std::size_t>(j)].box, pair_conf(i, j));
    }
  }
  return m;
}

SimilarityMatrix combine_association(const SimilarityMatrix& iou, const SimilarityMatrix& pair_conf,
                                     const SimilarityMatrix& mahalanobis,
                                     const SimilarityMatrix& shape, const SimilarityWeights& w,
                                     const SimilarityMatrix* appearance) {
  w.validate();
  require_same_shape(iou, pair_conf, "pair confidence");
  require_same_shape(iou, mahalanobis, "mahalanobis");
  require_same_shape(iou, shape, "shape");
  SimilarityMatrix s = iou + w.iou * pair_conf.cwiseProduct(iou) + w.mahalanobis * mahalanobis +
                       w.shape * shape;
  if (appearance != nullptr && w.appearance != 0.0) {
    require_same_shape(iou, *appearance, "appearance");
    s += w.appearance * *appearance;
  }
  if (!s.allFinite()) throw NumericFailure("association similarity has non-finite entries");
  return s;
}

SimilarityMatrix association_similarity(std::span<const Detection> dets,
                                        std::span<const TrackletView> tracks,
                                        const SimilarityWeights& w, PairConfidenceRule rule,
                                        const SimilarityMatrix* appearance) {
  const SimilarityMatrix ious = iou_matrix(dets, tracks);
  const SimilarityMatrix conf = pair_confidence_matrix(dets, tracks, rule);
  const Eigen::Index n = ious.rows();
  const Eigen::Index m = ious.cols();
  const SimilarityMatrix mhd =
      w.mahalanobis != 0.0 ? mahalanobis_matrix(dets, tracks) : SimilarityMatrix::Zero(n, m);
  const SimilarityMatrix shape =
      w.shape != 0.0 ? shape_matrix(dets, tracks, conf) : SimilarityMatrix::Zero(n, m);
  return combine_association(ious, conf, mhd, shape, w, appearance);
}

SimilarityMatrix average_similarity(std::span<const SimilarityMatrix> measures) {
  if (measures.empty()) throw ContractError("average_similarity needs at least one measure");
  SimilarityMatrix sum = measures.front();
  for (std::size_t k = 1; k < measures.size(); ++k) {
    require_same_shape(sum, measures[k], "averaged measure");
    sum += measures[k];
  }
  return sum / static_cast<double>(measures.size());
}

SimilarityMatrix boost_similarity(std::span<const Detection> dets,
                                  std::span<const TrackletView> tracks) {
  const SimilarityMatrix ones = SimilarityMatrix::Ones(static_cast<Eigen::Index>(dets.size()),
                                                       static_cast<Eigen::Index>(tracks.size()));
  const SimilarityMatrix parts[] = {soft_biou_matrix(dets, tracks), mahalanobis_matrix(dets, tracks),
                                    shape_matrix(dets, tracks, ones)};
  return average_similarity(parts);
}

}  // namespace confboost
