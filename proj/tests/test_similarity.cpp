#include <gtest/gtest.h>

#include <cmath>

#include "confboost/errors.hpp"
#include "confboost/similarity.hpp"
#include "support.hpp"

namespace cb = confboost;
using cb::BBox;
using cb::SimilarityMatrix;

namespace {

cb::TrackletView view_of(const BBox& b, double confidence = 1.0, double pos_std = 5.0,
                         double ratio_std = 0.05) {
  cb::TrackletView v;
  v.box = b;
  v.projection.mean = cb::bbox_to_observation(b);
  v.projection.covariance =
      cb::ObsVector(pos_std * pos_std, pos_std * pos_std, pos_std * pos_std, ratio_std * ratio_std)
          .asDiagonal();
  v.confidence = confidence;
  v.last_update = 1;
  return v;
}

SimilarityMatrix filled(double v, int rows = 1, int cols = 1) {
  return SimilarityMatrix::Constant(rows, cols, v);
}

}  // namespace

TEST(MahalanobisSimilarity, OneAtZeroDistance) {
  const BBox b{10, 10, 20, 40};
  EXPECT_DOUBLE_EQ(cb::mahalanobis_similarity(b, view_of(b).projection), 1.0);
}

TEST(MahalanobisSimilarity, ZeroAtOrBeyondCutoff) {
  EXPECT_EQ(cb::mahalanobis_similarity(cb::kChi2Dof4Q999), 0.0);
  EXPECT_EQ(cb::mahalanobis_similarity(100.0), 0.0);
  EXPECT_NEAR(cb::mahalanobis_similarity(cb::kChi2Dof4Q999 / 2), 0.5, 1e-15);
}

TEST(MahalanobisSimilarity, SmallCovarianceModestOffsetIsNearZero) {
  // Static track with a tight estimate; the detection is shifted by 2 px
  // and still overlaps heavily.
  const BBox track{100, 100, 30, 80};
  const BBox det{102, 101, 30, 80};
  const auto v = view_of(track, 1.0, 0.5, 0.004);
  EXPECT_GT(cb::iou(det, track), 0.8);
  EXPECT_LT(cb::mahalanobis_similarity(det, v.projection), 0.05);
}

TEST(MahalanobisSimilarity, MonotoneAlongARay) {
  cb::testing::Gen g(31);
  const BBox track{0, 0, 40, 100};
  const auto v = view_of(track, 1.0, 4.0, 0.03);
  for (int k = 0; k < 200; ++k) {
    const double dx = g.uniform(-1, 1), dy = g.uniform(-1, 1), dh = g.uniform(-1, 1);
    double prev = 2.0;
    for (double t = 0.0; t <= 20.0; t += 0.5) {
      const double h = 100 + t * dh;
      const BBox d = cb::from_center(20 + t * dx, 50 + t * dy, 0.4 * h, h);
      const double s = cb::mahalanobis_similarity(d, v.projection);
      EXPECT_LE(s, prev + 1e-15);
      prev = s;
    }
  }
}

TEST(ShapeMismatch, Examples) {
  EXPECT_EQ(cb::shape_mismatch({0, 0, 3, 7}, {5, 5, 3, 7}), 0.0);
  EXPECT_DOUBLE_EQ(cb::shape_mismatch({0, 0, 2, 4}, {0, 0, 4, 4}), 0.5);
  EXPECT_DOUBLE_EQ(cb::shape_mismatch({0, 0, 6, 12}, {0, 0, 12, 12}), 0.5);
  EXPECT_THROW(cb::shape_mismatch({0, 0, 0, 4}, {0, 0, 4, 4}), cb::InvalidGeometry);
}

TEST(ShapeMismatch, ScaleInvariant) {
  cb::testing::Gen g(32);
  for (int k = 0; k < 500; ++k) {
    const BBox a = g.box(), b = g.box();
    const double s = g.uniform(0.1, 10.0);
    EXPECT_NEAR(cb::shape_mismatch(a, b),
                cb::shape_mismatch({0, 0, a.w * s, a.h * s}, {0, 0, b.w * s, b.h * s}), 1e-12);
  }
}

TEST(ShapeSimilarity, Examples) {
  EXPECT_DOUBLE_EQ(cb::shape_similarity({0, 0, 4, 4}, {1, 1, 4, 4}, 1.0), 1.0);
  EXPECT_NEAR(cb::shape_similarity({0, 0, 2, 4}, {0, 0, 4, 4}, 1.0), 0.6065306597126334, 1e-15);
  EXPECT_EQ(cb::shape_similarity({0, 0, 2, 9}, {0, 0, 4, 4}, 0.0), 0.0);
}

TEST(PairConfidence, ProductAndMean) {
  EXPECT_EQ(cb::pair_confidence(1.0, 1.0), 1.0);
  EXPECT_EQ(cb::pair_confidence(0.0, 0.7), 0.0);
  EXPECT_DOUBLE_EQ(cb::pair_confidence(0.8, 0.5), 0.4);
  EXPECT_DOUBLE_EQ(cb::pair_confidence(0.8, 0.5, cb::PairConfidenceRule::mean), 0.65);
  EXPECT_THROW(cb::pair_confidence(1.2, 0.5), cb::InvalidConfidence);
  EXPECT_THROW(cb::pair_confidence(0.5, -0.5), cb::InvalidConfidence);
}

TEST(AssociationSimilarity, PluggedComponents) {
  const cb::SimilarityWeights w;
  const auto s = cb::combine_association(filled(0.5), filled(1.0), filled(1.0), filled(1.0), w);
  EXPECT_DOUBLE_EQ(s(0, 0), 1.25);
  const auto z = cb::combine_association(filled(0.0), filled(0.7), filled(0.0), filled(0.0), w);
  EXPECT_EQ(z(0, 0), 0.0);
}

TEST(AssociationSimilarity, ZeroWeightsGiveIou) {
  cb::testing::Gen g(33);
  std::vector<cb::Detection> dets;
  std::vector<cb::TrackletView> views;
  for (int k = 0; k < 5; ++k) dets.push_back(g.detection());
  for (int k = 0; k < 4; ++k) views.push_back(view_of(g.near(dets[k].box), g.uniform()));
  const cb::SimilarityWeights zero{0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(cb::association_similarity(dets, views, zero), cb::iou_matrix(dets, views));
}

TEST(AssociationSimilarity, LinearInEachWeight) {
  const SimilarityMatrix iou = filled(0.6, 2, 3), conf = filled(0.5, 2, 3);
  const SimilarityMatrix mhd = filled(0.3, 2, 3), shape = filled(0.8, 2, 3);
  auto at = [&](double li, double lm, double ls) {
    return cb::combine_association(iou, conf, mhd, shape, {li, lm, ls, 0.0})(1, 2);
  };
  const double base = at(0, 0, 0);
  EXPECT_NEAR(at(0.7, 0, 0) - base, 0.7 * (at(1, 0, 0) - base), 1e-15);
  EXPECT_NEAR(at(0, 0.4, 0) - base, 0.4 * (at(0, 1, 0) - base), 1e-15);
  EXPECT_NEAR(at(0, 0, 0.9) - base, 0.9 * (at(0, 0, 1) - base), 1e-15);
  EXPECT_NEAR(at(0.7, 0.4, 0.9), at(0.7, 0, 0) + at(0, 0.4, 0) + at(0, 0, 0.9) - 2 * base, 1e-15);
}

TEST(AssociationSimilarity, AppearanceTermAdds) {
  const SimilarityMatrix app = filled(0.4);
  const auto s = cb::combine_association(filled(0.5), filled(1.0), filled(1.0), filled(1.0),
                                         {0.5, 0.25, 0.25, 0.5}, &app);
  EXPECT_DOUBLE_EQ(s(0, 0), 1.45);
}

TEST(AssociationSimilarity, ShapeMismatchIsContractError) {
  EXPECT_THROW(cb::combine_association(filled(0.5, 2, 2), filled(1.0, 2, 2), filled(1.0, 2, 1),
                                       filled(1.0, 2, 2), {}),
               cb::ContractError);
}

TEST(BoostSimilarity, MeanOfComponents) {
  const SimilarityMatrix parts[] = {filled(0.77), filled(0.96), filled(0.82)};
  EXPECT_NEAR(cb::average_similarity(parts)(0, 0), 0.85, 1e-15);
  const SimilarityMatrix ones[] = {filled(1), filled(1), filled(1)};
  EXPECT_EQ(cb::average_similarity(ones)(0, 0), 1.0);
  const SimilarityMatrix zeros[] = {filled(0), filled(0), filled(0)};
  EXPECT_EQ(cb::average_similarity(zeros)(0, 0), 0.0);
}

TEST(BoostSimilarity, IdenticalBoxFullConfidenceIsOne) {
  const BBox b{5, 5, 20, 50};
  const std::vector<cb::Detection> dets{{b, 0.2, 1}};
  const std::vector<cb::TrackletView> views{view_of(b)};
  EXPECT_NEAR(cb::boost_similarity(dets, views)(0, 0), 1.0, 1e-15);
}

TEST(BoostSimilarity, BetweenComponentExtremes) {
  cb::testing::Gen g(34);
  for (int k = 0; k < 10000; ++k) {
    const cb::Detection d{g.box(), g.uniform(), 1};
    const auto v = view_of(g.coin() ? g.near(d.box) : g.box(), g.uniform(), g.uniform(1, 10),
                           g.uniform(0.01, 0.2));
    const std::vector<cb::Detection> dets{d};
    const std::vector<cb::TrackletView> views{v};
    const double a = cb::soft_biou(d.box, v.box, v.confidence);
    const double m = cb::mahalanobis_similarity(d.box, v.projection);
    const double s = cb::shape_similarity(d.box, v.box, 1.0);
    const double got = cb::boost_similarity(dets, views)(0, 0);
    EXPECT_GE(got, std::min({a, m, s}) - 1e-15);
    EXPECT_LE(got, std::max({a, m, s}) + 1e-15);
  }
}

TEST(BoostSimilarity, ShapeTermWithUnitPairConfidenceDominates) {
  cb::testing::Gen g(35);
  for (int k = 0; k < 1000; ++k) {
    const cb::Detection d{g.box(), g.uniform(), 1};
    const auto v = view_of(g.near(d.box), g.uniform());
    const std::vector<cb::Detection> dets{d};
    const std::vector<cb::TrackletView> views{v};
    const auto conf = cb::pair_confidence_matrix(dets, views, cb::PairConfidenceRule::product);
    const auto boosted = cb::shape_matrix(dets, views, SimilarityMatrix::Ones(1, 1));
    EXPECT_GE(boosted(0, 0), cb::shape_matrix(dets, views, conf)(0, 0));
  }
}

TEST(Matrices, DimensionsFollowInputs) {
  cb::testing::Gen g(36);
  std::vector<cb::Detection> dets(3, g.detection());
  std::vector<cb::TrackletView> views(5, view_of(g.box()));
  for (const auto& m : {cb::iou_matrix(dets, views), cb::soft_biou_matrix(dets, views),
                        cb::mahalanobis_matrix(dets, views), cb::boost_similarity(dets, views),
                        cb::association_similarity(dets, views, {})}) {
    EXPECT_EQ(m.rows(), 3);
    EXPECT_EQ(m.cols(), 5);
    EXPECT_TRUE(m.allFinite());
  }
  EXPECT_EQ(cb::iou_matrix(dets, {}).cols(), 0);
}

TEST(TrackletConfidence, LinearDecay) {
  EXPECT_EQ(cb::tracklet_confidence(0, 30), 1.0);
  EXPECT_EQ(cb::tracklet_confidence(30, 30), 0.0);
  EXPECT_EQ(cb::tracklet_confidence(45, 30), 0.0);
  EXPECT_DOUBLE_EQ(cb::tracklet_confidence(15, 30), 0.5);
  double prev = 1.0;
  for (int lu = 0; lu < 40; ++lu) {
    EXPECT_LE(cb::tracklet_confidence(lu, 30), prev);
    prev = cb::tracklet_confidence(lu, 30);
  }
}
