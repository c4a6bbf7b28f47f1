#include <gtest/gtest.h>

#include <cmath>

#include "confboost/boost.hpp"
#include "confboost/errors.hpp"
#include "support.hpp"

namespace cb = confboost;
using cb::SimilarityMatrix;

namespace {

SimilarityMatrix row(std::initializer_list<double> v) {
  SimilarityMatrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index j = 0;
  for (double x : v) m(0, j++) = x;
  return m;
}

std::vector<double> one(double c) { return {c}; }

cb::BoostConfig flags(bool s, bool sb, bool vt) {
  cb::BoostConfig c;
  c.use_s = s;
  c.use_sb = sb;
  c.use_vt = vt;
  return c;
}

cb::TrackletView view_at(const cb::BBox& b, int last_update, double pos_std) {
  cb::TrackletView v;
  v.box = b;
  v.projection.mean = cb::bbox_to_observation(b);
  v.projection.covariance =
      cb::ObsVector(pos_std * pos_std, pos_std * pos_std, pos_std * pos_std, 0.01).asDiagonal();
  v.confidence = cb::tracklet_confidence(last_update, 30);
  v.last_update = last_update;
  return v;
}

}  // namespace

TEST(DloBoost, Examples) {
  EXPECT_NEAR(cb::dlo_boost(one(0.3), row({0.9}), 0.65)[0], 0.585, 1e-15);
  EXPECT_EQ(cb::dlo_boost(one(0.3), row({0.0}), 0.65)[0], 0.3);
  EXPECT_EQ(cb::dlo_boost(one(0.3), SimilarityMatrix(1, 0), 0.65)[0], 0.3);
}

TEST(DloBoost, ImpliedIouToClearThreshold) {
  EXPECT_NEAR(0.6 / 0.65, 0.923, 5e-4);
  EXPECT_NEAR(0.4 / 0.5, 0.8, 1e-15);
  // Just above the implied IoU the boost reaches tau; just below it does not.
  EXPECT_GE(cb::dlo_boost(one(0.1), row({0.6 / 0.65 + 1e-9}), 0.65)[0], 0.6);
  EXPECT_LT(cb::dlo_boost(one(0.1), row({0.6 / 0.65 - 1e-9}), 0.65)[0], 0.6);
}

TEST(SoftBoost, Examples) {
  const double got = cb::soft_boost(one(0.56), row({0.82}), 0.65, 1.5)[0];
  EXPECT_NEAR(got, 0.65 * 0.56 + 0.35 * std::pow(0.82, 1.5), 1e-15);
  EXPECT_NEAR(got, 0.623889, 1e-6);
  EXPECT_GT(got, 0.6);
  EXPECT_EQ(cb::soft_boost(one(0.4), row({0.99}), 1.0, 1.5)[0], 0.4);
  EXPECT_NEAR(cb::soft_boost(one(0.0), row({1.0}), 0.65, 1.5)[0], 0.35, 1e-15);
}

TEST(SoftBoost, LargerExponentNeverBoostsMore) {
  cb::testing::Gen g(41);
  for (int k = 0; k < 2000; ++k) {
    const double c = g.uniform(), s = g.uniform(), a = g.uniform();
    const double q2 = g.uniform(1.0, 3.0), q1 = q2 + g.uniform(0.0, 2.0);
    EXPECT_LE(cb::soft_boost(one(c), row({s}), a, q1)[0], cb::soft_boost(one(c), row({s}), a, q2)[0]);
  }
}

TEST(SoftBoost, MonotoneInConfidenceAndSimilarity) {
  cb::testing::Gen g(42);
  for (int k = 0; k < 2000; ++k) {
    const double c = g.uniform(), s = g.uniform(), dc = g.uniform(0, 1 - c), ds = g.uniform(0, 1 - s);
    const double base = cb::soft_boost(one(c), row({s}), 0.65, 1.5)[0];
    EXPECT_LE(base, cb::soft_boost(one(c + dc), row({s}), 0.65, 1.5)[0]);
    EXPECT_LE(base, cb::soft_boost(one(c), row({s + ds}), 0.65, 1.5)[0]);
  }
}

TEST(VaryingThreshold, Endpoints) {
  const cb::BoostConfig cfg;
  EXPECT_EQ(cb::varying_threshold(1, cfg), 0.95);
  EXPECT_EQ(cb::varying_threshold(21, cfg), 0.8);
  EXPECT_EQ(cb::varying_threshold(27, cfg), 0.8);
  EXPECT_NEAR(cb::varying_threshold(11, cfg), 0.875, 1e-15);
  EXPECT_THROW(cb::varying_threshold(0, cfg), cb::InvalidState);
}

TEST(VaryingThreshold, MonotoneAndClamped) {
  cb::testing::Gen g(43);
  for (int k = 0; k < 200; ++k) {
    cb::BoostConfig cfg;
    cfg.beta_low = g.uniform(0.0, 0.9);
    cfg.beta_high = g.uniform(cfg.beta_low, 1.0);
    cfg.gamma = g.uniform(0.0, 0.05);
    double prev = 2.0;
    for (int lu = 1; lu < 200; ++lu) {
      const double b = cb::varying_threshold(lu, cfg);
      EXPECT_LE(b, prev);
      EXPECT_GE(b, cfg.beta_low);
      EXPECT_LE(b, cfg.beta_high);
      prev = b;
    }
  }
}

TEST(VtBoost, Examples) {
  const cb::BoostConfig cfg;
  const std::vector<int> stale{27};
  EXPECT_EQ(cb::vt_boost(one(0.35), row({0.83}), stale, cfg)[0], 0.6);
  const std::vector<int> fresh{1};
  EXPECT_EQ(cb::vt_boost(one(0.35), row({0.83}), fresh, cfg)[0], 0.35);
  EXPECT_EQ(cb::vt_boost(one(0.9), row({0.99}), fresh, cfg)[0], 0.9);
}

TEST(VtBoost, AnyQualifyingTrackletSuffices) {
  const cb::BoostConfig cfg;
  const std::vector<int> last{1, 30};
  EXPECT_EQ(cb::vt_boost(one(0.2), row({0.9, 0.81}), last, cfg)[0], 0.6);
  EXPECT_EQ(cb::vt_boost(one(0.2), row({0.9, 0.79}), last, cfg)[0], 0.2);
}

TEST(VtBoost, RejectsMismatchedTrackletCount) {
  const std::vector<int> last{1};
  EXPECT_THROW(cb::vt_boost(one(0.2), row({0.9, 0.8}), last, cb::BoostConfig{}), cb::ContractError);
}

TEST(IdcBoost, FlagsOffIsPlainDlo) {
  cb::testing::Gen g(44);
  const auto cfg = flags(false, false, false);
  for (int k = 0; k < 500; ++k) {
    const double c = g.uniform(), s = g.uniform();
    const std::vector<int> last{g.integer(1, 40)};
    EXPECT_EQ(cb::idc_boost(one(c), row({s}), last, cfg)[0], std::max(c, 0.65 * s));
  }
}

TEST(IdcBoost, AllFlagsComposeSoftThenThreshold) {
  // Two detections, two tracklets, traced by hand.
  SimilarityMatrix s(2, 2);
  s << 0.70, 0.84,
       0.30, 0.96;
  const std::vector<int> last{1, 15};   // thresholds 0.95 and 0.845
  const std::vector<double> conf{0.5, 0.1};
  const auto out = cb::idc_boost(conf, s, last, flags(true, true, true));
  // Detection 0: soft boost gives 0.325 + 0.35 * 0.84^1.5; no entry clears
  // its tracklet's threshold, so the soft value stands.
  EXPECT_NEAR(out[0], 0.65 * 0.5 + 0.35 * std::pow(0.84, 1.5), 1e-15);
  EXPECT_LT(out[0], 0.6);
  // Detection 1: soft boost to 0.065 + 0.35 * 0.96^1.5, then 0.96 >= 0.845
  // lifts it to tau.
  EXPECT_EQ(out[1], 0.6);
}

TEST(IdcBoost, UsesAveragedSimilarityWhenSelected) {
  const cb::BBox b{10, 10, 20, 50};
  const cb::BBox shifted{13, 10, 20, 50};
  const std::vector<cb::Detection> dets{{shifted, 0.3, 1}};
  const std::vector<cb::TrackletView> views{view_at(b, 1, 4.0)};
  const auto with_s = cb::idc_boost(dets, views, flags(true, false, false));
  const auto without = cb::idc_boost(dets, views, flags(false, false, false));
  EXPECT_NEAR(without[0], 0.65 * cb::iou(shifted, b), 1e-15);
  EXPECT_NEAR(with_s[0], 0.65 * cb::boost_similarity(dets, views)(0, 0), 1e-15);
}

TEST(IdcBoost, MonotoneAndBoundedForAllFlagCombinations) {
  cb::testing::Gen g(45);
  for (int k = 0; k < 10000; ++k) {
    const int n = g.integer(0, 4), m = g.integer(0, 4);
    SimilarityMatrix s(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) s(i, j) = g.uniform();
    std::vector<double> conf(static_cast<std::size_t>(n));
    for (auto& c : conf) c = g.uniform();
    std::vector<int> last(static_cast<std::size_t>(m));
    for (auto& l : last) l = g.integer(1, 40);
    for (int f = 0; f < 8; ++f) {
      const auto out = cb::idc_boost(conf, s, last, flags(f & 1, f & 2, f & 4));
      for (int i = 0; i < n; ++i) {
        EXPECT_GE(out[static_cast<std::size_t>(i)], conf[static_cast<std::size_t>(i)]);
        EXPECT_LE(out[static_cast<std::size_t>(i)], 1.0);
      }
    }
  }
}

TEST(NoveltyBoost, OutliersRaisedToTau) {
  cb::BoostConfig cfg;
  const cb::BBox b{100, 100, 20, 50};
  const std::vector<cb::TrackletView> views{view_at(b, 1, 3.0)};
  const std::vector<cb::Detection> dets{{b, 0.2, 1}, {{400, 400, 20, 50}, 0.2, 1}, {{400, 400, 20, 50}, 0.9, 1}};
  const auto out = cb::mahalanobis_novelty_boost(dets, views, cfg);
  EXPECT_EQ(out[0], 0.2);
  EXPECT_EQ(out[1], 0.6);
  EXPECT_EQ(out[2], 0.9);
  EXPECT_EQ(cb::mahalanobis_novelty_boost(dets, {}, cfg)[1], 0.2);
}

TEST(BoostConfidences, NoTrackletsMeansNoBoost) {
  const std::vector<cb::Detection> dets{{{0, 0, 10, 20}, 0.1, 1}};
  cb::BoostConfig cfg;
  cfg.use_novelty = true;
  EXPECT_EQ(cb::boost_confidences(dets, {}, cfg)[0], 0.1);
}

TEST(BoostConfidences, DisabledLikelyObjectBoost) {
  const cb::BBox b{0, 0, 10, 20};
  const std::vector<cb::Detection> dets{{b, 0.1, 1}};
  const std::vector<cb::TrackletView> views{view_at(b, 1, 2.0)};
  cb::BoostConfig cfg;
  cfg.use_dlo = false;
  EXPECT_EQ(cb::boost_confidences(dets, views, cfg)[0], 0.1);
  cfg.use_dlo = true;
  EXPECT_GT(cb::boost_confidences(dets, views, cfg)[0], 0.1);
}

TEST(BoostConfig, Validation) {
  cb::BoostConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.q = 0.5;
  EXPECT_THROW(cfg.validate(), cb::ContractError);
  cfg = {};
  cfg.beta_low = 0.96;
  EXPECT_THROW(cfg.validate(), cb::ContractError);
  cfg = {};
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.validate(), cb::ContractError);
  cfg = {};
  cfg.gamma = -0.1;
  EXPECT_THROW(cfg.validate(), cb::ContractError);
}

TEST(BoostInputs, OutOfRangeConfidenceRejected) {
  EXPECT_THROW(cb::dlo_boost(one(1.5), row({0.5}), 0.65), cb::InvalidConfidence);
  EXPECT_THROW(cb::soft_boost(one(-0.1), row({0.5}), 0.65, 1.5), cb::InvalidConfidence);
}
