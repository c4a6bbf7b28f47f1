#include <gtest/gtest.h>

#include "confboost/dataio.hpp"
#include "confboost/errors.hpp"
#include "confboost/metrics.hpp"
#include "confboost/simulate.hpp"

namespace cb = confboost;

namespace {

cb::SceneConfig quiet_scene() {
  cb::SceneConfig sc;
  sc.frames = 60;
  sc.position_noise = 0.0;
  sc.size_noise = 0.0;
  sc.conf_min = sc.conf_max = 0.8;
  sc.occlusions_per_object = 0;
  sc.ghosts = 0;
  return sc;
}

const cb::TrackRecord* find_gt(const cb::Scene& s, int frame, int id) {
  for (const auto& r : s.ground_truth) {
    if (r.frame == frame && r.id == id) return &r;
  }
  return nullptr;
}

}  // namespace

TEST(Simulate, NoiselessDetectionsEqualGroundTruth) {
  const auto sc = quiet_scene();
  const auto s = cb::generate(sc);
  EXPECT_EQ(s.ground_truth.size(), static_cast<std::size_t>(sc.objects * sc.frames));
  for (const auto& [f, dets] : s.detections) {
    const auto& labels = s.labels.at(f);
    ASSERT_EQ(labels.size(), dets.size());
    for (std::size_t k = 0; k < dets.size(); ++k) {
      EXPECT_EQ(labels[k].kind, cb::DetectionKind::regular);
      const auto* g = find_gt(s, f, labels[k].source);
      ASSERT_NE(g, nullptr);
      EXPECT_EQ(dets[k].box, g->box);
      EXPECT_EQ(dets[k].confidence, 0.8);
      EXPECT_EQ(dets[k].frame, f);
    }
  }
}

TEST(Simulate, BoxesStayInsideTheField) {
  cb::SceneConfig sc;
  sc.speed_min = 10;
  sc.speed_max = 20;
  const auto s = cb::generate(sc);
  for (const auto& r : s.ground_truth) {
    EXPECT_GE(r.box.x, 0.0);
    EXPECT_GE(r.box.y, 0.0);
    EXPECT_LE(r.box.x + r.box.w, sc.width + 1e-9);
    EXPECT_LE(r.box.y + r.box.h, sc.height + 1e-9);
  }
}

TEST(Simulate, DipsStayLowAndOverlapTheirObject) {
  cb::SceneConfig sc;
  sc.position_noise = 4.0;
  sc.size_noise = 4.0;
  const auto s = cb::generate(sc);
  long dips = 0, ghosts = 0;
  for (const auto& [f, dets] : s.detections) {
    const auto& labels = s.labels.at(f);
    for (std::size_t k = 0; k < dets.size(); ++k) {
      if (labels[k].kind == cb::DetectionKind::occlusion_dip) {
        ++dips;
        EXPECT_GE(dets[k].confidence, sc.dip_conf_min);
        EXPECT_LE(dets[k].confidence, sc.dip_conf_max);
        EXPECT_LT(dets[k].confidence, sc.tau);
        EXPECT_GT(cb::iou(dets[k].box, find_gt(s, f, labels[k].source)->box), 0.5);
      } else if (labels[k].kind == cb::DetectionKind::ghost) {
        ++ghosts;
        EXPECT_GE(dets[k].confidence, sc.ghost_conf_min);
        EXPECT_LE(dets[k].confidence, sc.ghost_conf_max);
        EXPECT_LT(labels[k].source, sc.ghosts);
      } else {
        EXPECT_GE(dets[k].confidence, sc.conf_min);
        EXPECT_LE(dets[k].confidence, sc.conf_max);
      }
    }
  }
  EXPECT_GT(dips, 0);
  EXPECT_EQ(ghosts, static_cast<long>(sc.ghosts) * sc.frames);
  EXPECT_EQ(s.ghost_sites.size(), static_cast<std::size_t>(sc.ghosts));
}

TEST(Simulate, MissRateDropsRegularDetections) {
  auto sc = quiet_scene();
  sc.miss_rate = 1.0;
  const auto s = cb::generate(sc);
  for (const auto& [f, dets] : s.detections) EXPECT_TRUE(dets.empty());
}

TEST(Simulate, DeterministicInSeed) {
  cb::SceneConfig sc;
  sc.frames = 100;
  const auto a = cb::generate(sc);
  const auto b = cb::generate(sc);
  EXPECT_EQ(cb::format_results(a.ground_truth), cb::format_results(b.ground_truth));
  ASSERT_EQ(a.detections.size(), b.detections.size());
  for (const auto& [f, d] : a.detections) {
    ASSERT_EQ(d.size(), b.detections.at(f).size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      EXPECT_EQ(d[k].box, b.detections.at(f)[k].box);
      EXPECT_EQ(d[k].confidence, b.detections.at(f)[k].confidence);
    }
  }
  sc.seed = 2;
  EXPECT_NE(cb::format_results(cb::generate(sc).ground_truth), cb::format_results(a.ground_truth));
}

TEST(Simulate, ValidationNamesTheField) {
  auto field_of = [](cb::SceneConfig sc) {
    try {
      sc.validate();
    } catch (const cb::ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  cb::SceneConfig sc;
  EXPECT_EQ(field_of(sc), "<none>");
  auto bad = sc;
  bad.dip_conf_max = 0.7;
  EXPECT_EQ(field_of(bad), "dip_conf_max");
  bad = sc;
  bad.box_h_max = 2000;
  EXPECT_EQ(field_of(bad), "box_h_max");
  bad = sc;
  bad.miss_rate = 1.5;
  EXPECT_EQ(field_of(bad), "miss_rate");
  bad = sc;
  bad.objects = -1;
  EXPECT_EQ(field_of(bad), "objects");
}

TEST(SceneConfigText, ParseFormatRoundTrip) {
  const auto sc = cb::parse_scene_config("objects = 5\nframes = 42\nposition_noise = 0.3\nseed = 77\n");
  EXPECT_EQ(sc.objects, 5);
  EXPECT_EQ(sc.frames, 42);
  EXPECT_EQ(sc.position_noise, 0.3);
  EXPECT_EQ(sc.seed, 77u);
  const auto text = cb::format_scene_config(sc);
  EXPECT_EQ(cb::format_scene_config(cb::parse_scene_config(text)), text);
  EXPECT_THROW(cb::parse_scene_config("objects = 1\nobjects = 2"), cb::ConfigError);
  EXPECT_THROW(cb::parse_scene_config("speed = 1"), cb::ConfigError);
  EXPECT_THROW(cb::parse_scene_config("frames = many"), cb::ConfigError);
}

TEST(IouStudy, FreshTrackletsPredictWell) {
  auto sc = quiet_scene();
  sc.position_noise = 0.5;
  const auto rows = cb::iou_decay_study(cb::generate(sc), cb::TrackerConfig{});
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front().last_update, 1);
  EXPECT_GT(rows.front().mean, 0.9);
  for (const auto& r : rows) EXPECT_GT(r.count, 0);
}

TEST(IouStudy, OverlapDecaysWithFramesSinceUpdate) {
  cb::SceneConfig sc;
  sc.frames = 400;
  sc.objects = 12;
  sc.position_noise = 2.0;
  sc.size_noise = 2.0;
  sc.occlusion_min_frames = 15;
  sc.occlusion_max_frames = 30;
  sc.occlusions_per_object = 3;
  sc.ghosts = 0;
  cb::TrackerConfig cfg;
  cfg.boost.use_dlo = false;  // dips are dropped, so tracklets coast
  const auto rows = cb::iou_decay_study(cb::generate(sc), cfg);
  const cb::IouBucket* first = nullptr;
  const cb::IouBucket* late = nullptr;
  for (const auto& r : rows) {
    if (r.last_update == 1) first = &r;
    if (r.last_update == 20) late = &r;
  }
  ASSERT_NE(first, nullptr);
  ASSERT_NE(late, nullptr);
  EXPECT_LT(late->q90, first->q90);
  EXPECT_LT(late->mean, first->mean);
  const auto text = cb::format_iou_table(rows);
  EXPECT_EQ(text.rfind("last_update,count,mean_iou,q90_iou\n", 0), 0u);
}

TEST(IouStudy, TableFromHandMadeResults) {
  std::vector<cb::FrameResult> frames(1);
  for (double v : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    cb::MatchInfo m;
    m.last_update = 3;
    m.iou = v;
    frames[0].diagnostics.matches.push_back(m);
  }
  const auto rows = cb::iou_decay_table(frames);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].last_update, 3);
  EXPECT_EQ(rows[0].count, 10);
  EXPECT_NEAR(rows[0].mean, 0.55, 1e-12);
  EXPECT_NEAR(rows[0].q90, 0.91, 1e-12);
}
