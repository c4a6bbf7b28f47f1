#include "confboost/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "confboost/association.hpp"
#include "confboost/errors.hpp"

namespace confboost {

double tracklet_confidence(int last_update, int horizon) {
  if (horizon <= 0) return last_update <= 0 ? 1.0 : 0.0;
  return std::clamp(1.0 - static_cast<double>(last_update) / horizon, 0.0, 1.0);
}

void TrackerConfig::validate() const {
  boost.validate();
  weights.validate();
  noise.validate();
  if (!(tau_s >= 0.0) || !std::isfinite(tau_s)) throw ContractError("tau_s must be >= 0");
  const double ti = creation_threshold();
  if (!(ti >= 0.0 && ti <= 1.0)) throw ContractError("tau_init must lie in [0,1]");
  if (max_age < 0) throw ContractError("max_age must be >= 0");
  if (min_hits < 1) throw ContractError("min_hits must be >= 1");
  if (horizon < 1) throw ContractError("horizon must be >= 1");
  if (interpolate_gap < 0) throw ContractError("interpolate_gap must be >= 0");
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void Tracker::set_config(TrackerConfig cfg) {
  cfg.validate();
  cfg_ = std::move(cfg);
}

void Tracker::predict_all(int steps) {
  for (auto& t : tracklets_) {
    for (int k = 0; k < steps; ++k) {
      // Keep height and ratio positive: drop a velocity that would flip them.
      auto& m = t.state.mean;
      if (m(2) + m(6) <= 0.0) m(6) = 0.0;
      if (m(3) + m(7) <= 0.0) m(7) = 0.0;
      t.state = predict(t.state, cfg_.noise);
      ++t.last_update;
      ++t.age;
    }
  }
}

FrameResult Tracker::step(int frame, std::span<const Detection> dets,
                          const AppearanceFrame* appearance) {
  if (frame <= last_frame_) {
    throw SequencingError("frame " + std::to_string(frame) + " does not follow frame " +
                          std::to_string(last_frame_));
  }
  const int steps = last_frame_ == 0 ? 1 : frame - last_frame_;
  last_frame_ = frame;

  FrameResult result;
  result.frame = frame;
  auto& diag = result.diagnostics;

  predict_all(steps);

  std::vector<TrackletView> views;
  views.reserve(tracklets_.size());
  for (const auto& t : tracklets_) views.push_back(make_view(t, cfg_.noise, cfg_.horizon));

  diag.boosted = boost_confidences(dets, views, cfg_.boost);
  diag.kept.assign(dets.size(), 0);
  diag.track_of.assign(dets.size(), -1);

  std::vector<Detection> kept;
  std::vector<int> kept_index;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    // Boosts may lift a detection to exactly tau, which keeps it.
    if (diag.boosted[i] >= cfg_.boost.tau) {
      diag.kept[i] = 1;
      kept.push_back(dets[i]);
      kept.back().confidence = diag.boosted[i];
      kept_index.push_back(static_cast<int>(i));
    }
  }

  SimilarityMatrix app;
  const SimilarityMatrix* app_ptr = nullptr;
  if (appearance != nullptr && cfg_.weights.appearance != 0.0) {
    app = SimilarityMatrix::Zero(static_cast<Eigen::Index>(kept.size()),
                                 static_cast<Eigen::Index>(views.size()));
    std::unordered_map<int, int> row_of;
    for (std::size_t k = 0; k < kept_index.size(); ++k) row_of[kept_index[k]] = static_cast<int>(k);
    std::unordered_map<int, int> col_of;
    for (std::size_t j = 0; j < tracklets_.size(); ++j) col_of[tracklets_[j].id] = static_cast<int>(j);
    for (const auto& e : *appearance) {
      const auto r = row_of.find(e.det_index);
      const auto c = col_of.find(e.track_id);
      if (r != row_of.end() && c != col_of.end()) app(r->second, c->second) = e.value;
    }
    app_ptr = &app;
  }

  const SimilarityMatrix sim =
      association_similarity(kept, views, cfg_.weights, cfg_.pair_rule, app_ptr);
  const Assignment assignment = associate(sim, cfg_.tau_s);

  std::vector<double> score(tracklets_.size(), 0.0);
  std::vector<char> updated(tracklets_.size(), 0);
  for (const auto& [k, j] : assignment.matches) {
    auto& t = tracklets_[static_cast<std::size_t>(j)];
    const Detection& d = kept[static_cast<std::size_t>(k)];
    const int det_index = kept_index[static_cast<std::size_t>(k)];
    diag.matches.push_back(MatchInfo{det_index, t.id, t.last_update, iou(d.box, views[j].box)});
    diag.track_of[det_index] = t.id;
    t.state = update(t.state, d.box, cfg_.noise);
    t.last_update = 0;
    ++t.hits;
    ++t.hit_streak;
    if (t.status == TrackStatus::tentative && t.hit_streak >= cfg_.min_hits) {
      t.status = TrackStatus::confirmed;
    }
    score[static_cast<std::size_t>(j)] = d.confidence;
    updated[static_cast<std::size_t>(j)] = 1;
  }

  for (std::size_t j = 0; j < tracklets_.size(); ++j) {
    if (updated[j]) continue;
    auto& t = tracklets_[j];
    t.hit_streak = 0;
    if (t.status == TrackStatus::tentative || t.last_update > cfg_.max_age) {
      t.status = TrackStatus::removed;
    }
  }

  const double creation = cfg_.creation_threshold();
  for (int k : assignment.unmatched_detections) {
    const Detection& d = kept[static_cast<std::size_t>(k)];
    if (!(d.confidence > creation)) continue;
    Tracklet t;
    t.id = next_id_++;
    t.state = initiate(d.box, cfg_.noise);
    t.last_update = 0;
    t.hits = 1;
    t.hit_streak = 1;
    t.status = cfg_.min_hits <= 1 ? TrackStatus::confirmed : TrackStatus::tentative;
    diag.track_of[kept_index[static_cast<std::size_t>(k)]] = t.id;
    diag.created.push_back(t.id);
    tracklets_.push_back(std::move(t));
    score.push_back(d.confidence);
    updated.push_back(1);
  }

  for (std::size_t j = 0; j < tracklets_.size(); ++j) {
    const auto& t = tracklets_[j];
    if (updated[j] && t.status == TrackStatus::confirmed) {
      result.records.push_back(TrackRecord{frame, t.id, t.box(), score[j]});
    }
  }
  std::erase_if(tracklets_, [](const Tracklet& t) { return t.status == TrackStatus::removed; });
  std::sort(result.records.begin(), result.records.end(),
            [](const TrackRecord& a, const TrackRecord& b) { return a.id < b.id; });
  return result;
}

std::vector<FrameResult> run_sequence(const DetectionStream& stream, const TrackerConfig& cfg,
                                      const AppearanceStream* appearance) {
  std::vector<FrameResult> results;
  if (stream.empty()) return results;
  Tracker tracker(cfg);
  const int first = std::max(1, stream.begin()->first);
  const int last = stream.rbegin()->first;
  if (stream.begin()->first < 1) {
    throw SequencingError("frame indices start at 1, got " + std::to_string(stream.begin()->first));
  }
  static const std::vector<Detection> none;
  results.reserve(static_cast<std::size_t>(last - first + 1));
  for (int f = first; f <= last; ++f) {
    const auto it = stream.find(f);
    const auto& dets = it == stream.end() ? none : it->second;
    const AppearanceFrame* app = nullptr;
    if (appearance != nullptr) {
      const auto a = appearance->find(f);
      if (a != appearance->end()) app = &a->second;
    }
    results.push_back(tracker.step(f, dets, app));
  }
  if (cfg.interpolate_gap > 0) {
    const auto records = flatten(results);
    const auto filled = interpolate_gaps(records, cfg.interpolate_gap);
    for (auto& r : results) r.records.clear();
    for (const auto& rec : filled) results[static_cast<std::size_t>(rec.frame - first)].records.push_back(rec);
    for (auto& r : results) {
      std::sort(r.records.begin(), r.records.end(),
                [](const TrackRecord& a, const TrackRecord& b) { return a.id < b.id; });
    }
  }
  return results;
}

std::vector<TrackRecord> flatten(std::span<const FrameResult> results) {
  std::vector<TrackRecord> out;
  for (const auto& r : results) out.insert(out.end(), r.records.begin(), r.records.end());
  return out;
}

std::vector<TrackRecord> interpolate_gaps(std::span<const TrackRecord> records, int max_gap) {
  std::map<int, std::vector<TrackRecord>> by_id;
  for (const auto& r : records) by_id[r.id].push_back(r);
  std::vector<TrackRecord> out(records.begin(), records.end());
  for (auto& [id, track] : by_id) {
    std::sort(track.begin(), track.end(),
              [](const TrackRecord& a, const TrackRecord& b) { return a.frame < b.frame; });
    for (std::size_t k = 1; k < track.size(); ++k) {
      const TrackRecord& a = track[k - 1];
      const TrackRecord& b = track[k];
      const int missing = b.frame - a.frame - 1;
      if (missing <= 0 || missing > max_gap) continue;
      for (int f = a.frame + 1; f < b.frame; ++f) {
        const double t = static_cast<double>(f - a.frame) / (b.frame - a.frame);
        auto lerp = [t](double u, double v) { return u + t * (v - u); };
        out.push_back(TrackRecord{f, id,
                                  BBox{lerp(a.box.x, b.box.x), lerp(a.box.y, b.box.y),
                                       lerp(a.box.w, b.box.w), lerp(a.box.h, b.box.h)},
                                  std::min(a.score, b.score)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

}  // namespace confboost
