#include "confboost/boost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confboost/errors.hpp"

namespace confboost {

namespace {

void check_unit(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ContractError(std::string("boost: ") + field + " must lie in [0,1], got " +
                        std::to_string(v));
  }
}

void check_rows(std::span<const double> conf, const SimilarityMatrix& s) {
  if (static_cast<Eigen::Index>(conf.size()) != s.rows()) {
    throw ContractError("boost: " + std::to_string(conf.size()) + " confidences for a " +
                        std::to_string(s.rows()) + "-row similarity matrix");
  }
  for (double c : conf) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw InvalidConfidence("detection confidence must lie in [0,1], got " + std::to_string(c));
    }
  }
}

double unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void BoostConfig::validate() const {
  check_unit(alpha, "alpha");
  check_unit(beta_high, "beta_high");
  check_unit(beta_low, "beta_low");
  check_unit(tau, "tau");
  if (!(beta_c >= 0.0) || !std::isfinite(beta_c)) {
    throw ContractError("boost: beta_c must be finite and >= 0");
  }
  if (!(q >= 1.0) || !std::isfinite(q)) throw ContractError("boost: q must be >= 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ContractError("boost: gamma must be >= 0");
  if (beta_low > beta_high) throw ContractError("boost: beta_low must not exceed beta_high");
  if (!(novelty_gate > 0.0)) throw ContractError("boost: novelty_gate must be > 0");
}

std::vector<double> row_max(const SimilarityMatrix& s) {
  std::vector<double> out(static_cast<std::size_t>(s.rows()), 0.0);
  if (s.cols() == 0) return out;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = s.row(i).maxCoeff();
  }
  return out;
}

std::vector<double> dlo_boost(std::span<const double> conf, const SimilarityMatrix& s,
                              double beta_c) {
  check_rows(conf, s);
  const auto best = row_max(s);
  std::vector<double> out(conf.begin(), conf.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = unit(std::max(out[i], beta_c * best[i]));
  }
  return out;
}

std::vector<double> soft_boost(std::span<const double> conf, const SimilarityMatrix& s,
                               double alpha, double q) {
  check_rows(conf, s);
  const auto best = row_max(s);
  std::vector<double> out(conf.begin(), conf.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double sim = unit(best[i]);
    out[i] = unit(std::max(out[i], alpha * out[i] + (1.0 - alpha) * std::pow(sim, q)));
  }
  return out;
}

double varying_threshold(int last_update, const BoostConfig& cfg) {
  if (last_update < 1) {
    throw InvalidState("varying threshold needs last_update >= 1, got " +
                       std::to_string(last_update));
  }
  return std::max(cfg.beta_low, cfg.beta_high - cfg.gamma * (last_update - 1));
}

std::vector<double> vt_boost(std::span<const double> conf, const SimilarityMatrix& s,
                             std::span<const int> last_updates, const BoostConfig& cfg) {
  check_rows(conf, s);
  if (static_cast<Eigen::Index>(last_updates.size()) != s.cols()) {
    throw ContractError("vt_boost: last_update count does not match tracklet count");
  }
  std::vector<double> thresholds(last_updates.size());
  for (std::size_t j = 0; j < last_updates.size(); ++j) {
    thresholds[j] = varying_threshold(last_updates[j], cfg);
  }
  std::vector<double> out(conf.begin(), conf.end());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (s(i, j) >= thresholds[static_cast<std::size_t>(j)]) {
        auto& c = out[static_cast<std::size_t>(i)];
        c = std::max(c, cfg.tau);
        break;
      }
    }
  }
  return out;
}

SimilarityMatrix likely_object_similarity(std::span<const Detection> dets,
                                          std::span<const TrackletView> tracks,
                                          const BoostConfig& cfg) {
  return cfg.use_s ? boost_similarity(dets, tracks) : iou_matrix(dets, tracks);
}

std::vector<double> idc_boost(std::span<const double> conf, const SimilarityMatrix& s,
                              std::span<const int> last_updates, const BoostConfig& cfg) {
  if (!cfg.use_sb && !cfg.use_vt) return dlo_boost(conf, s, cfg.beta_c);
  std::vector<double> out(conf.begin(), conf.end());
  if (cfg.use_sb) out = soft_boost(out, s, cfg.alpha, cfg.q);
  if (cfg.use_vt) out = vt_boost(out, s, last_updates, cfg);
  return out;
}

std::vector<double> idc_boost(std::span<const Detection> dets,
                              std::span<const TrackletView> tracks, const BoostConfig& cfg) {
  std::vector<double> conf(dets.size());
  std::vector<int> last(tracks.size());
  for (std::size_t i = 0; i < dets.size(); ++i) conf[i] = dets[i].confidence;
  for (std::size_t j = 0; j < tracks.size(); ++j) last[j] = tracks[j].last_update;
  return idc_boost(conf, likely_object_similarity(dets, tracks, cfg), last, cfg);
}

std::vector<double> mahalanobis_novelty_boost(std::span<const Detection> dets,
                                              std::span<const TrackletView> tracks,
                                              const BoostConfig& cfg) {
  std::vector<double> out(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) out[i] = dets[i].confidence;
  if (tracks.empty()) return out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    bool outlier = true;
    for (const auto& t : tracks) {
      if (squared_mahalanobis(t.projection, dets[i].box) <= cfg.novelty_gate) {
        outlier = false;
        break;
      }
    }
    if (outlier) out[i] = std::max(out[i], cfg.tau);
  }
  return out;
}

std::vector<double> boost_confidences(std::span<const Detection> dets,
                                      std::span<const TrackletView> tracks,
                                      const BoostConfig& cfg) {
  std::vector<double> conf(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) conf[i] = dets[i].confidence;
  if (tracks.empty() || dets.empty()) return conf;
  if (cfg.use_novelty) conf = mahalanobis_novelty_boost(dets, tracks, cfg);
  if (!cfg.use_dlo) return conf;
  std::vector<int> last(tracks.size());
  for (std::size_t j = 0; j < tracks.size(); ++j) last[j] = tracks[j].last_update;
  return idc_boost(conf, likely_object_similarity(dets, tracks, cfg), last, cfg);
}

}  // namespace confboost
