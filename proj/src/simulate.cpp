#include "confboost/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "confboost/dataio.hpp"
#include "confboost/errors.hpp"

namespace confboost {

namespace {

// mt19937_64 output is fully specified; the std distributions are not, so
// uniforms and normals are derived here to keep scenes identical everywhere.
class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }
  double normal(double stddev) {
    if (stddev == 0.0) return 0.0;
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct Mover {
  int id = 0;
  BBox box;
  double vx = 0.0;
  double vy = 0.0;
  std::set<int> dip_frames;
};

void reflect(double& pos, double& vel, double size, double limit) {
  if (pos < 0.0) {
    pos = -pos;
    vel = -vel;
  }
  if (pos + size > limit) {
    pos = 2.0 * (limit - size) - pos;
    vel = -vel;
  }
  pos = std::clamp(pos, 0.0, std::max(0.0, limit - size));
}

BBox jitter(SceneRng& rng, const BBox& b, double pos_std, double size_std) {
  BBox out{b.x + rng.normal(pos_std), b.y + rng.normal(pos_std), b.w + rng.normal(size_std),
           b.h + rng.normal(size_std)};
  out.w = std::max(out.w, 1.0);
  out.h = std::max(out.h, 1.0);
  return out;
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

void SceneConfig::validate() const {
  require(width > 0 && height > 0, "width", "field size must be positive");
  require(objects >= 0, "objects", "must be >= 0");
  require(frames >= 0, "frames", "must be >= 0");
  require(speed_min >= 0 && speed_max >= speed_min, "speed_min", "need 0 <= speed_min <= speed_max");
  require(box_h_min > 0 && box_h_max >= box_h_min, "box_h_min", "need 0 < box_h_min <= box_h_max");
  require(aspect_min > 0 && aspect_max >= aspect_min, "aspect_min", "need 0 < aspect_min <= aspect_max");
  require(box_h_max < height && box_h_max * aspect_max < width, "box_h_max", "boxes must fit the field");
  require(position_noise >= 0 && size_noise >= 0, "position_noise", "noise must be >= 0");
  require(conf_min >= 0 && conf_max <= 1 && conf_min <= conf_max, "conf_min", "need 0 <= conf_min <= conf_max <= 1");
  require(miss_rate >= 0 && miss_rate <= 1, "miss_rate", "must lie in [0,1]");
  require(occlusions_per_object >= 0, "occlusions_per_object", "must be >= 0");
  require(occlusion_min_frames >= 1 && occlusion_max_frames >= occlusion_min_frames,
          "occlusion_min_frames", "need 1 <= min <= max");
  require(dip_conf_min >= 0 && dip_conf_min <= dip_conf_max, "dip_conf_min", "need 0 <= dip_conf_min <= dip_conf_max");
  require(dip_conf_max < tau, "dip_conf_max", "dip confidence must stay below tau");
  require(tau >= 0 && tau <= 1, "tau", "must lie in [0,1]");
  require(ghosts >= 0, "ghosts", "must be >= 0");
  require(ghost_conf_min >= 0 && ghost_conf_max <= 1 && ghost_conf_min <= ghost_conf_max,
          "ghost_conf_min", "need 0 <= ghost_conf_min <= ghost_conf_max <= 1");
  require(ghost_jitter >= 0, "ghost_jitter", "must be >= 0");
  require(ghost_rate >= 0 && ghost_rate <= 1, "ghost_rate", "must lie in [0,1]");
  require(ghost_min_frames >= 1 && ghost_max_frames >= ghost_min_frames, "ghost_min_frames",
          "need 1 <= min <= max");
}

Scene generate(const SceneConfig& cfg) {
  cfg.validate();
  SceneRng rng(cfg.seed);
  Scene scene;

  std::vector<Mover> movers;
  for (int k = 0; k < cfg.objects; ++k) {
    Mover m;
    m.id = k + 1;
    const double h = rng.uniform(cfg.box_h_min, cfg.box_h_max);
    const double w = h * rng.uniform(cfg.aspect_min, cfg.aspect_max);
    m.box = BBox{rng.uniform(0.0, cfg.width - w), rng.uniform(0.0, cfg.height - h), w, h};
    const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.vx = speed * std::cos(angle);
    m.vy = speed * std::sin(angle);
    for (int o = 0; o < cfg.occlusions_per_object && cfg.frames > 0; ++o) {
      const int len = rng.uniform_int(cfg.occlusion_min_frames, cfg.occlusion_max_frames);
      const int start = rng.uniform_int(1, cfg.frames);
      for (int f = start; f < start + len && f <= cfg.frames; ++f) m.dip_frames.insert(f);
    }
    movers.push_back(std::move(m));
  }

  struct Ghost {
    BBox site;
    int first = 0;
    int last = -1;
  };
  std::vector<Ghost> ghosts;
  for (int g = 0; g < cfg.ghosts; ++g) {
    Ghost gh;
    const double h = rng.uniform(cfg.box_h_min, cfg.box_h_max);
    const double w = h * rng.uniform(cfg.aspect_min, cfg.aspect_max);
    gh.site = BBox{rng.uniform(0.0, cfg.width - w), rng.uniform(0.0, cfg.height - h), w, h};
    const int len = std::min(cfg.frames, rng.uniform_int(cfg.ghost_min_frames, cfg.ghost_max_frames));
    gh.first = cfg.frames > 0 ? rng.uniform_int(1, cfg.frames - len + 1) : 1;
    gh.last = gh.first + len - 1;
    scene.ghost_sites.push_back(gh.site);
    ghosts.push_back(gh);
  }

  for (int f = 1; f <= cfg.frames; ++f) {
    auto& dets = scene.detections[f];
    auto& labels = scene.labels[f];
    for (auto& m : movers) {
      scene.ground_truth.push_back(TrackRecord{f, m.id, m.box, 1.0});
      const bool dip = m.dip_frames.count(f) > 0;
      const bool missed = !dip && cfg.miss_rate > 0.0 && rng.uniform() < cfg.miss_rate;
      if (!missed) {
        BBox box = jitter(rng, m.box, cfg.position_noise, cfg.size_noise);
        // Dip detections are true positives by construction.
        for (int tries = 0; dip && iou(box, m.box) <= 0.5 && tries < 100; ++tries) {
          box = jitter(rng, m.box, cfg.position_noise, cfg.size_noise);
        }
        if (dip && iou(box, m.box) <= 0.5) box = m.box;
        const double conf = dip ? rng.uniform(cfg.dip_conf_min, cfg.dip_conf_max)
                                : rng.uniform(cfg.conf_min, cfg.conf_max);
        dets.push_back(Detection{box, conf, f});
        labels.push_back(DetectionLabel{dip ? DetectionKind::occlusion_dip : DetectionKind::regular, m.id});
      }
      m.box.x += m.vx;
      m.box.y += m.vy;
      reflect(m.box.x, m.vx, m.box.w, cfg.width);
      reflect(m.box.y, m.vy, m.box.h, cfg.height);
    }
    for (std::size_t g = 0; g < ghosts.size(); ++g) {
      const Ghost& gh = ghosts[g];
      if (f < gh.first || f > gh.last) continue;
      if (cfg.ghost_rate < 1.0 && rng.uniform() >= cfg.ghost_rate) continue;
      const BBox box = jitter(rng, gh.site, cfg.ghost_jitter, cfg.ghost_jitter);
      const double conf = rng.uniform(cfg.ghost_conf_min, cfg.ghost_conf_max);
      dets.push_back(Detection{box, conf, f});
      labels.push_back(DetectionLabel{DetectionKind::ghost, static_cast<int>(g)});
    }
  }
  return scene;
}

namespace {

template <class T>
void set_field(SceneConfig& c, T SceneConfig::*member, const std::string& key,
               const std::string& value) {
  if constexpr (std::is_same_v<T, double>) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw ConfigError(key, "expected a number, got '" + value + "'");
    }
    c.*member = v;
  } else if constexpr (std::is_same_v<T, int>) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max()) {
      throw ConfigError(key, "expected an integer, got '" + value + "'");
    }
    c.*member = static_cast<int>(v);
  } else {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || value.front() == '-') {
      throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
    }
    c.*member = static_cast<std::uint64_t>(v);
  }
}

using SceneSetter = std::function<void(SceneConfig&, const std::string&, const std::string&)>;

template <class T>
SceneSetter field(T SceneConfig::*member) {
  return [member](SceneConfig& c, const std::string& k, const std::string& v) { set_field(c, member, k, v); };
}

const std::map<std::string, SceneSetter>& scene_setters() {
  static const std::map<std::string, SceneSetter> table = {
      {"width", field(&SceneConfig::width)},
      {"height", field(&SceneConfig::height)},
      {"objects", field(&SceneConfig::objects)},
      {"frames", field(&SceneConfig::frames)},
      {"speed_min", field(&SceneConfig::speed_min)},
      {"speed_max", field(&SceneConfig::speed_max)},
      {"box_h_min", field(&SceneConfig::box_h_min)},
      {"box_h_max", field(&SceneConfig::box_h_max)},
      {"aspect_min", field(&SceneConfig::aspect_min)},
      {"aspect_max", field(&SceneConfig::aspect_max)},
      {"position_noise", field(&SceneConfig::position_noise)},
      {"size_noise", field(&SceneConfig::size_noise)},
      {"conf_min", field(&SceneConfig::conf_min)},
      {"conf_max", field(&SceneConfig::conf_max)},
      {"miss_rate", field(&SceneConfig::miss_rate)},
      {"occlusions_per_object", field(&SceneConfig::occlusions_per_object)},
      {"occlusion_min_frames", field(&SceneConfig::occlusion_min_frames)},
      {"occlusion_max_frames", field(&SceneConfig::occlusion_max_frames)},
      {"dip_conf_min", field(&SceneConfig::dip_conf_min)},
      {"dip_conf_max", field(&SceneConfig::dip_conf_max)},
      {"tau", field(&SceneConfig::tau)},
      {"ghosts", field(&SceneConfig::ghosts)},
      {"ghost_conf_min", field(&SceneConfig::ghost_conf_min)},
      {"ghost_conf_max", field(&SceneConfig::ghost_conf_max)},
      {"ghost_jitter", field(&SceneConfig::ghost_jitter)},
      {"ghost_rate", field(&SceneConfig::ghost_rate)},
      {"ghost_min_frames", field(&SceneConfig::ghost_min_frames)},
      {"ghost_max_frames", field(&SceneConfig::ghost_max_frames)},
      {"seed", field(&SceneConfig::seed)},
  };
  return table;
}

}  // namespace

SceneConfig parse_scene_config(std::string_view text, const std::string& source) {
  SceneConfig cfg;
  std::set<std::string> seen;
  for (const auto& [key, value] : parse_key_values(text, source)) {
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    const auto it = scene_setters().find(key);
    if (it == scene_setters().end()) throw ConfigError(key, "unknown key");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

SceneConfig load_scene_config(const std::string& path) {
  return parse_scene_config(read_text_file(path), path);
}

std::string format_scene_config(const SceneConfig& c) {
  std::string out;
  char buf[128];
  auto num = [&](const char* k, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", k, v);
    out += buf;
  };
  auto cnt = [&](const char* k, long long v) {
    std::snprintf(buf, sizeof buf, "%s = %lld\n", k, v);
    out += buf;
  };
  num("width", c.width);
  num("height", c.height);
  cnt("objects", c.objects);
  cnt("frames", c.frames);
  num("speed_min", c.speed_min);
  num("speed_max", c.speed_max);
  num("box_h_min", c.box_h_min);
  num("box_h_max", c.box_h_max);
  num("aspect_min", c.aspect_min);
  num("aspect_max", c.aspect_max);
  num("position_noise", c.position_noise);
  num("size_noise", c.size_noise);
  num("conf_min", c.conf_min);
  num("conf_max", c.conf_max);
  num("miss_rate", c.miss_rate);
  cnt("occlusions_per_object", c.occlusions_per_object);
  cnt("occlusion_min_frames", c.occlusion_min_frames);
  cnt("occlusion_max_frames", c.occlusion_max_frames);
  num("dip_conf_min", c.dip_conf_min);
  num("dip_conf_max", c.dip_conf_max);
  num("tau", c.tau);
  cnt("ghosts", c.ghosts);
  num("ghost_conf_min", c.ghost_conf_min);
  num("ghost_conf_max", c.ghost_conf_max);
  num("ghost_jitter", c.ghost_jitter);
  num("ghost_rate", c.ghost_rate);
  cnt("ghost_min_frames", c.ghost_min_frames);
  cnt("ghost_max_frames", c.ghost_max_frames);
  std::snprintf(buf, sizeof buf, "seed = %llu\n", static_cast<unsigned long long>(c.seed));
  out += buf;
  return out;
}

std::vector<IouBucket> iou_decay_table(const std::vector<FrameResult>& results) {
  std::map<int, std::vector<double>> buckets;
  for (const auto& r : results) {
    for (const auto& m : r.diagnostics.matches) buckets[m.last_update].push_back(m.iou);
  }
  std::vector<IouBucket> out;
  for (auto& [lu, values] : buckets) {
    std::sort(values.begin(), values.end());
    IouBucket b;
    b.last_update = lu;
    b.count = static_cast<long>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    b.mean = sum / static_cast<double>(values.size());
    // Linear interpolation between order statistics.
    const double pos = 0.9 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    b.q90 = values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    out.push_back(b);
  }
  return out;
}

std::vector<IouBucket> iou_decay_study(const Scene& scene, const TrackerConfig& cfg) {
  return iou_decay_table(run_sequence(scene.detections, cfg));
}

std::string format_iou_table(const std::vector<IouBucket>& rows) {
  std::string out = "last_update,count,mean_iou,q90_iou\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%ld,%.6f,%.6f\n", r.last_update, r.count, r.mean, r.q90);
    out += buf;
  }
  return out;
}

}  // namespace confboost
