#include "confboost/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "confboost/errors.hpp"

namespace confboost {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool to_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool to_int(std::string_view s, long long& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec == std::errc() && ptr == s.data() + s.size()) return true;
  // MOT files sometimes store integer columns as "1.0".
  double d = 0.0;
  if (to_double(s, d) && d == std::floor(d) && std::abs(d) < 1e15) {
    out = static_cast<long long>(d);
    return true;
  }
  return false;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      out.push_back(line.substr(start, k - start));
      start = k + 1;
    }
  }
  return out;
}

template <class F>
void for_each_line(std::string_view text, F f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    f(text.substr(pos, end - pos), line_no);
    pos = end + 1;
  }
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::vector<MotRow> parse_rows(std::string_view text, const std::string& source) {
  std::vector<MotRow> rows;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    if (trim(line).empty()) return;
    rows.push_back(parse_mot_row(line, source, n));
  });
  return rows;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("error while writing '" + path + "'");
}

MotRow parse_mot_row(std::string_view line, const std::string& source, std::size_t line_no) {
  const auto fields = split_fields(trim(line));
  if (fields.size() < 7) {
    throw ParseError(source, line_no, "expected at least 7 comma-separated fields, got " +
                                          std::to_string(fields.size()));
  }
  MotRow row;
  long long frame = 0;
  long long id = 0;
  if (!to_int(fields[0], frame)) throw ParseError(source, line_no, "bad frame index");
  if (!to_int(fields[1], id)) throw ParseError(source, line_no, "bad id");
  if (frame < 1 || frame > std::numeric_limits<int>::max()) {
    throw ParseError(source, line_no, "frame index must be >= 1");
  }
  row.frame = static_cast<int>(frame);
  row.id = static_cast<int>(id);
  double v[5];
  for (int k = 0; k < 5; ++k) {
    if (!to_double(fields[static_cast<std::size_t>(k + 2)], v[k])) {
      throw ParseError(source, line_no, "bad numeric field " + std::to_string(k + 3));
    }
  }
  row.box = BBox{v[0], v[1], v[2], v[3]};
  row.conf = v[4];
  if (!(row.box.w > 0.0) || !(row.box.h > 0.0)) {
    throw ParseError(source, line_no, "box width and height must be positive");
  }
  for (std::size_t k = 7; k < fields.size() && k < 10; ++k) {
    if (!to_double(fields[k], row.extra[k - 7])) {
      throw ParseError(source, line_no, "bad numeric field " + std::to_string(k + 1));
    }
  }
  return row;
}

std::vector<MotRow> read_mot_rows(const std::string& path) {
  return parse_rows(read_text_file(path), path);
}

DetectionStream detections_from_rows(std::span<const MotRow> rows, const std::string& source,
                                     const DetectionReadOptions& opts) {
  double lo = 0.0;
  double hi = 1.0;
  bool rescale = false;
  if (!rows.empty()) {
    const auto [mn, mx] = std::minmax_element(rows.begin(), rows.end(), [](const MotRow& a, const MotRow& b) {
      return a.conf < b.conf;
    });
    if (mn->conf < 0.0 || mx->conf > 1.0) {
      if (!opts.normalize_confidence) {
        throw ParseError(source, 0,
                         "confidences outside [0,1]; enable confidence normalization to rescale");
      }
      rescale = true;
      lo = mn->conf;
      hi = mx->conf;
    }
  }
  DetectionStream stream;
  for (const auto& r : rows) {
    double c = r.conf;
    if (rescale) c = hi > lo ? (c - lo) / (hi - lo) : 1.0;
    stream[r.frame].push_back(Detection{r.box, std::clamp(c, 0.0, 1.0), r.frame});
  }
  return stream;
}

DetectionStream read_detections(const std::string& path, const DetectionReadOptions& opts) {
  const auto rows = read_mot_rows(path);
  return detections_from_rows(rows, path, opts);
}

std::string format_detection_row(const Detection& d) {
  return std::to_string(d.frame) + ",-1," + fmt("%.2f", d.box.x) + "," + fmt("%.2f", d.box.y) +
         "," + fmt("%.2f", d.box.w) + "," + fmt("%.2f", d.box.h) + "," +
         fmt("%.4f", d.confidence) + ",-1,-1,-1";
}

void write_detections(const std::string& path, const DetectionStream& stream) {
  std::string out;
  for (const auto& [frame, dets] : stream) {
    for (const auto& d : dets) {
      Detection copy = d;
      copy.frame = frame;
      out += format_detection_row(copy);
      out += '\n';
    }
  }
  write_text_file(path, out);
}

std::string format_result_row(const TrackRecord& r) {
  return std::to_string(r.frame) + "," + std::to_string(r.id) + "," + fmt("%.2f", r.box.x) + "," +
         fmt("%.2f", r.box.y) + "," + fmt("%.2f", r.box.w) + "," + fmt("%.2f", r.box.h) + "," +
         fmt("%.4f", r.score) + ",-1,-1,-1";
}

void validate_results(std::span<const TrackRecord> records) {
  std::set<std::pair<int, int>> seen;
  for (const auto& r : records) {
    if (r.frame < 1) throw ContractError("result row has frame < 1");
    if (r.id < 1) throw ContractError("result row has id < 1 at frame " + std::to_string(r.frame));
    if (!r.box.valid()) {
      throw ContractError("result row for id " + std::to_string(r.id) + " at frame " +
                          std::to_string(r.frame) + " has an invalid box");
    }
    if (!seen.emplace(r.frame, r.id).second) {
      throw ContractError("duplicate result row for id " + std::to_string(r.id) + " at frame " +
                          std::to_string(r.frame));
    }
  }
}

std::string format_results(std::span<const TrackRecord> records) {
  validate_results(records);
  std::string out;
  for (const auto& r : records) {
    out += format_result_row(r);
    out += '\n';
  }
  return out;
}

void write_results(const std::string& path, std::span<const TrackRecord> records) {
  write_text_file(path, format_results(records));
}

std::vector<TrackRecord> parse_results(std::string_view text, const std::string& source) {
  std::vector<TrackRecord> out;
  for (const auto& row : parse_rows(text, source)) {
    out.push_back(TrackRecord{row.frame, row.id, row.box, row.conf});
  }
  return out;
}

std::vector<TrackRecord> read_results(const std::string& path) {
  return parse_results(read_text_file(path), path);
}

std::vector<TrackRecord> ground_truth_from_rows(std::span<const MotRow> rows,
                                                const GroundTruthFilter& filter) {
  std::vector<TrackRecord> out;
  for (const auto& r : rows) {
    if (filter.drop_inactive && r.conf == 0.0) continue;
    if (filter.pedestrian_only && r.extra[0] != -1.0 && r.extra[0] != 1.0) continue;
    if (filter.drop_invisible && r.extra[1] == 0.0) continue;
    out.push_back(TrackRecord{r.frame, r.id, r.box, 1.0});
  }
  return out;
}

std::vector<TrackRecord> read_ground_truth(const std::string& path, const GroundTruthFilter& filter) {
  const auto rows = read_mot_rows(path);
  return ground_truth_from_rows(rows, filter);
}

void write_ground_truth(const std::string& path, std::span<const TrackRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += std::to_string(r.frame) + "," + std::to_string(r.id) + "," + fmt("%.2f", r.box.x) +
           "," + fmt("%.2f", r.box.y) + "," + fmt("%.2f", r.box.w) + "," + fmt("%.2f", r.box.h) +
           ",1,1,1\n";
  }
  write_text_file(path, out);
}

AppearanceStream read_appearance(const std::string& path) {
  const std::string text = read_text_file(path);
  AppearanceStream out;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    line = trim(line);
    if (line.empty() || line.front() == '#') return;
    const auto f = split_fields(line);
    long long frame = 0, det = 0, track = 0;
    double value = 0.0;
    if (f.size() != 4 || !to_int(f[0], frame) || !to_int(f[1], det) || !to_int(f[2], track) ||
        !to_double(f[3], value)) {
      throw ParseError(path, n, "expected frame,det_index,track_id,value");
    }
    out[static_cast<int>(frame)].push_back(
        AppearanceEntry{static_cast<int>(det), static_cast<int>(track), value});
  });
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text,
                                                                  const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, n, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(source, n, "empty key");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  });
  return out;
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "mot17") {
    cfg.tracker.boost.tau = 0.6;
    cfg.tracker.boost.beta_c = 0.65;
  } else if (name == "mot20") {
    cfg.tracker.boost.tau = 0.4;
    cfg.tracker.boost.beta_c = 0.5;
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "' (expected mot17 or mot20)");
  }
  cfg.preset = name;
}

void apply_boost_flags(BoostConfig& boost, std::string_view flags) {
  boost.use_s = boost.use_sb = boost.use_vt = false;
  if (trim(flags) == "none") {
    boost.use_dlo = false;
    return;
  }
  boost.use_dlo = true;
  std::size_t pos = 0;
  while (pos <= flags.size()) {
    std::size_t end = flags.find_first_of(",+", pos);
    if (end == std::string_view::npos) end = flags.size();
    const auto flag = trim(flags.substr(pos, end - pos));
    if (flag == "S") {
      boost.use_s = true;
    } else if (flag == "SB") {
      boost.use_sb = true;
    } else if (flag == "VT") {
      boost.use_vt = true;
    } else if (!flag.empty()) {
      throw ConfigError("flags", "unknown boost flag '" + std::string(flag) +
                                     "' (expected S, SB, VT or none)");
    }
    pos = end + 1;
  }
}

namespace {

double parse_number(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!to_double(value, v)) throw ConfigError(key, "expected a number, got '" + value + "'");
  return v;
}

int parse_count(const std::string& key, const std::string& value, int min_value) {
  long long v = 0;
  if (!to_int(value, v) || v < min_value || v > std::numeric_limits<int>::max()) {
    throw ConfigError(key, "expected an integer >= " + std::to_string(min_value) + ", got '" +
                               value + "'");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

double in_range(const std::string& key, const std::string& value, double lo, double hi) {
  const double v = parse_number(key, value);
  if (v < lo || v > hi) {
    throw ConfigError(key, "value " + value + " outside [" + fmt("%g", lo) + ", " + fmt("%g", hi) + "]");
  }
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  constexpr double big = std::numeric_limits<double>::max();
  static const std::map<std::string, Setter> table = {
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
         long long s = 0;
         if (!to_int(v, s) || s < 0) throw ConfigError(k, "expected a non-negative integer");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"tau", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.tau = in_range(k, v, 0, 1); }},
      {"tau_init", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.tau_init = in_range(k, v, 0, 1); }},
      {"tau_s", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.tau_s = in_range(k, v, 0, big); }},
      {"beta_c", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.beta_c = in_range(k, v, 0, 1); }},
      {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.alpha = in_range(k, v, 0, 1); }},
      {"q", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.q = in_range(k, v, 1, big); }},
      {"beta_high", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.beta_high = in_range(k, v, 0, 1); }},
      {"beta_low", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.beta_low = in_range(k, v, 0, 1); }},
      {"gamma", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.gamma = in_range(k, v, 0, big); }},
      {"dlo", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.use_dlo = parse_bool(k, v); }},
      {"use_s", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.use_s = parse_bool(k, v); }},
      {"use_sb", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.use_sb = parse_bool(k, v); }},
      {"use_vt", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.use_vt = parse_bool(k, v); }},
      {"novelty", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.boost.use_novelty = parse_bool(k, v); }},
      {"novelty_gate", [big](RunConfig& c, const std::string& k, const std::string& v) {
         c.tracker.boost.novelty_gate = in_range(k, v, 1e-12, big);
       }},
      {"lambda_iou", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.weights.iou = in_range(k, v, 0, big); }},
      {"lambda_mhd", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.weights.mahalanobis = in_range(k, v, 0, big); }},
      {"lambda_shape", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.weights.shape = in_range(k, v, 0, big); }},
      {"lambda_app", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.weights.appearance = in_range(k, v, 0, big); }},
      {"pair_confidence", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "product") {
           c.tracker.pair_rule = PairConfidenceRule::product;
         } else if (v == "mean") {
           c.tracker.pair_rule = PairConfidenceRule::mean;
         } else {
           throw ConfigError(k, "expected product or mean, got '" + v + "'");
         }
       }},
      {"max_age", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.max_age = parse_count(k, v, 0); }},
      {"min_hits", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.min_hits = parse_count(k, v, 1); }},
      {"horizon", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.horizon = parse_count(k, v, 1); }},
      {"interpolate_gap", [](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.interpolate_gap = parse_count(k, v, 0); }},
      {"noise.process_position", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.process_position = in_range(k, v, 0, big); }},
      {"noise.process_velocity", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.process_velocity = in_range(k, v, 0, big); }},
      {"noise.process_ratio", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.process_ratio = in_range(k, v, 0, big); }},
      {"noise.process_ratio_velocity", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.process_ratio_velocity = in_range(k, v, 0, big); }},
      {"noise.observation_position", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.observation_position = in_range(k, v, 0, big); }},
      {"noise.observation_ratio", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.observation_ratio = in_range(k, v, 0, big); }},
      {"noise.init_position", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.init_position = in_range(k, v, 0, big); }},
      {"noise.init_ratio", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.init_ratio = in_range(k, v, 0, big); }},
      {"noise.init_velocity_multiplier", [big](RunConfig& c, const std::string& k, const std::string& v) { c.tracker.noise.init_velocity_multiplier = in_range(k, v, 0, big); }},
  };
  return table;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  const auto pairs = parse_key_values(text, source);
  RunConfig cfg;
  apply_preset(cfg, "mot17");
  std::set<std::string> seen;
  for (const auto& [key, value] : pairs) {
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    if (key == "preset") apply_preset(cfg, value);
  }
  for (const auto& [key, value] : pairs) {
    if (key == "preset") continue;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    it->second(cfg, key, value);
  }
  try {
    cfg.tracker.validate();
  } catch (const ContractError& e) {
    throw ConfigError("<combination>", e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path), path);
}

std::string format_run_config(const RunConfig& cfg) {
  const auto& t = cfg.tracker;
  const auto& b = t.boost;
  const auto& n = t.noise;
  auto num = [](double v) { return fmt("%.17g", v); };
  auto flag = [](bool v) { return std::string(v ? "true" : "false"); };
  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("preset", cfg.preset);
  line("seed", std::to_string(cfg.seed));
  line("tau", num(b.tau));
  line("tau_init", num(t.creation_threshold()));
  line("tau_s", num(t.tau_s));
  line("beta_c", num(b.beta_c));
  line("alpha", num(b.alpha));
  line("q", num(b.q));
  line("beta_high", num(b.beta_high));
  line("beta_low", num(b.beta_low));
  line("gamma", num(b.gamma));
  line("dlo", flag(b.use_dlo));
  line("use_s", flag(b.use_s));
  line("use_sb", flag(b.use_sb));
  line("use_vt", flag(b.use_vt));
  line("novelty", flag(b.use_novelty));
  line("novelty_gate", num(b.novelty_gate));
  line("lambda_iou", num(t.weights.iou));
  line("lambda_mhd", num(t.weights.mahalanobis));
  line("lambda_shape", num(t.weights.shape));
  line("lambda_app", num(t.weights.appearance));
  line("pair_confidence", t.pair_rule == PairConfidenceRule::product ? "product" : "mean");
  line("max_age", std::to_string(t.max_age));
  line("min_hits", std::to_string(t.min_hits));
  line("horizon", std::to_string(t.horizon));
  line("interpolate_gap", std::to_string(t.interpolate_gap));
  line("noise.process_position", num(n.process_position));
  line("noise.process_velocity", num(n.process_velocity));
  line("noise.process_ratio", num(n.process_ratio));
  line("noise.process_ratio_velocity", num(n.process_ratio_velocity));
  line("noise.observation_position", num(n.observation_position));
  line("noise.observation_ratio", num(n.observation_ratio));
  line("noise.init_position", num(n.init_position));
  line("noise.init_ratio", num(n.init_ratio));
  line("noise.init_velocity_multiplier", num(n.init_velocity_multiplier));
  return out;
}

}  // namespace confboost
