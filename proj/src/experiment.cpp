#include "confboost/experiment.hpp"

#include <cctype>
#include <cstdio>
#include <set>

#include "confboost/errors.hpp"

namespace confboost {

void AblationSetting::apply(BoostConfig& boost) const {
  boost.use_dlo = use_dlo;
  boost.use_s = use_s;
  boost.use_sb = use_sb;
  boost.use_vt = use_vt;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

AblationSetting parse_setting(const std::string& text) {
  AblationSetting s;
  const std::string u = upper(text);
  if (u == "NONE" || u == "OFF") {
    s.name = "none";
    return s;
  }
  std::size_t pos = 0;
  while (pos <= u.size()) {
    std::size_t next = u.find_first_of("+,", pos);
    if (next == std::string::npos) next = u.size();
    const std::string part = trim(std::string_view(u).substr(pos, next - pos));
    if (part == "DLO") {
      s.use_dlo = true;
    } else if (part == "S") {
      s.use_s = true;
    } else if (part == "SB") {
      s.use_sb = true;
    } else if (part == "VT") {
      s.use_vt = true;
    } else {
      throw ConfigError("matrix", "unknown ablation flag '" + part + "' in '" + text + "'");
    }
    pos = next + 1;
  }
  s.use_dlo = true;
  std::string name;
  for (const auto& [on, tag] : {std::pair{s.use_s, "S"}, {s.use_sb, "SB"}, {s.use_vt, "VT"}}) {
    if (!on) continue;
    if (!name.empty()) name += "+";
    name += tag;
  }
  s.name = name.empty() ? "DLO" : name;
  return s;
}

}  // namespace

std::vector<AblationSetting> standard_ablation_matrix() {
  return parse_ablation_matrix("none;DLO;VT;SB;SB+VT;S;S+VT;S+SB;S+SB+VT");
}

std::vector<AblationSetting> parse_ablation_matrix(std::string_view text) {
  const std::string t = trim(text);
  if (upper(t) == "TABLE") return standard_ablation_matrix();
  std::vector<AblationSetting> out;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    std::size_t next = t.find(';', pos);
    if (next == std::string::npos) next = t.size();
    const std::string part = trim(std::string_view(t).substr(pos, next - pos));
    if (part.empty()) throw ConfigError("matrix", "empty setting in '" + t + "'");
    out.push_back(parse_setting(part));
    pos = next + 1;
  }
  return out;
}

AblationRun run_setting(const Scene& scene, const TrackerConfig& base, const AblationSetting& setting) {
  TrackerConfig cfg = base;
  setting.apply(cfg.boost);
  AblationRun run;
  run.row.setting = setting;
  run.frames = run_sequence(scene.detections, cfg);
  const auto records = flatten(run.frames);
  run.row.counts = evaluate_sequence(scene.ground_truth, records).counts;

  std::set<int> emitted;
  for (const auto& r : records) emitted.insert(r.id);

  for (const auto& fr : run.frames) {
    const auto lab = scene.labels.find(fr.frame);
    if (lab == scene.labels.end()) continue;
    const auto& labels = lab->second;
    const auto& d = fr.diagnostics;
    std::set<int> matched;
    for (const auto& m : d.matches) matched.insert(m.det_index);
    std::set<int> created(d.created.begin(), d.created.end());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const int idx = static_cast<int>(i);
      if (labels[i].kind == DetectionKind::occlusion_dip) {
        ++run.row.dip_detections;
        if (d.kept[i] && matched.count(idx)) ++run.row.dip_recovered;
      } else if (labels[i].kind == DetectionKind::ghost) {
        const int id = d.track_of[i];
        if (id > 0 && created.count(id) && emitted.count(id)) ++run.row.ghost_tracklets;
      }
    }
  }
  return run;
}

std::vector<AblationRow> run_ablation(const Scene& scene, const TrackerConfig& base,
                                      const std::vector<AblationSetting>& matrix) {
  std::vector<AblationRow> rows;
  rows.reserve(matrix.size());
  for (const auto& s : matrix) rows.push_back(run_setting(scene, base, s).row);
  return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %6s %6s %9s %7s\n", "setting", "MOTA", "IDF1",
                "IDSW", "IDs", "dip_rec", "ghosts");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %8.4f %8.4f %6ld %6ld %9.4f %7ld\n", r.setting.name.c_str(),
                  r.counts.mota(), r.counts.idf1(), r.counts.idsw, r.counts.ids, r.dip_recall(),
                  r.ghost_tracklets);
    out += buf;
  }
  return out;
}

std::string format_ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "setting,mota,idf1,idsw,ids,fp,fn,dip_detections,dip_recovered,ghost_tracklets\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%ld,%ld,%ld,%ld,%ld,%ld,%ld\n",
                  r.setting.name.c_str(), r.counts.mota(), r.counts.idf1(), r.counts.idsw,
                  r.counts.ids, r.counts.fp, r.counts.fn, r.dip_detections, r.dip_recovered,
                  r.ghost_tracklets);
    out += buf;
  }
  return out;
}

}  // namespace confboost
