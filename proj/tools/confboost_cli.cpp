#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confboost/dataio.hpp"
#include "confboost/errors.hpp"
#include "confboost/experiment.hpp"
#include "confboost/metrics.hpp"
#include "confboost/simulate.hpp"
#include "confboost/tracker.hpp"

namespace cb = confboost;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("CONFBOOST_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string v = env;
  if (v == "quiet" || v == "0") return LogLevel::quiet;
  if (v == "debug" || v == "2") return LogLevel::debug;
  return LogLevel::info;
}

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) {
    std::fprintf(stderr, "%s\n", msg.c_str());
  }
}

void warn(const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); }

// Config file text with an explicit preset line prepended, so a preset given
// both on the command line and in the file is reported as a duplicate.
cb::RunConfig load_config(const std::string& path, const std::string& preset) {
  std::string text;
  if (!preset.empty()) text += "preset = " + preset + "\n";
  if (!path.empty()) text += cb::read_text_file(path);
  return cb::parse_run_config(text, path.empty() ? "<command line>" : path);
}

int last_frame(const std::vector<cb::TrackRecord>& records) {
  int last = 0;
  for (const auto& r : records) last = std::max(last, r.frame);
  return last;
}

std::vector<cb::TrackRecord> clip(const std::vector<cb::TrackRecord>& records, int last) {
  std::vector<cb::TrackRecord> out;
  for (const auto& r : records) {
    if (r.frame <= last) out.push_back(r);
  }
  return out;
}

struct TrackArgs {
  std::string det;
  std::string config;
  std::string out;
  std::string preset;
  std::string flags;
  bool flags_given = false;
  std::string appearance;
  bool normalize = false;
};

int run_track(const TrackArgs& a) {
  cb::RunConfig cfg = load_config(a.config, a.preset);
  if (a.flags_given) cb::apply_boost_flags(cfg.tracker.boost, a.flags);
  cfg.tracker.validate();
  const auto stream = cb::read_detections(a.det, cb::DetectionReadOptions{a.normalize});
  cb::AppearanceStream app;
  if (!a.appearance.empty()) app = cb::read_appearance(a.appearance);
  const auto results =
      cb::run_sequence(stream, cfg.tracker, a.appearance.empty() ? nullptr : &app);
  const auto records = cb::flatten(results);
  cb::write_results(a.out, records);
  log(LogLevel::info, "tracked " + std::to_string(results.size()) + " frames, " +
                          std::to_string(cb::count_ids(records)) + " ids -> " + a.out);
  log(LogLevel::debug, cb::format_run_config(cfg));
  return 0;
}

struct EvalArgs {
  std::vector<std::string> gt;
  std::vector<std::string> res;
  std::vector<std::string> names;
  std::string out;
  bool csv = false;
  double iou = 0.5;
  bool keep_all_classes = false;
};

int run_eval(const EvalArgs& a) {
  if (a.gt.size() != a.res.size()) {
    throw cb::ConfigError("res", "expected one result file per ground-truth file");
  }
  if (!a.names.empty() && a.names.size() != a.gt.size()) {
    throw cb::ConfigError("name", "expected one name per ground-truth file");
  }
  cb::GroundTruthFilter filter;
  if (a.keep_all_classes) filter.pedestrian_only = false;
  std::vector<cb::SequenceReport> reports;
  for (std::size_t k = 0; k < a.gt.size(); ++k) {
    const std::string name =
        a.names.empty() ? std::filesystem::path(a.res[k]).stem().string() : a.names[k];
    auto gt = cb::read_ground_truth(a.gt[k], filter);
    auto res = cb::read_results(a.res[k]);
    const int gt_len = last_frame(gt);
    const int res_len = last_frame(res);
    if (!res.empty() && gt_len != res_len) {
      const int common = std::min(gt_len, res_len);
      warn(name + ": ground truth has " + std::to_string(gt_len) + " frames, results " +
           std::to_string(res_len) + "; evaluating frames 1.." + std::to_string(common));
      gt = clip(gt, common);
      res = clip(res, common);
    }
    reports.push_back(cb::evaluate_sequence(gt, res, a.iou, name));
  }
  const auto report = cb::summarize(std::move(reports));
  const std::string text = a.csv ? cb::format_report_csv(report) : cb::format_report_text(report);
  std::fputs(text.c_str(), stdout);
  if (!a.out.empty()) cb::write_text_file(a.out, text);
  return 0;
}

struct SimulateArgs {
  std::string scene;
  std::string out_dir;
  long long seed = -1;
};

cb::SceneConfig load_scene(const std::string& path, long long seed) {
  cb::SceneConfig sc = path.empty() ? cb::SceneConfig{} : cb::load_scene_config(path);
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
  sc.validate();
  return sc;
}

int run_simulate(const SimulateArgs& a) {
  const auto sc = load_scene(a.scene, a.seed);
  const auto scene = cb::generate(sc);
  std::filesystem::create_directories(a.out_dir);
  const auto dir = std::filesystem::path(a.out_dir);
  cb::write_detections((dir / "det.txt").string(), scene.detections);
  cb::write_ground_truth((dir / "gt.txt").string(), scene.ground_truth);
  cb::write_text_file((dir / "scene.cfg").string(), cb::format_scene_config(sc));
  long dets = 0;
  for (const auto& [f, d] : scene.detections) dets += static_cast<long>(d.size());
  log(LogLevel::info, "wrote " + std::to_string(dets) + " detections and " +
                          std::to_string(scene.ground_truth.size()) + " gt boxes to " + a.out_dir);
  return 0;
}

struct AblateArgs {
  std::string scene;
  std::string config;
  std::string preset;
  std::string matrix = "table";
  std::string out;
  long long seed = -1;
};

int run_ablate(const AblateArgs& a) {
  const auto sc = load_scene(a.scene, a.seed);
  const cb::RunConfig cfg = load_config(a.config, a.preset);
  const auto matrix = cb::parse_ablation_matrix(a.matrix);
  const auto scene = cb::generate(sc);
  const auto rows = cb::run_ablation(scene, cfg.tracker, matrix);
  std::fputs(cb::format_ablation_table(rows).c_str(), stdout);
  if (!a.out.empty()) cb::write_text_file(a.out, cb::format_ablation_csv(rows));
  return 0;
}

struct StudyArgs {
  std::string scene;
  std::string config;
  std::string preset;
  std::string flags;
  bool flags_given = false;
  std::string out;
  long long seed = -1;
};

int run_study(const StudyArgs& a) {
  const auto sc = load_scene(a.scene, a.seed);
  cb::RunConfig cfg = load_config(a.config, a.preset);
  if (a.flags_given) cb::apply_boost_flags(cfg.tracker.boost, a.flags);
  const auto rows = cb::iou_decay_study(cb::generate(sc), cfg.tracker);
  const std::string text = cb::format_iou_table(rows);
  std::fputs(text.c_str(), stdout);
  if (!a.out.empty()) cb::write_text_file(a.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-object tracker with detection confidence boosting"};
  app.require_subcommand(1);

  TrackArgs track;
  auto* t = app.add_subcommand("track", "Track a MOT detection file");
  t->add_option("--det", track.det, "Detection file")->required()->check(CLI::ExistingFile);
  t->add_option("--config", track.config, "Tracker config file")->check(CLI::ExistingFile);
  t->add_option("--out", track.out, "Result file")->required();
  t->add_option("--preset", track.preset, "Dataset preset")->check(CLI::IsMember({"mot17", "mot20"}));
  auto* flags_opt = t->add_option("--flags", track.flags, "Boost flags, e.g. S,SB,VT");
  t->add_option("--appearance", track.appearance, "Appearance similarity file")->check(CLI::ExistingFile);
  t->add_flag("--normalize-conf", track.normalize, "Min-max rescale detection confidences");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate results against ground truth");
  e->add_option("--gt", eval.gt, "Ground-truth file(s)")->required()->check(CLI::ExistingFile);
  e->add_option("--res", eval.res, "Result file(s)")->required()->check(CLI::ExistingFile);
  e->add_option("--name", eval.names, "Sequence name(s)");
  e->add_option("--out", eval.out, "Write the report here too");
  e->add_flag("--csv", eval.csv, "CSV report");
  e->add_option("--iou", eval.iou, "IoU match threshold")->check(CLI::Range(0.0, 1.0));
  e->add_flag("--all-classes", eval.keep_all_classes, "Keep non-pedestrian ground truth");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic scene");
  s->add_option("--scene", sim.scene, "Scene config file")->check(CLI::ExistingFile);
  s->add_option("--out-dir", sim.out_dir, "Output directory")->required();
  s->add_option("--seed", sim.seed, "Override the scene seed")->check(CLI::NonNegativeNumber);

  AblateArgs abl;
  auto* b = app.add_subcommand("ablate", "Compare boost settings on a synthetic scene");
  b->add_option("--scene", abl.scene, "Scene config file")->check(CLI::ExistingFile);
  b->add_option("--config", abl.config, "Tracker config file")->check(CLI::ExistingFile);
  b->add_option("--preset", abl.preset, "Dataset preset")->check(CLI::IsMember({"mot17", "mot20"}));
  b->add_option("--matrix", abl.matrix, "Settings separated by ';', or 'table'");
  b->add_option("--out", abl.out, "CSV output");
  b->add_option("--seed", abl.seed, "Override the scene seed")->check(CLI::NonNegativeNumber);

  StudyArgs study;
  auto* y = app.add_subcommand("study", "IoU against frames since last update");
  y->add_option("--scene", study.scene, "Scene config file")->check(CLI::ExistingFile);
  y->add_option("--config", study.config, "Tracker config file")->check(CLI::ExistingFile);
  y->add_option("--preset", study.preset, "Dataset preset")->check(CLI::IsMember({"mot17", "mot20"}));
  auto* study_flags = y->add_option("--flags", study.flags, "Boost flags, e.g. S,SB,VT");
  y->add_option("--out", study.out, "CSV output");
  y->add_option("--seed", study.seed, "Override the scene seed")->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (t->parsed()) {
      track.flags_given = flags_opt->count() > 0;
      return run_track(track);
    }
    if (e->parsed()) return run_eval(eval);
    if (s->parsed()) return run_simulate(sim);
    if (b->parsed()) return run_ablate(abl);
    if (y->parsed()) {
      study.flags_given = study_flags->count() > 0;
      return run_study(study);
    }
  } catch (const cb::Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
