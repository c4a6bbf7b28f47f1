#include "confboost/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "confboost/association.hpp"

namespace confboost {

namespace {

std::map<int, std::vector<TrackRecord>> by_frame(std::span<const TrackRecord> records) {
  std::map<int, std::vector<TrackRecord>> out;
  for (const auto& r : records) out[r.frame].push_back(r);
  for (auto& [f, v] : out) {
    std::sort(v.begin(), v.end(), [](const TrackRecord& a, const TrackRecord& b) { return a.id < b.id; });
  }
  return out;
}

// Pairs not allowed by the gate cost this much, more than any set of real
// pairs, so the solver maximizes the number of gated pairs first.
constexpr double kForbidden = 1e6;

}  // namespace

double EvalCounts::mota() const {
  return 1.0 - static_cast<double>(fp + fn + idsw) / static_cast<double>(std::max<long>(gt, 1));
}

double EvalCounts::idf1() const {
  const long denom = gt + hyp;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(idtp) / static_cast<double>(denom);
}

FrameMatch ClearMatcher::match_frame(std::span<const TrackRecord> gt,
                                     std::span<const TrackRecord> hyp) {
  FrameMatch out;
  std::vector<char> gt_done(gt.size(), 0);
  std::vector<char> hyp_done(hyp.size(), 0);

  std::vector<std::size_t> gt_order(gt.size());
  for (std::size_t k = 0; k < gt.size(); ++k) gt_order[k] = k;
  std::sort(gt_order.begin(), gt_order.end(),
            [&](std::size_t a, std::size_t b) { return gt[a].id < gt[b].id; });

  auto record = [&](std::size_t g, std::size_t h) {
    gt_done[g] = hyp_done[h] = 1;
    const int gid = gt[g].id;
    const int hid = hyp[h].id;
    const auto it = last_match_.find(gid);
    if (it != last_match_.end() && it->second != hid) ++out.idsw;
    last_match_[gid] = hid;
    out.pairs.emplace_back(gid, hid);
  };

  // Keep previous correspondences that are still above the gate.
  for (std::size_t g : gt_order) {
    const auto it = last_match_.find(gt[g].id);
    if (it == last_match_.end()) continue;
    for (std::size_t h = 0; h < hyp.size(); ++h) {
      if (!hyp_done[h] && hyp[h].id == it->second && iou(gt[g].box, hyp[h].box) >= gate_) {
        record(g, h);
        break;
      }
    }
  }

  std::vector<std::size_t> rows, cols;
  for (std::size_t g : gt_order) {
    if (!gt_done[g]) rows.push_back(g);
  }
  for (std::size_t h = 0; h < hyp.size(); ++h) {
    if (!hyp_done[h]) cols.push_back(h);
  }
  if (!rows.empty() && !cols.empty()) {
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < cols.size(); ++b) {
        const double v = iou(gt[rows[a]].box, hyp[cols[b]].box);
        cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v >= gate_ ? 1.0 - v : kForbidden;
      }
    }
    const auto assign = hungarian(cost);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const int b = assign[a];
      if (b >= 0 && cost(static_cast<Eigen::Index>(a), b) < kForbidden) {
        record(rows[a], cols[static_cast<std::size_t>(b)]);
      }
    }
  }
  out.fn = static_cast<int>(std::count(gt_done.begin(), gt_done.end(), 0));
  out.fp = static_cast<int>(std::count(hyp_done.begin(), hyp_done.end(), 0));
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

EvalCounts identity_counts(std::span<const TrackRecord> gt, std::span<const TrackRecord> results,
                           double iou_gate) {
  std::map<int, int> gt_index, hyp_index;
  for (const auto& r : gt) gt_index.emplace(r.id, 0);
  for (const auto& r : results) hyp_index.emplace(r.id, 0);
  int k = 0;
  for (auto& [id, idx] : gt_index) idx = k++;
  k = 0;
  for (auto& [id, idx] : hyp_index) idx = k++;

  EvalCounts c;
  c.gt = static_cast<long>(gt.size());
  c.hyp = static_cast<long>(results.size());
  if (gt_index.empty() || hyp_index.empty()) {
    c.idfn = c.gt;
    c.idfp = c.hyp;
    return c;
  }
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gt_index.size()),
                                                  static_cast<Eigen::Index>(hyp_index.size()));
  const auto gf = by_frame(gt);
  const auto hf = by_frame(results);
  for (const auto& [frame, gts] : gf) {
    const auto it = hf.find(frame);
    if (it == hf.end()) continue;
    for (const auto& g : gts) {
      for (const auto& h : it->second) {
        if (iou(g.box, h.box) >= iou_gate) overlap(gt_index[g.id], hyp_index[h.id]) += 1.0;
      }
    }
  }
  const auto assign = hungarian(-overlap);
  double idtp = 0.0;
  for (std::size_t a = 0; a < assign.size(); ++a) {
    if (assign[a] >= 0) idtp += overlap(static_cast<Eigen::Index>(a), assign[a]);
  }
  c.idtp = static_cast<long>(idtp);
  c.idfn = c.gt - c.idtp;
  c.idfp = c.hyp - c.idtp;
  return c;
}

SequenceReport evaluate_sequence(std::span<const TrackRecord> gt,
                                 std::span<const TrackRecord> results, double iou_gate,
                                 const std::string& name) {
  int last_gt = 0;
  for (const auto& r : gt) last_gt = std::max(last_gt, r.frame);
  std::vector<TrackRecord> res;
  for (const auto& r : results) {
    if (r.frame <= last_gt) res.push_back(r);
  }

  SequenceReport report;
  report.name = name;
  EvalCounts& c = report.counts;
  c = identity_counts(gt, res, iou_gate);

  const auto gf = by_frame(gt);
  const auto hf = by_frame(res);
  std::set<int> frames;
  for (const auto& [f, v] : gf) frames.insert(f);
  for (const auto& [f, v] : hf) frames.insert(f);
  ClearMatcher matcher(iou_gate);
  static const std::vector<TrackRecord> none;
  for (int f : frames) {
    const auto g = gf.find(f);
    const auto h = hf.find(f);
    const FrameMatch m = matcher.match_frame(g == gf.end() ? none : g->second,
                                             h == hf.end() ? none : h->second);
    c.fp += m.fp;
    c.fn += m.fn;
    c.idsw += m.idsw;
    c.matches += static_cast<long>(m.pairs.size());
  }
  c.ids = count_ids(res);
  return report;
}

EvalReport summarize(std::vector<SequenceReport> sequences) {
  EvalReport r;
  for (const auto& s : sequences) {
    const auto& c = s.counts;
    r.total.gt += c.gt;
    r.total.hyp += c.hyp;
    r.total.matches += c.matches;
    r.total.fp += c.fp;
    r.total.fn += c.fn;
    r.total.idsw += c.idsw;
    r.total.ids += c.ids;
    r.total.idtp += c.idtp;
    r.total.idfp += c.idfp;
    r.total.idfn += c.idfn;
  }
  r.sequences = std::move(sequences);
  return r;
}

long count_ids(std::span<const TrackRecord> results) {
  std::set<int> ids;
  for (const auto& r : results) ids.insert(r.id);
  return static_cast<long>(ids.size());
}

long count_idsw(std::span<const TrackRecord> gt, std::span<const TrackRecord> results,
                double iou_gate) {
  return evaluate_sequence(gt, results, iou_gate).counts.idsw;
}

std::string format_report_text(const EvalReport& report) {
  std::string out;
  char buf[256];
  auto row = [&](const std::string& name, const EvalCounts& c) {
    std::snprintf(buf, sizeof buf, "%-16s %8.3f %8.3f %6ld %6ld %8ld %8ld %8ld\n", name.c_str(),
                  100.0 * c.mota(), 100.0 * c.idf1(), c.idsw, c.ids, c.fp, c.fn, c.gt);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-16s %8s %8s %6s %6s %8s %8s %8s\n", "sequence", "MOTA", "IDF1",
                "IDSW", "IDs", "FP", "FN", "GT");
  out += buf;
  for (const auto& s : report.sequences) row(s.name, s.counts);
  if (report.sequences.size() != 1) row("OVERALL", report.total);
  return out;
}

std::string format_report_csv(const EvalReport& report) {
  std::string out = "sequence,mota,idf1,idsw,ids,fp,fn,gt,hyp,idtp,idfp,idfn\n";
  char buf[320];
  auto row = [&](const std::string& name, const EvalCounts& c) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld,%ld\n", name.c_str(),
                  c.mota(), c.idf1(), c.idsw, c.ids, c.fp, c.fn, c.gt, c.hyp, c.idtp, c.idfp, c.idfn);
    out += buf;
  };
  for (const auto& s : report.sequences) row(s.name, s.counts);
  row("OVERALL", report.total);
  return out;
}

}  // namespace confboost
