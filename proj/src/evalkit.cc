#include "vesselpose/evalkit.h"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "vesselpose/error.h"

namespace vesselpose {
namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double RectIoU(const Rect& a, const Rect& b) {
  const Rect inter{std::max(a.min_x, b.min_x), std::max(a.min_y, b.min_y),
                   std::min(a.max_x, b.max_x), std::min(a.max_y, b.max_y)};
  const double i = inter.area();
  const double u = a.area() + b.area() - i;
  return u > 0.0 ? i / u : 0.0;
}

double SilhouetteIoU(const Rect& ground_truth, std::span<const Eigen::Vector2d> projected_corners) {
  return RectIoU(ground_truth, Rect::Enclosing(projected_corners));
}

Quality ClassifyQuality(double iou) {
  if (iou >= kGoodIoU) return Quality::kGood;
  if (iou >= kOkIoU) return Quality::kOk;
  return Quality::kBad;
}

std::string_view QualityName(Quality q) {
  switch (q) {
    case Quality::kGood: return reason::kGood;
    case Quality::kOk: return reason::kOk;
    case Quality::kBad: return reason::kBad;
  }
  return "unknown";
}

double MatchingReport::PercentOfTotal(int count) const {
  return total() > 0 ? 100.0 * count / total() : 0.0;
}

double MatchingReport::PercentOfEmitted(int count) const {
  return emitted() > 0 ? 100.0 * count / emitted() : 0.0;
}

MatchingReport BuildMatchingReport(std::span<const TruthVessel> truth,
                                   std::span<const SystemAnnotation> annotations) {
  using Key = std::pair<std::string, std::size_t>;
  std::map<Key, const SystemAnnotation*> by_detection;
  for (const auto& a : annotations) {
    if (!by_detection.emplace(Key{a.image_id, a.detection_index}, &a).second) {
      throw Error(ErrorCode::kInvalidArgument, "two annotations share a detection");
    }
  }
  std::map<Key, bool> owned;

  MatchingReport report;
  auto add = [&report](MatchEntry e) {
    switch (e.result) {
      case MatchResult::kCorrect:
        ++report.correct;
        ++report.correct_by_reason[e.reason];
        break;
      case MatchResult::kWrong:
        ++report.wrong;
        ++report.wrong_by_reason[e.reason];
        break;
      case MatchResult::kNoMatch:
        ++report.no_match;
        ++report.no_match_by_reason[e.reason];
        break;
    }
    report.entries.push_back(std::move(e));
  };

  for (const TruthVessel& v : truth) {
    MatchEntry e;
    e.image_id = v.image_id;
    e.true_mmsi = v.mmsi;
    const SystemAnnotation* ann = nullptr;
    if (v.detection_index) {
      owned[{v.image_id, *v.detection_index}] = true;
      const auto it = by_detection.find({v.image_id, *v.detection_index});
      if (it != by_detection.end()) ann = it->second;
    }
    if (ann) {
      e.assigned_mmsi = ann->mmsi;
      e.iou = SilhouetteIoU(v.box, ann->corners_px);
      if (ann->mmsi == v.mmsi) {
        e.result = MatchResult::kCorrect;
        e.reason = std::string(QualityName(ClassifyQuality(*e.iou)));
      } else {
        e.result = MatchResult::kWrong;
        e.reason = v.has_ais ? reason::kCostFunction : reason::kMissingAis;
      }
    } else {
      e.result = MatchResult::kNoMatch;
      if (!v.detection_index && !v.has_ais) {
        e.reason = reason::kNeither;
      } else if (!v.detection_index) {
        e.reason = reason::kNotPredicted;
      } else if (!v.has_ais) {
        e.reason = reason::kNoAis;
      } else {
        e.reason = reason::kCostTooHigh;
      }
    }
    add(std::move(e));
  }
  for (const auto& a : annotations) {
    if (owned.count({a.image_id, a.detection_index})) continue;
    MatchEntry e;
    e.image_id = a.image_id;
    e.assigned_mmsi = a.mmsi;
    e.result = MatchResult::kWrong;
    e.reason = reason::kFalsePositive;
    add(std::move(e));
  }
  return report;
}

std::string FormatMatchingReport(const MatchingReport& report) {
  std::ostringstream out;
  auto section = [&](const char* name, const std::map<std::string, int>& rows, int total,
                     bool emitted) {
    for (const auto& [why, count] : rows) {
      out << name << "\t" << why << "\t" << count << "\t" << Fixed(report.PercentOfTotal(count), 2)
          << "\t" << (emitted ? Fixed(report.PercentOfEmitted(count), 2) : std::string("-"))
          << "\n";
    }
    out << name << "\ttotal\t" << total << "\t" << Fixed(report.PercentOfTotal(total), 2) << "\t"
        << (emitted ? Fixed(report.PercentOfEmitted(total), 2) : std::string("-")) << "\n";
  };
  out << "result\treason\tcount\tpct_total\tpct_emitted\n";
  section("correct", report.correct_by_reason, report.correct, true);
  section("wrong", report.wrong_by_reason, report.wrong, true);
  section("no_match", report.no_match_by_reason, report.no_match, false);
  out << "all\ttotal\t" << report.total() << "\t100.00\t-\n";
  return out.str();
}

IouSummary SummarizeIoU(std::vector<double> values) {
  IouSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.q1 = Quantile(values, 0.25);
  s.median = Quantile(values, 0.5);
  s.q3 = Quantile(values, 0.75);
  return s;
}

std::map<std::string, IouSummary> IouDistribution(const MatchingReport& report) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& e : report.entries) {
    if (e.result != MatchResult::kCorrect || !e.iou) continue;
    groups[e.reason].push_back(*e.iou);
    groups["all"].push_back(*e.iou);
  }
  std::map<std::string, IouSummary> out;
  for (auto& [name, values] : groups) out[name] = SummarizeIoU(std::move(values));
  return out;
}

std::vector<ReprojectionRow> BuildReprojectionTable(
    std::span<const CameraModel> pnp, std::span<const PlaneHomography> water,
    std::span<const PlaneHomography> pca,
    std::span<const std::vector<Correspondence>> correspondences) {
  if (pnp.size() != correspondences.size() || water.size() != correspondences.size() ||
      pca.size() != correspondences.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one model of each kind per viewport expected");
  }
  struct Accumulator {
    double sum_px = 0.0, sum_w = 0.0, sum_h = 0.0;
    std::size_t n = 0;
    void Add(const ReprojectionReport& r) {
      sum_px += r.mae_px * r.count;
      sum_w += r.mae_over_width_pct * r.count;
      sum_h += r.mae_over_height_pct * r.count;
      n += r.count;
    }
    ReprojectionReport Get() const {
      ReprojectionReport r;
      r.count = n;
      if (n) {
        r.mae_px = sum_px / n;
        r.mae_over_width_pct = sum_w / n;
        r.mae_over_height_pct = sum_h / n;
      }
      return r;
    }
  } a_pnp, a_water, a_pca;
  for (std::size_t v = 0; v < correspondences.size(); ++v) {
    const int w = pnp[v].intrinsics().width, h = pnp[v].intrinsics().height;
    a_pnp.Add(ComputeReprojectionReport(pnp[v], correspondences[v]));
    a_water.Add(ComputeReprojectionReport(water[v], correspondences[v], w, h));
    a_pca.Add(ComputeReprojectionReport(pca[v], correspondences[v], w, h));
  }
  return {{"pnp", a_pnp.Get()},
          {"homography_water_surface", a_water.Get()},
          {"homography_pca", a_pca.Get()}};
}

std::string FormatReprojectionTable(std::span<const ReprojectionRow> rows) {
  std::ostringstream out;
  out << "method\tmae_px\terror_over_width_pct\terror_over_height_pct\n";
  for (const auto& row : rows) {
    out << row.method << "\t" << Fixed(row.report.mae_px, 2) << "\t"
        << Fixed(row.report.mae_over_width_pct, 2) << "\t"
        << Fixed(row.report.mae_over_height_pct, 2) << "\n";
  }
  return out.str();
}

}  // namespace vesselpose
