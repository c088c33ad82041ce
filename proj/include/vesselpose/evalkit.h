#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vesselpose/camera.h"
#include "vesselpose/fusion.h"

namespace vesselpose {

// Axis-aligned rectangle IoU; 0 when the union is empty.
double RectIoU(const Rect& a, const Rect& b);

// IoU between a ground-truth box and the enclosing rectangle of projected
// 3D box corners.
double SilhouetteIoU(const Rect& ground_truth, std::span<const Eigen::Vector2d> projected_corners);

// Stand-ins for manual grading of correct matches.
enum class Quality { kGood, kOk, kBad };
inline constexpr double kGoodIoU = 0.7;
inline constexpr double kOkIoU = 0.5;
Quality ClassifyQuality(double iou);
std::string_view QualityName(Quality q);

struct TruthVessel {
  std::string image_id;
  std::uint32_t mmsi = 0;
  std::optional<std::size_t> detection_index;  // detection produced by this vessel
  bool has_ais = false;                        // a footprint was available at fusion
  Rect box;                                    // ground-truth 2D box
};

struct SystemAnnotation {
  std::string image_id;
  std::size_t detection_index = 0;
  std::uint32_t mmsi = 0;
  std::vector<Eigen::Vector2d> corners_px;
};

enum class MatchResult { kCorrect, kWrong, kNoMatch };

// Sub-reasons follow the categories of the matching-quality breakdown.
namespace reason {
inline constexpr const char* kGood = "good";
inline constexpr const char* kOk = "ok";
inline constexpr const char* kBad = "bad";
inline constexpr const char* kMissingAis = "missing_ais";
inline constexpr const char* kFalsePositive = "false_positive_detection";
inline constexpr const char* kCostFunction = "cost_function";
inline constexpr const char* kNotPredicted = "not_predicted";
inline constexpr const char* kNoAis = "no_ais";
inline constexpr const char* kNeither = "neither_prediction_nor_ais";
inline constexpr const char* kCostTooHigh = "cost_too_high";
}  // namespace reason

struct MatchEntry {
  std::string image_id;
  std::optional<std::uint32_t> true_mmsi;  // empty for false-positive detections
  std::optional<std::uint32_t> assigned_mmsi;
  MatchResult result = MatchResult::kNoMatch;
  std::string reason;
  std::optional<double> iou;  // set for correct and wrong matches
};

struct MatchingReport {
  std::vector<MatchEntry> entries;
  int correct = 0;
  int wrong = 0;
  int no_match = 0;
  std::map<std::string, int> correct_by_reason;
  std::map<std::string, int> wrong_by_reason;
  std::map<std::string, int> no_match_by_reason;

  int total() const { return correct + wrong + no_match; }
  int emitted() const { return correct + wrong; }
  // Percent of all entries.
  double PercentOfTotal(int count) const;
  // Percent of emitted annotations (correct + wrong).
  double PercentOfEmitted(int count) const;
};

// Classifies every ground-truth vessel by what happened to it, plus one
// wrong entry per annotation whose detection belongs to no vessel.
MatchingReport BuildMatchingReport(std::span<const TruthVessel> truth,
                                   std::span<const SystemAnnotation> annotations);

std::string FormatMatchingReport(const MatchingReport& report);

struct IouSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

// Linear-interpolation quartiles.
IouSummary SummarizeIoU(std::vector<double> values);

// IoU summaries of correct matches, keyed by quality proxy name, plus "all".
std::map<std::string, IouSummary> IouDistribution(const MatchingReport& report);

struct ReprojectionRow {
  std::string method;
  ReprojectionReport report;
};

// PnP, water-plane homography and PCA homography rows, each averaged over
// the correspondences of every viewport.
std::vector<ReprojectionRow> BuildReprojectionTable(
    std::span<const CameraModel> pnp, std::span<const PlaneHomography> water,
    std::span<const PlaneHomography> pca,
    std::span<const std::vector<Correspondence>> correspondences);

std::string FormatReprojectionTable(std::span<const ReprojectionRow> rows);

}  // namespace vesselpose
