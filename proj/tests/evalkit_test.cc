#include "vesselpose/evalkit.h"

#include <random>

#include <gtest/gtest.h>

namespace vesselpose {
namespace {

std::vector<Eigen::Vector2d> Corners(const Rect& r) {
  return {{r.min_x, r.min_y}, {r.max_x, r.min_y}, {r.max_x, r.max_y}, {r.min_x, r.max_y}};
}

TEST(Evalkit, RectIoU) {
  const Rect a{0, 0, 2, 2}, b{1, 0, 3, 2}, far{10, 10, 12, 12};
  EXPECT_DOUBLE_EQ(RectIoU(a, a), 1.0);
  EXPECT_DOUBLE_EQ(RectIoU(a, far), 0.0);
  EXPECT_NEAR(RectIoU(a, b), 2.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(RectIoU(a, b), RectIoU(b, a));
  const auto c = Corners(b);
  EXPECT_NEAR(SilhouetteIoU(a, c), 2.0 / 6.0, 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y = u(rng), p = u(rng), q = u(rng);
    const Rect r{x, y, x + u(rng) + 0.1, y + u(rng) + 0.1};
    const Rect s{p, q, p + u(rng) + 0.1, q + u(rng) + 0.1};
    const double iou = RectIoU(r, s);
    EXPECT_GE(iou, 0.0);
    EXPECT_LE(iou, 1.0);
    EXPECT_DOUBLE_EQ(iou, RectIoU(s, r));
  }
}

TEST(Evalkit, Quality) {
  EXPECT_EQ(ClassifyQuality(0.7), Quality::kGood);
  EXPECT_EQ(ClassifyQuality(0.69), Quality::kOk);
  EXPECT_EQ(ClassifyQuality(0.5), Quality::kOk);
  EXPECT_EQ(ClassifyQuality(0.49), Quality::kBad);
}

TEST(Evalkit, AllCorrect) {
  std::vector<TruthVessel> truth;
  std::vector<SystemAnnotation> anns;
  for (std::uint32_t i = 0; i < 5; ++i) {
    const Rect box{i * 100.0, 0, i * 100.0 + 50, 40};
    truth.push_back({"a", 100 + i, i, true, box});
    anns.push_back({"a", i, 100 + i, Corners(box)});
  }
  const MatchingReport r = BuildMatchingReport(truth, anns);
  EXPECT_EQ(r.correct, 5);
  EXPECT_EQ(r.total(), 5);
  EXPECT_DOUBLE_EQ(r.PercentOfTotal(r.correct), 100.0);
  EXPECT_EQ(r.correct_by_reason.at("good"), 5);
}

TEST(Evalkit, SwappedPair) {
  std::vector<TruthVessel> truth = {{"a", 1, 0, true, {0, 0, 10, 10}}, {"a", 2, 1, true, {20, 0, 30, 10}},
                                    {"a", 3, 2, true, {40, 0, 50, 10}}};
  std::vector<SystemAnnotation> anns = {{"a", 0, 2, Corners({0, 0, 10, 10})},
                                        {"a", 1, 1, Corners({20, 0, 30, 10})},
                                        {"a", 2, 3, Corners({40, 0, 50, 10})}};
  const MatchingReport r = BuildMatchingReport(truth, anns);
  EXPECT_EQ(r.wrong, 2);
  EXPECT_EQ(r.correct, 1);
  EXPECT_EQ(r.wrong_by_reason.at("cost_function"), 2);
}

TEST(Evalkit, NoMatchReasons) {
  std::vector<TruthVessel> truth = {{"a", 1, std::nullopt, true, {0, 0, 10, 10}},
                                    {"a", 2, 0, false, {20, 0, 30, 10}},
                                    {"a", 3, std::nullopt, false, {40, 0, 50, 10}},
                                    {"a", 4, 1, true, {60, 0, 70, 10}}};
  std::vector<SystemAnnotation> anns = {{"a", 7, 9, Corners({0, 0, 1, 1})}};
  const MatchingReport r = BuildMatchingReport(truth, anns);
  EXPECT_EQ(r.no_match_by_reason.at("not_predicted"), 1);
  EXPECT_EQ(r.no_match_by_reason.at("no_ais"), 1);
  EXPECT_EQ(r.no_match_by_reason.at("neither_prediction_nor_ais"), 1);
  EXPECT_EQ(r.no_match_by_reason.at("cost_too_high"), 1);
  EXPECT_EQ(r.wrong_by_reason.at("false_positive_detection"), 1);
  EXPECT_EQ(r.total(), 5);
  double sum = 0.0;
  for (int c : {r.correct, r.wrong, r.no_match}) sum += r.PercentOfTotal(c);
  EXPECT_NEAR(sum, 100.0, 1e-9);
}

TEST(Evalkit, WrongWithMissingAis) {
  std::vector<TruthVessel> truth = {{"a", 1, 0, false, {0, 0, 10, 10}}};
  std::vector<SystemAnnotation> anns = {{"a", 0, 2, Corners({0, 0, 10, 10})}};
  const MatchingReport r = BuildMatchingReport(truth, anns);
  EXPECT_EQ(r.wrong_by_reason.at("missing_ais"), 1);
}

TEST(Evalkit, IouSummary) {
  const IouSummary s = SummarizeIoU({0.9, 0.5, 0.7, 1.0, 0.8});
  EXPECT_EQ(s.count, 5u);
  EXPECT_NEAR(s.mean, 0.78, 1e-12);
  EXPECT_NEAR(s.median, 0.8, 1e-12);
  EXPECT_NEAR(s.q1, 0.7, 1e-12);
  EXPECT_NEAR(s.q3, 0.9, 1e-12);
  EXPECT_EQ(SummarizeIoU({}).count, 0u);
}

TEST(Evalkit, ReprojectionTableRows) {
  const Intrinsics k{1000, 1000, 500, 400, 1000, 800};
  const CameraModel cam(k, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
  std::vector<Correspondence> corrs;
  for (int i = 0; i < 6; ++i) {
    const Eigen::Vector3d p(i - 2.5, (i % 3) - 1.0, 10.0 + i);
    corrs.push_back({p, cam.Project(p)});
  }
  PlaneHomography h;
  h.plane.anchor = Eigen::Vector3d::Zero();
  h.plane.basis.col(0) = Eigen::Vector3d::UnitX();
  h.plane.basis.col(1) = Eigen::Vector3d::UnitY();
  const std::vector<CameraModel> pnp = {cam};
  const std::vector<PlaneHomography> hs = {h};
  const std::vector<std::vector<Correspondence>> all = {corrs};
  const auto rows = BuildReprojectionTable(pnp, hs, hs, all);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "pnp");
  EXPECT_NEAR(rows[0].report.mae_px, 0.0, 1e-9);
  const std::string text = FormatReprojectionTable(rows);
  EXPECT_NE(text.find("homography_water_surface"), std::string::npos);
  EXPECT_NE(text.find("homography_pca"), std::string::npos);
}

}  // namespace
}  // namespace vesselpose
