#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Geometry>
#include <json.hpp>

#include "vesselpose/ais.h"
#include "vesselpose/assignment.h"
#include "vesselpose/camera.h"
#include "vesselpose/error.h"
#include "vesselpose/evalkit.h"
#include "vesselpose/fusion.h"
#include "vesselpose/geodesy.h"
#include "vesselpose/io.h"
#include "vesselpose/pipeline.h"
#include "vesselpose/synth.h"

namespace fs = std::filesystem;
using namespace vesselpose;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::vector<ImageResult> FuseScene(const Scene& scene, int workers = 1) {
  std::string text;
  for (const auto& l : scene.ais_log) text += l + "\n";
  std::istringstream log(text);
  const auto messages = ReadAisLog(log);
  FusionConfig config;
  config.water_height_m = scene.spec.water_height_m;
  const std::map<std::string, CameraModel> cameras = {{scene.spec.viewport_id, scene.camera}};
  return FuseAll(scene.images, cameras, messages, scene.detections, config, workers);
}

const GroundTruthVessel* TruthFor(const Scene& scene, const Annotation& a) {
  for (const auto& g : scene.ground_truth) {
    if (g.image_id == a.image_id && g.detection_index == a.detection_index) return &g;
  }
  return nullptr;
}

MatchingReport Evaluate(const Scene& scene, const std::vector<ImageResult>& results) {
  std::vector<TruthVessel> truth;
  for (const auto& g : scene.ground_truth) {
    truth.push_back({g.image_id, g.mmsi, g.detection_index, g.has_ais, g.box});
  }
  std::vector<SystemAnnotation> system;
  for (const auto& r : results) {
    for (const auto& a : r.annotations) {
      system.push_back({a.image_id, a.detection_index, a.mmsi,
                        std::vector<Eigen::Vector2d>(a.corners_px.begin(), a.corners_px.end())});
    }
  }
  return BuildMatchingReport(truth, system);
}

Verdict Geodesy() {
  Timer timer;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-90.0, 90.0), lon(-180.0, 180.0), h(-1000.0, 10000.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const GeodeticCoord g{lat(rng), lon(rng), h(rng)};
    const EcefPoint e = GeodeticToEcef(g);
    worst = std::max(worst, (GeodeticToEcef(EcefToGeodetic(e)) - e).norm());
    worst = std::max(worst, std::abs(EcefToGeodetic(e).height_m - g.height_m));
  }
  const double elapsed = timer.Seconds();

  const double a = Wgs84::kSemiMajor, b = Wgs84::kSemiMinor;
  const std::vector<std::pair<GeodeticCoord, EcefPoint>> exact = {
      {{0.0, 0.0, 0.0}, {a, 0.0, 0.0}},      {{0.0, 90.0, 0.0}, {0.0, a, 0.0}},
      {{0.0, 180.0, 0.0}, {-a, 0.0, 0.0}},   {{90.0, 0.0, 0.0}, {0.0, 0.0, b}},
      {{-90.0, 0.0, 0.0}, {0.0, 0.0, -b}},   {{90.0, 0.0, 100.0}, {0.0, 0.0, b + 100.0}},
      {{0.0, -90.0, 50.0}, {0.0, -a - 50.0, 0.0}}};
  double exact_worst = 0.0;
  for (const auto& [g, e] : exact) {
    exact_worst = std::max(exact_worst, (GeodeticToEcef(g) - e).norm());
    const GeodeticCoord back = EcefToGeodetic(e);
    exact_worst = std::max(exact_worst, std::abs(back.height_m - g.height_m));
    exact_worst = std::max(exact_worst, (GeodeticToEcef(back) - e).norm());
  }
  return {worst < 1e-6 && exact_worst < 1e-4 && elapsed < 1.0,
          Format("round-trip max %.3g m, exact cases max %.3g m, %.3f s", worst, exact_worst,
                 elapsed)};
}

Verdict PnP() {
  Timer timer;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(10, 20);
  const EcefPoint site = GeodeticToEcef({53.54, 9.97, 40.0});
  const Intrinsics k{2200.0, 2200.0, 1280.0, 960.0, 2560, 1920};
  double worst_mae = 0.0, worst_center = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d target = site + Eigen::Vector3d(u(rng), u(rng), u(rng)) * 50.0;
    const Eigen::Vector3d center =
        target + Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized() * (150.0 + 100.0 * u(rng));
    const Eigen::Vector3d z = (target - center).normalized();
    const Eigen::Vector3d x = z.cross(Eigen::Vector3d(u(rng), u(rng), u(rng))).normalized();
    Eigen::Matrix3d r;
    r.row(0) = x;
    r.row(1) = z.cross(x);
    r.row(2) = z;
    const CameraModel truth(k, r, -r * center);
    std::vector<Correspondence> corrs;
    const int n = count(rng);
    while (static_cast<int>(corrs.size()) < n) {
      const EcefPoint p = target + Eigen::Vector3d(u(rng), u(rng), u(rng)) * 40.0;
      if (truth.Depth(p) <= 1.0) continue;
      const Eigen::Vector2d px = truth.Project(p);
      if (px.x() < 0 || px.y() < 0 || px.x() > k.width || px.y() > k.height) continue;
      corrs.push_back({p, px});
    }
    const CameraModel est = SolvePnP(corrs, k);
    worst_mae = std::max(worst_mae, ComputeReprojectionReport(est, corrs).mae_px);
    worst_center = std::max(worst_center, (est.Center() - truth.Center()).norm());
  }
  const double elapsed = timer.Seconds();
  return {worst_mae < 1e-6 && worst_center < 1e-4 && elapsed < 10.0,
          Format("worst MAE %.3g px, worst center error %.3g m, %.3f s", worst_mae, worst_center,
                 elapsed)};
}

Verdict ReprojectionOrdering() {
  NoiseSpec noise;
  noise.keypoint_pixel_noise_px = 1.0;
  int pnp_best = 0, ratio_ok = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene scene = GenerateScene(SampleSceneSpec(1000 + seed, {}, noise));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& kp : scene.keypoints) {
      lo = std::min(lo, kp.position.height_m);
      hi = std::max(hi, kp.position.height_m);
    }
    if (hi - lo < 5.0) return {false, Format("scene %d keypoint height span %.2f m", int(seed), hi - lo)};
    const auto groups = GroupByViewport(scene.keypoints);
    const auto& corrs = groups.at(scene.spec.viewport_id);
    const Intrinsics& k = scene.spec.camera.intrinsics;
    const ViewportCalibration cal =
        CalibrateViewport(scene.spec.viewport_id, corrs, k, scene.spec.water_height_m);
    const double pnp = ComputeReprojectionReport(cal.pnp, corrs).mae_px;
    const double water =
        ComputeReprojectionReport(cal.water_homography, corrs, k.width, k.height).mae_px;
    const double pca = ComputeReprojectionReport(cal.pca_homography, corrs, k.width, k.height).mae_px;
    if (pnp < water && pnp < pca) ++pnp_best;
    const double ratio = std::min(water, pca) / pnp;
    min_ratio = std::min(min_ratio, ratio);
    if (ratio >= 3.0) ++ratio_ok;
  }
  return {pnp_best == 20 && ratio_ok >= 18,
          Format("PnP best in %d/20, homography >= 3x PnP in %d/20 (min ratio %.2f)", pnp_best,
                 ratio_ok, min_ratio)};
}

std::vector<int> BruteForceAssignment(const Eigen::MatrixXd& cost) {
  const bool wide = cost.cols() >= cost.rows();
  const Eigen::MatrixXd c = wide ? cost : Eigen::MatrixXd(cost.transpose());
  std::vector<int> cols(c.cols()), best_cols;
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) sum += c(i, cols[i]);
    if (sum < best) {
      best = sum;
      best_cols.assign(cols.begin(), cols.begin() + c.rows());
    }
  } while (std::next_permutation(cols.begin(), cols.end()));
  if (wide) return best_cols;
  std::vector<int> rows(cost.rows(), -1);
  for (std::size_t j = 0; j < best_cols.size(); ++j) rows[best_cols[j]] = static_cast<int>(j);
  return rows;
}

Verdict Assignment() {
  Timer timer;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::MatrixXd cost(size(rng), size(rng));
    for (Eigen::Index i = 0; i < cost.rows(); ++i)
      for (Eigen::Index j = 0; j < cost.cols(); ++j) cost(i, j) = u(rng);
    if (SolveAssignment(cost) != BruteForceAssignment(cost)) ++mismatches;
  }
  const double elapsed = timer.Seconds();
  return {mismatches == 0 && elapsed < 5.0,
          Format("%d/500 differ from brute force, %.3f s", mismatches, elapsed)};
}

Verdict MatchingCost() {
  struct Case {
    Detection2D det;
    Rect footprint;
    double theta;
  };
  auto det = [](double x1, double y1, double x2, double y2, double s) {
    return Detection2D{"i", x1, y1, x2, y2, s, "boat"};
  };
  const std::vector<Case> cases = {
      {det(100, 100, 300, 200, 0.8), {120, 90, 320, 210}, 0.075},
      {det(0, 0, 100, 100, 1.0), {0, 0, 100, 100}, 0.0},
      {det(100, 50, 200, 150, 1.0), {110, 50, 210, 150}, 0.02},
      {det(100, 50, 200, 150, 1.0), {100, 50, 200, 160}, 0.02},
      {det(100, 50, 200, 150, 1.0), {100, 50, 250, 150}, 0.1},
      {det(100, 50, 200, 150, 0.5), {90, 40, 230, 170}, 0.2},
      {det(400, 200, 600, 300, 0.25), {400, 200, 600, 300}, 0.0},
      {det(400, 200, 600, 300, 0.25), {410, 210, 590, 290}, 0.16},
      {det(1, 100, 150, 200, 1.0), {-50, 100, 150, 200}, 0.051},
      {det(500, 100, 999, 200, 1.0), {520, 100, 1040, 220}, 0.101},
      {det(2, 100, 150, 200, 0.5), {-20, 100, 150, 210}, 0.084},
      {det(3, 100, 150, 200, 0.5), {-20, 100, 150, 210}, 0.132},
      {det(850, 300, 998, 400, 0.75), {800, 310, 1000, 380}, 44.0 / 375.0},
      {det(850, 300, 997, 400, 0.75), {800, 310, 1000, 380}, 14.0 / 75.0},
      {det(10, 10, 20, 20, 1.0), {500, 400, 700, 480}, 2.28},
      {det(250, 250, 750, 500, 1.0), {200, 240, 800, 490}, 0.12},
      {det(300, 120, 340, 140, 0.9), {305, 118, 335, 143}, 4.0 / 225.0},
      {det(0, 0, 1000, 500, 1.0), {100, 0, 900, 450}, 0.1},
      {det(600, 200, 650, 260, 0.2), {600, 200, 650, 265}, 0.05},
      {det(123, 45, 456, 78, 0.4), {130, 40, 470, 90}, 0.13},
      {det(700, 100, 800, 200, 1.0), {650, 100, 750, 200}, 0.1},
  };
  const ImageGeometry image{1000, 500, 2.0};
  double worst = 0.0;
  for (const auto& c : cases) {
    worst = std::max(worst, std::abs(MatchCost(c.det, c.footprint, image) - c.theta));
  }
  return {worst <= 1e-12, Format("%zu cases, max deviation %.3g", cases.size(), worst)};
}

Verdict AisCodec() {
  int reference = 0, reference_fail = 0;
  std::ifstream in(std::string(VESSELPOSE_TEST_DATA_DIR) + "/ais_reference.jsonl");
  if (!in) return {false, "reference corpus missing"};
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    const auto& x = j["expected"];
    std::vector<RawFragment> fragments;
    bool checksum_ok = true;
    try {
      for (const auto& s : j["sentences"]) fragments.push_back(ParseSentence(s.get<std::string>(), 0.0));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBadChecksum) throw;
      checksum_ok = false;
    }
    if (x.contains("checksum_valid")) {
      if (checksum_ok) ++reference_fail;
      continue;
    }
    ++reference;
    const AisBits bits = AssembleMultipart(fragments);
    bool ok = MessageType(bits) == x["msg_type"].get<int>();
    if (ok && MessageType(bits) == 5) {
      const StaticVoyage s = DecodeStaticVoyage(bits, 0.0);
      ok = s.mmsi == x["mmsi"].get<std::uint32_t>() && s.name == x["name"].get<std::string>() &&
           s.callsign == x["callsign"].get<std::string>() &&
           s.ship_type == x["ship_type"].get<int>() && s.dim_to_bow == x["to_bow"].get<int>() &&
           s.dim_to_stern == x["to_stern"].get<int>() && s.dim_to_port == x["to_port"].get<int>() &&
           s.dim_to_starboard == x["to_starboard"].get<int>();
    } else if (ok) {
      const PositionReport p = DecodePositionReport(bits, 0.0);
      auto same = [](const std::optional<double>& got, double want, bool missing, double scale) {
        if (missing) return !got.has_value();
        return got.has_value() && std::abs(std::round(*got * scale) / scale - want) < 1e-9;
      };
      const double lat = x["lat"], lon = x["lon"], speed = x["speed"], course = x["course"],
                   heading = x["heading"];
      const std::optional<double> knots =
          p.speed_over_ground_mps
              ? std::optional<double>(*p.speed_over_ground_mps / kKnotsToMetersPerSecond)
              : std::nullopt;
      ok = p.mmsi == x["mmsi"].get<std::uint32_t>() && same(p.latitude_deg, lat, lat == 91.0, 1e6) &&
           same(p.longitude_deg, lon, lon == 181.0, 1e6) && same(knots, speed, speed >= 102.3, 10.0) &&
           same(p.course_over_ground_deg, course, course >= 360.0, 10.0) &&
           same(p.heading_deg, heading, heading == 511.0, 1.0);
    }
    if (!ok) ++reference_fail;
  }

  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::int64_t> lat(-90 * 600000, 90 * 600000),
      lon(-180 * 600000, 180 * 600000);
  std::uniform_int_distribution<int> sog(0, 1022), cog(0, 3599), heading(0, 359), dim9(0, 511),
      dim6(0, 63), type(0, 99), ptype(1, 3), ch(0, 25);
  int round_trip_fail = 0;
  std::ostringstream log;
  std::vector<VesselState> states;
  for (int i = 0; i < 1000; ++i) {
    const double t = 1000.0 + i;
    VesselState s;
    s.mmsi = 211000000 + i;
    PositionReport p;
    p.mmsi = s.mmsi;
    p.message_type = ptype(rng);
    p.timestamp = t;
    p.latitude_deg = lat(rng) / 600000.0;
    p.longitude_deg = lon(rng) / 600000.0;
    p.speed_over_ground_mps = sog(rng) / 10.0 * kKnotsToMetersPerSecond;
    p.course_over_ground_deg = cog(rng) / 10.0;
    p.heading_deg = heading(rng);
    StaticVoyage v;
    v.mmsi = s.mmsi;
    v.timestamp = t;
    v.name = "VESSEL " + std::string(1, static_cast<char>('A' + ch(rng))) + std::to_string(i);
    v.callsign = "DB" + std::to_string(i);
    v.ship_type = type(rng);
    v.dim_to_bow = dim9(rng);
    v.dim_to_stern = dim9(rng);
    v.dim_to_port = dim6(rng);
    v.dim_to_starboard = dim6(rng);
    s.position = p;
    s.static_voyage = v;
    for (const auto& sentence : EncodeAis(s, "AB"[i % 2], i % 10)) {
      log << Format("%.3f ", t) << sentence << "\n";
    }
    states.push_back(s);
  }
  std::istringstream log_in(log.str());
  const auto decoded = Aggregate(ReadAisLog(log_in));
  for (const auto& s : states) {
    const auto it = decoded.find(s.mmsi);
    if (it == decoded.end() || it->second.position != s.position ||
        it->second.static_voyage != s.static_voyage) {
      ++round_trip_fail;
    }
  }
  return {reference >= 50 && reference_fail == 0 && round_trip_fail == 0,
          Format("%d reference groups, %d disagree; 1000 round-trips, %d differ", reference,
                 reference_fail, round_trip_fail)};
}

Verdict EndToEndZeroNoise() {
  Timer timer;
  int vessels = 0, correct = 0;
  double worst_corner = 0.0, worst_iou = 1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene scene = GenerateScene(SampleSceneSpec(seed));
    const auto results = FuseScene(scene);
    vessels += static_cast<int>(scene.ground_truth.size());
    for (const auto& r : results) {
      for (const auto& a : r.annotations) {
        const GroundTruthVessel* g = TruthFor(scene, a);
        if (!g || g->mmsi != a.mmsi) continue;
        ++correct;
        for (int i = 0; i < 8; ++i) {
          worst_corner = std::max(worst_corner, (a.box.corners[i] - g->box3d.corners[i]).norm());
        }
        worst_iou = std::min(worst_iou, SilhouetteIoU(g->box, a.corners_px));
      }
    }
  }
  const double elapsed = timer.Seconds();
  return {correct == vessels && worst_corner <= 1.0 && worst_iou >= 0.95 && elapsed < 60.0,
          Format("%d/%d correct, worst corner %.3g m, worst IoU %.4f, %.2f s", correct, vessels,
                 worst_corner, worst_iou, elapsed)};
}

Verdict EndToEndNoisy() {
  NoiseSpec noise;
  noise.ais_position_offset_m = 10.0;
  noise.pixel_noise_px = 1.0;
  noise.ais_dropout_p = 0.2;
  int correct = 0, emitted = 0, good = 0, dropped = 0, dropped_no_ais = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene scene = GenerateScene(SampleSceneSpec(2000 + seed, {}, noise));
    const MatchingReport report = Evaluate(scene, FuseScene(scene));
    correct += report.correct;
    emitted += report.emitted();
    for (const auto& e : report.entries) {
      if (e.result == MatchResult::kCorrect && e.iou && *e.iou >= 0.7) ++good;
    }
    for (const auto& g : scene.ground_truth) {
      if (g.has_ais) continue;
      ++dropped;
      for (const auto& e : report.entries) {
        if (e.image_id == g.image_id && e.true_mmsi == g.mmsi && e.result == MatchResult::kNoMatch &&
            (e.reason == reason::kNoAis || e.reason == reason::kNeither)) {
          ++dropped_no_ais;
        }
      }
    }
  }
  const double correct_rate = emitted ? double(correct) / emitted : 0.0;
  const double good_rate = correct ? double(good) / correct : 0.0;
  return {correct_rate >= 0.9 && good_rate >= 0.8 && dropped > 0 && dropped_no_ais == dropped,
          Format("correct %d/%d (%.1f%%), IoU >= 0.7 in %.1f%% of correct, %d/%d dropped-AIS "
                 "vessels reported as no AIS",
                 correct, emitted, 100.0 * correct_rate, 100.0 * good_rate, dropped_no_ais, dropped)};
}

Verdict CorrectionEfficacy() {
  const FusionConfig defaults;
  const CorrectionOptions options{defaults.correction, defaults.side_planes, 0.0};
  const CorrectionOptions footprint_only{defaults.correction, SidePlanes::kVertical, 0.0};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI), magnitude(0.0, 10.0);
  int cases = 0;
  double worst_error = 0.0, worst_second = 0.0, worst_footprint_only = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scene scene = GenerateScene(SampleSceneSpec(3000 + seed));
    const ImageGeometry image{scene.camera.intrinsics().width, scene.camera.intrinsics().height, 2.0};
    for (const auto& g : scene.ground_truth) {
      if (!g.detection_index) continue;
      const Detection2D det{g.image_id, g.box.min_x, g.box.min_y, g.box.max_x, g.box.max_y, 1.0, "boat"};
      const PlaneSegment3 truth{
          {g.box3d.corners[0], g.box3d.corners[1], g.box3d.corners[2], g.box3d.corners[3]},
          g.box3d.frame};
      for (int k = 0; k < 5; ++k) {
        const double a = angle(rng), m = k == 0 ? 10.0 : magnitude(rng);
        const Eigen::Vector3d offset =
            m * (std::cos(a) * truth.frame.x_axis + std::sin(a) * truth.frame.y_axis);
        const PlaneSegment3 shifted = truth.Translated(offset);
        const SegmentCorrection first =
            CorrectSegment(scene.camera, det, shifted, image, options, defaults.silhouette_passes);
        const SegmentCorrection second = CorrectSegment(scene.camera, det, first.segment, image,
                                                        options, defaults.silhouette_passes);
        worst_error = std::max(worst_error, (first.segment.Center() - truth.Center()).norm());
        worst_second = std::max(worst_second, second.offset.norm());
        const PlaneSegment3 literal =
            shifted.Translated(CorrectionVector(scene.camera, det, shifted, image, footprint_only));
        worst_footprint_only =
            std::max(worst_footprint_only, (literal.Center() - truth.Center()).norm());
        ++cases;
      }
    }
  }
  return {worst_error <= 1.0 && worst_second < 1e-6,
          Format("%d offsets, worst corrected centroid error %.3g m, worst second pass %.3g m "
                 "(footprint-only vertical planes: worst %.3f m)",
                 cases, worst_error, worst_second, worst_footprint_only)};
}

int Exec(const std::string& args) {
  const int status = std::system((std::string(VESSELPOSE_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict Determinism() {
  const fs::path root = fs::temp_directory_path() / ("vesselpose_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  nlohmann::json request = {{"seed", 77},
                            {"sampler", {{"n_images", 4}}},
                            {"noise",
                             {{"ais_position_offset_m", 10.0},
                              {"pixel_noise_px", 1.0},
                              {"ais_dropout_p", 0.2},
                              {"detection_dropout_p", 0.1},
                              {"keypoint_pixel_noise_px", 1.0}}}};
  std::ofstream(root / "request.json") << request.dump(2) << "\n";

  const std::vector<std::string> files = {"fuse/annotations.jsonl", "fuse/outcomes.jsonl",
                                          "eval/report.txt", "eval/matching.jsonl"};
  std::vector<std::string> reference;
  int runs = 0, failures = 0, differing = 0;
  for (int run = 0; run < 2; ++run) {
    const fs::path scene = root / ("scene" + std::to_string(run));
    if (Exec("synth --spec " + (root / "request.json").string() + " --out " + scene.string()) != 0) {
      ++failures;
      continue;
    }
    const SceneSpec spec = ReadSceneSpec(scene / "spec.json");
    const std::string water = Format("%.6f", spec.water_height_m);
    const std::string s = scene.string();
    for (int workers : {1, 2, 4, 8}) {
      const std::string out = (root / Format("run%d_w%d", run, workers)).string();
      const bool ok =
          Exec("fuse --keypoints " + s + "/keypoints.jsonl --intrinsics " + s +
               "/intrinsics.jsonl --ais-log " + s + "/ais.log --detections " + s +
               "/detections.jsonl --images " + s + "/images.jsonl --water-height-m " + water +
               " --workers " + std::to_string(workers) + " --out " + out + "/fuse") == 0 &&
          Exec("eval --ground-truth " + s + "/ground_truth.jsonl --annotations " + out +
               "/fuse/annotations.jsonl --outcomes " + out + "/fuse/outcomes.jsonl --keypoints " + s +
               "/keypoints.jsonl --intrinsics " + s + "/intrinsics.jsonl --water-height-m " + water +
               " --out " + out + "/eval") == 0;
      if (!ok) {
        ++failures;
        continue;
      }
      ++runs;
      std::vector<std::string> contents;
      for (const auto& f : files) contents.push_back(Slurp(fs::path(out) / f));
      if (reference.empty()) {
        reference = contents;
      } else if (contents != reference) {
        ++differing;
      }
    }
  }
  const bool non_empty = !reference.empty() && !reference[0].empty() && !reference[2].empty();
  fs::remove_all(root);
  return {failures == 0 && differing == 0 && non_empty && runs == 8,
          Format("%d runs over 2 syntheses and 1/2/4/8 workers, %d command failures, %d differ",
                 runs, failures, differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"geodesy round-trip", Geodesy},
      {"PnP exactness", PnP},
      {"reprojection ordering", ReprojectionOrdering},
      {"assignment optimality", Assignment},
      {"matching cost", MatchingCost},
      {"AIS codec", AisCodec},
      {"end-to-end zero noise", EndToEndZeroNoise},
      {"end-to-end with noise", EndToEndNoisy},
      {"correction efficacy", CorrectionEfficacy},
      {"determinism", Determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
