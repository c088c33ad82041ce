#include "vesselpose/pipeline.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "vesselpose/error.h"
#include "vesselpose/evalkit.h"
#include "vesselpose/io.h"
#include "vesselpose/render.h"
#include "vesselpose/synth.h"

namespace fs = std::filesystem;

namespace vesselpose {
namespace {

struct Fused {
  Scene scene;
  std::vector<ImageResult> results;
};

Fused FuseScene(const SceneSpec& spec, int workers = 1, bool drop_detections = false) {
  Fused f{GenerateScene(spec), {}};
  std::istringstream log([&] {
    std::string text;
    for (const auto& l : f.scene.ais_log) text += l + "\n";
    return text;
  }());
  const auto messages = ReadAisLog(log);
  FusionConfig config;
  config.water_height_m = spec.water_height_m;
  const std::map<std::string, CameraModel> cameras = {{spec.viewport_id, f.scene.camera}};
  const std::vector<Detection2D> none;
  f.results = FuseAll(f.scene.images, cameras, messages,
                      drop_detections ? none : f.scene.detections, config, workers);
  return f;
}

TEST(Pipeline, ZeroNoiseAllCorrect) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Fused f = FuseScene(SampleSceneSpec(seed));
    ASSERT_EQ(f.results.size(), 1u);
    const auto& anns = f.results[0].annotations;
    EXPECT_EQ(anns.size(), f.scene.ground_truth.size());
    for (const auto& a : anns) {
      const auto gt = std::find_if(f.scene.ground_truth.begin(), f.scene.ground_truth.end(),
                                   [&](const auto& g) { return g.detection_index == a.detection_index; });
      ASSERT_NE(gt, f.scene.ground_truth.end());
      EXPECT_EQ(gt->mmsi, a.mmsi);
      for (int i = 0; i < 8; ++i) EXPECT_LT((a.box.corners[i] - gt->box3d.corners[i]).norm(), 1.0);
    }
  }
}

TEST(Pipeline, EmptyDetectionsGiveNoMatch) {
  const Fused f = FuseScene(SampleSceneSpec(4), 1, true);
  EXPECT_TRUE(f.results[0].annotations.empty());
  int no_match = 0;
  for (const auto& o : f.results[0].outcomes) {
    EXPECT_EQ(o.outcome, outcome::kNoMatch);
    EXPECT_EQ(o.reason, "no_detection");
    ++no_match;
  }
  EXPECT_EQ(no_match, static_cast<int>(f.scene.ground_truth.size()));
}

TEST(Pipeline, VesselBehindCameraIsExcluded) {
  const Scene scene = GenerateScene(SampleSceneSpec(5));
  const CameraModel& cam = scene.camera;
  const GeodeticCoord g =
      EcefToGeodetic(cam.Center() - 200.0 * cam.rotation().row(2).transpose());
  PositionReport p;
  p.mmsi = 99;
  p.timestamp = scene.images[0].timestamp - 1.0;
  p.latitude_deg = g.latitude_deg;
  p.longitude_deg = g.longitude_deg;
  p.speed_over_ground_mps = 0.0;
  p.heading_deg = 10.0;
  StaticVoyage s;
  s.mmsi = 99;
  s.timestamp = p.timestamp;
  s.dim_to_bow = s.dim_to_stern = 10;
  s.dim_to_port = s.dim_to_starboard = 3;
  std::vector<AisMessage> messages = {p, s};
  FusionConfig config;
  config.water_height_m = scene.spec.water_height_m;
  const ImageResult r = FuseImage(scene.images[0], cam, Aggregate(messages), scene.detections, config);
  ASSERT_EQ(r.outcomes.size(), scene.detections.size() + 1);
  const auto it = std::find_if(r.outcomes.begin(), r.outcomes.end(),
                               [](const auto& o) { return o.mmsi == 99u; });
  ASSERT_NE(it, r.outcomes.end());
  EXPECT_EQ(it->outcome, outcome::kExcluded);
  EXPECT_EQ(it->reason, "behind_camera");
}

TEST(Pipeline, ImageEdgePlanesHoldSilhouetteCorners) {
  const Scene scene = GenerateScene(SampleSceneSpec(14));
  const ImageGeometry image{scene.camera.intrinsics().width, scene.camera.intrinsics().height, 2.0};
  double worst_vertical = 0.0;
  for (const auto& g : scene.ground_truth) {
    const Detection2D det{g.image_id, g.box.min_x, g.box.min_y, g.box.max_x, g.box.max_y, 1.0, "boat"};
    const EdgePlanes planes =
        BuildEdgePlanes(scene.camera, det, g.box3d.frame.z_axis, SidePlanes::kImageEdge);
    double left = std::numeric_limits<double>::infinity(), right = left;
    for (const auto& c : g.box3d.corners) {
      left = std::min(left, planes.Distance(planes.left, c));
      right = std::min(right, planes.Distance(planes.right, c));
    }
    EXPECT_NEAR(left, 0.0, 1e-6);
    EXPECT_NEAR(right, 0.0, 1e-6);

    const PlaneSegment3 truth{
        {g.box3d.corners[0], g.box3d.corners[1], g.box3d.corners[2], g.box3d.corners[3]},
        g.box3d.frame};
    const SegmentCorrection fix =
        CorrectSegment(scene.camera, det, truth, image, {CorrectionScheme::kWaterPlaneSolve,
                                                         SidePlanes::kImageEdge, 0.0}, 3);
    EXPECT_LT(fix.offset.norm(), 1e-6);
    EXPECT_NEAR(fix.height_m, g.box3d.height_m, 1e-6);
    const SegmentCorrection footprint_only = CorrectSegment(
        scene.camera, det, truth, image, {CorrectionScheme::kWaterPlaneSolve, SidePlanes::kVertical, 0.0}, 0);
    worst_vertical = std::max(worst_vertical, footprint_only.offset.norm());
  }
  EXPECT_GT(worst_vertical, 0.1);
}

TEST(Pipeline, FilteredDetections) {
  const Scene scene = GenerateScene(SampleSceneSpec(6));
  FusionConfig config;
  config.water_height_m = scene.spec.water_height_m;
  config.classes = {"kayak"};
  const ImageResult r = FuseImage(scene.images[0], scene.camera, {}, scene.detections, config);
  EXPECT_EQ(r.outcomes.size(), scene.detections.size());
  for (const auto& o : r.outcomes) EXPECT_EQ(o.reason, "class");
  config.classes.clear();
  config.match_threshold = 0.0;
  EXPECT_THROW(config.Validate(), Error);
  config.match_threshold = 0.35;
  config.silhouette_passes = -1;
  EXPECT_THROW(config.Validate(), Error);
}

TEST(Pipeline, WorkerCountDoesNotChangeOutput) {
  SamplerOptions options;
  options.n_images = 6;
  NoiseSpec noise;
  noise.pixel_noise_px = 1.0;
  noise.ais_position_offset_m = 5.0;
  const SceneSpec spec = SampleSceneSpec(8, options, noise);
  const fs::path dir = fs::temp_directory_path() / "vesselpose_workers";
  fs::remove_all(dir);
  std::string first;
  for (int workers : {1, 2, 4}) {
    const Fused f = FuseScene(spec, workers);
    WriteAnnotations(dir / "a.jsonl", f.results);
    WriteOutcomes(dir / "o.jsonl", f.results);
    std::ifstream a(dir / "a.jsonl"), o(dir / "o.jsonl");
    std::stringstream text;
    text << a.rdbuf() << o.rdbuf();
    if (first.empty()) {
      first = text.str();
      EXPECT_FALSE(first.empty());
    } else {
      EXPECT_EQ(text.str(), first) << workers;
    }
  }
  fs::remove_all(dir);
}

TEST(Pipeline, AnnotationFileRoundTrip) {
  const Fused f = FuseScene(SampleSceneSpec(2));
  const fs::path path = fs::temp_directory_path() / "vesselpose_ann.jsonl";
  WriteAnnotations(path, f.results);
  const auto back = ReadAnnotations(path);
  ASSERT_EQ(back.size(), f.results[0].annotations.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const Annotation& a = f.results[0].annotations[i];
    EXPECT_EQ(back[i].mmsi, a.mmsi);
    EXPECT_EQ(back[i].detection_index, a.detection_index);
    EXPECT_EQ(back[i].box.corners[5], a.box.corners[5]);
    EXPECT_EQ(back[i].corners_px[3], a.corners_px[3]);
    EXPECT_EQ(back[i].box.height_m, a.box.height_m);
  }
  fs::remove(path);
}

TEST(Pipeline, ReadersRejectBadRecords) {
  const fs::path path = fs::temp_directory_path() / "vesselpose_bad.jsonl";
  {
    std::ofstream out(path);
    out << "{\"format_version\": 1, \"image_id\": \"a\", \"x1\": 1}\n";
  }
  try {
    ReadDetections(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformed);
  }
  {
    std::ofstream out(path);
    out << "{\"format_version\": 2, \"image_id\": \"a\", \"timestamp\": 1}\n";
  }
  EXPECT_THROW(ReadImages(path), Error);
  fs::remove(path);
  try {
    ReadKeypoints(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

int Count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Render, EdgesAndAxes) {
  const Fused f = FuseScene(SampleSceneSpec(1));
  const std::vector<Annotation> one = {f.results[0].annotations.front()};
  const std::string svg = RenderSvg(one, 2560, 1920);
  EXPECT_EQ(Count(svg, "class=\"edge"), 12);
  EXPECT_EQ(Count(svg, "class=\"axis"), 3);
  EXPECT_EQ(svg, RenderSvg(one, 2560, 1920));

  // The bottom quad is drawn in corner order and closes on the first corner.
  const auto& c = one[0].corners_px;
  char first[64];
  std::snprintf(first, sizeof(first), "M %.2f %.2f L %.2f %.2f", c[0].x(), c[0].y(), c[1].x(), c[1].y());
  char closing[64];
  std::snprintf(closing, sizeof(closing), "M %.2f %.2f L %.2f %.2f", c[3].x(), c[3].y(), c[0].x(), c[0].y());
  const auto p1 = svg.find(first), p4 = svg.find(closing);
  ASSERT_NE(p1, std::string::npos);
  ASSERT_NE(p4, std::string::npos);
  EXPECT_LT(p1, p4);

  const std::string empty = RenderSvg({}, 640, 480);
  EXPECT_EQ(Count(empty, "<path"), 0);
  EXPECT_NE(empty.find("width=\"640\" height=\"480\""), std::string::npos);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("vesselpose_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Exec(const std::string& args) {
    const std::string cmd = std::string(VESSELPOSE_CLI) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  fs::path dir_;
};

TEST_F(Cli, EndToEnd) {
  const std::string scene = (dir_ / "scene").string();
  ASSERT_EQ(Exec("synth --seed 3 --out " + scene), 0);
  const SceneSpec spec = ReadSceneSpec(dir_ / "scene" / "spec.json");
  const std::string water = std::to_string(spec.water_height_m);
  ASSERT_EQ(Exec("calibrate --keypoints " + scene + "/keypoints.jsonl --intrinsics " + scene +
                 "/intrinsics.jsonl --water-height-m " + water + " --out " + scene + "/cal"),
            0);
  const auto rows = ReadTextLines(dir_ / "scene" / "cal" / "reprojection.txt");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].rfind("pnp\t0.00\t", 0), 0u) << rows[1];
  ASSERT_EQ(Exec("fuse --cameras " + scene + "/cal/cameras.jsonl --ais-log " + scene +
                 "/ais.log --detections " + scene + "/detections.jsonl --images " + scene +
                 "/images.jsonl --water-height-m " + water + " --workers 2 --out " + scene + "/fuse"),
            0);
  ASSERT_EQ(Exec("eval --ground-truth " + scene + "/ground_truth.jsonl --annotations " + scene +
                 "/fuse/annotations.jsonl --outcomes " + scene + "/fuse/outcomes.jsonl --keypoints " +
                 scene + "/keypoints.jsonl --intrinsics " + scene + "/intrinsics.jsonl --water-height-m " +
                 water + " --out " + scene + "/eval"),
            0);
  const auto report = ReadTextLines(dir_ / "scene" / "eval" / "report.txt");
  ASSERT_FALSE(report.empty());
  EXPECT_TRUE(std::any_of(report.begin(), report.end(), [](const std::string& l) {
    return l.rfind("correct\ttotal\t", 0) == 0 && l.find("100.00\t100.00") != std::string::npos;
  }));
  ASSERT_EQ(Exec("render --annotations " + scene + "/fuse/annotations.jsonl --intrinsics " + scene +
                 "/intrinsics.jsonl --out " + scene + "/svg"),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "scene" / "svg" / (spec.scene_id + "_0000.svg")));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(Exec("calibrate --keypoints " + (dir_ / "missing.jsonl").string() +
                 " --intrinsics x --out " + dir_.string()),
            2);
  EXPECT_EQ(Exec("fuse --out " + dir_.string() + " --match-threshold -1"), 2);
  EXPECT_EQ(Exec("fuse --out " + dir_.string() + " --side-planes sideways"), 2);
  EXPECT_EQ(Exec("nonsense"), 2);

  const Scene scene = GenerateScene(SampleSceneSpec(2));
  WriteKeypoints(dir_ / "kp.jsonl", std::span(scene.keypoints).first(5));
  WriteIntrinsics(dir_ / "k.jsonl", {{"cam0", scene.spec.camera.intrinsics}});
  EXPECT_EQ(Exec("calibrate --keypoints " + (dir_ / "kp.jsonl").string() + " --intrinsics " +
                 (dir_ / "k.jsonl").string() + " --out " + dir_.string()),
            2);

  WriteKeypoints(dir_ / "kp.jsonl", scene.keypoints);
  std::ofstream(dir_ / "det.jsonl") << "{\"format_version\": 1, \"image_id\": 3}\n";
  WriteImages(dir_ / "img.jsonl", scene.images);
  std::ofstream(dir_ / "ais.log") << "";
  EXPECT_EQ(Exec("fuse --keypoints " + (dir_ / "kp.jsonl").string() + " --intrinsics " +
                 (dir_ / "k.jsonl").string() + " --ais-log " + (dir_ / "ais.log").string() +
                 " --detections " + (dir_ / "det.jsonl").string() + " --images " +
                 (dir_ / "img.jsonl").string() + " --out " + dir_.string()),
            1);
}

}  // namespace
}  // namespace vesselpose
