#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vesselpose/error.h"
#include "vesselpose/evalkit.h"
#include "vesselpose/io.h"
#include "vesselpose/pipeline.h"
#include "vesselpose/render.h"
#include "vesselpose/synth.h"

namespace fs = std::filesystem;
using namespace vesselpose;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDegenerateGeometry:
    case ErrorCode::kDegeneratePlanes:
      return kExitConfig;
    default:
      return kExitData;
  }
}

void RequireFile(const std::string& flag, const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::kConfig, flag + " is required");
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kConfig, flag + ": no such file " + path);
}

struct CalibrateArgs {
  std::string keypoints, intrinsics, out;
  double water_height_m = 0.0;
};

struct FuseArgs {
  std::string keypoints, intrinsics, cameras, ais_log, detections, images, out;
  std::string classes, correction = "water_plane", side_planes = "image_edge";
  FusionConfig config;
  int workers = 1;
};

struct EvalArgs {
  std::string ground_truth, annotations, outcomes, keypoints, intrinsics, out;
  double water_height_m = 0.0;
};

struct SynthArgs {
  std::string spec, out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

struct RenderArgs {
  std::string annotations, images, intrinsics, out;
  int width = 0, height = 0;
};

std::vector<ViewportCalibration> Calibrate(const std::string& keypoints_path,
                                           const std::string& intrinsics_path,
                                           double water_height_m) {
  RequireFile("--keypoints", keypoints_path);
  RequireFile("--intrinsics", intrinsics_path);
  const auto keypoints = ReadKeypoints(keypoints_path);
  const auto intrinsics = ReadIntrinsics(intrinsics_path);
  std::vector<ViewportCalibration> out;
  for (const auto& [viewport, corrs] : GroupByViewport(keypoints)) {
    const auto k = intrinsics.find(viewport);
    if (k == intrinsics.end()) {
      throw Error(ErrorCode::kConfig, "no intrinsics for viewport " + viewport);
    }
    out.push_back(CalibrateViewport(viewport, corrs, k->second, water_height_m));
  }
  return out;
}

std::vector<ReprojectionRow> Table(std::span<const ViewportCalibration> calibrations) {
  std::vector<CameraModel> pnp;
  std::vector<PlaneHomography> water, pca;
  std::vector<std::vector<Correspondence>> corrs;
  for (const auto& c : calibrations) {
    pnp.push_back(c.pnp);
    water.push_back(c.water_homography);
    pca.push_back(c.pca_homography);
    corrs.push_back(c.correspondences);
  }
  return BuildReprojectionTable(pnp, water, pca, corrs);
}

int RunCalibrate(const CalibrateArgs& a) {
  const auto calibrations = Calibrate(a.keypoints, a.intrinsics, a.water_height_m);
  std::map<std::string, CameraModel> cameras;
  for (const auto& c : calibrations) cameras.emplace(c.viewport_id, c.pnp);
  const auto rows = Table(calibrations);
  const std::string table = FormatReprojectionTable(rows);
  std::cout << table;
  const fs::path out(a.out);
  WriteCameras(out / "cameras.jsonl", cameras);
  WriteReprojectionRecords(out / "reprojection.jsonl", rows);
  WriteText(out / "reprojection.txt", table);
  return kExitOk;
}

int RunFuse(FuseArgs a) {
  a.config.Validate();
  if (a.correction == "water_plane") {
    a.config.correction = CorrectionScheme::kWaterPlaneSolve;
  } else if (a.correction == "proposal_sum") {
    a.config.correction = CorrectionScheme::kProposalSum;
  } else {
    throw Error(ErrorCode::kConfig, "unknown correction scheme " + a.correction);
  }
  if (a.side_planes == "image_edge") {
    a.config.side_planes = SidePlanes::kImageEdge;
  } else if (a.side_planes == "vertical") {
    a.config.side_planes = SidePlanes::kVertical;
  } else {
    throw Error(ErrorCode::kConfig, "unknown side plane model " + a.side_planes);
  }
  std::stringstream classes(a.classes);
  for (std::string c; std::getline(classes, c, ',');) {
    if (!c.empty()) a.config.classes.push_back(c);
  }

  std::map<std::string, CameraModel> cameras;
  if (!a.cameras.empty()) {
    RequireFile("--cameras", a.cameras);
    cameras = ReadCameras(a.cameras);
  } else {
    for (const auto& c : Calibrate(a.keypoints, a.intrinsics, a.config.water_height_m)) {
      cameras.emplace(c.viewport_id, c.pnp);
    }
  }
  RequireFile("--ais-log", a.ais_log);
  RequireFile("--detections", a.detections);
  RequireFile("--images", a.images);
  std::ifstream log(a.ais_log);
  AisLogStats stats;
  const auto messages = ReadAisLog(log, &stats);
  const auto detections = ReadDetections(a.detections);
  const auto images = ReadImages(a.images);

  const auto results = FuseAll(images, cameras, messages, detections, a.config, a.workers);
  const fs::path out(a.out);
  WriteAnnotations(out / "annotations.jsonl", results);
  WriteOutcomes(out / "outcomes.jsonl", results);

  std::map<std::string, int> counts;
  std::size_t annotations = 0;
  for (const auto& r : results) {
    annotations += r.annotations.size();
    for (const auto& o : r.outcomes) ++counts[o.outcome + "/" + o.reason];
  }
  std::cout << "images " << images.size() << ", annotations " << annotations << "\n";
  std::cout << "ais lines " << stats.lines << ", decoded " << stats.decoded << ", bad checksum "
            << stats.bad_checksum << ", malformed " << stats.malformed << ", incomplete "
            << stats.incomplete << "\n";
  for (const auto& [k, n] : counts) std::cout << k << "\t" << n << "\n";
  return kExitOk;
}

int RunEval(const EvalArgs& a) {
  RequireFile("--ground-truth", a.ground_truth);
  RequireFile("--annotations", a.annotations);
  const auto gt = ReadGroundTruth(a.ground_truth);
  const auto annotations = ReadAnnotations(a.annotations);

  // With an outcome log, "has AIS" means a footprint was available when the
  // image was fused.
  std::set<std::pair<std::string, std::uint32_t>> had_segment;
  const bool use_outcomes = !a.outcomes.empty();
  if (use_outcomes) {
    RequireFile("--outcomes", a.outcomes);
    for (const auto& o : ReadOutcomes(a.outcomes)) {
      if (o.mmsi && (o.outcome == outcome::kAnnotated || o.outcome == outcome::kDropped ||
                     (o.outcome == outcome::kNoMatch))) {
        had_segment.insert({o.image_id, *o.mmsi});
      }
    }
  }
  std::vector<TruthVessel> truth;
  for (const auto& g : gt) {
    const bool has_ais = use_outcomes ? had_segment.count({g.image_id, g.mmsi}) > 0 : g.has_ais;
    truth.push_back({g.image_id, g.mmsi, g.detection_index, has_ais, g.box});
  }
  std::vector<SystemAnnotation> system;
  for (const auto& an : annotations) {
    system.push_back({an.image_id, an.detection_index, an.mmsi,
                      std::vector<Eigen::Vector2d>(an.corners_px.begin(), an.corners_px.end())});
  }
  const MatchingReport report = BuildMatchingReport(truth, system);
  const auto iou = IouDistribution(report);

  std::ostringstream text;
  text << FormatMatchingReport(report) << "\n";
  text << "iou_group\tcount\tmean\tq1\tmedian\tq3\n";
  for (const auto& [name, s] : iou) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.4f\t%.4f\t%.4f\t%.4f\n", name.c_str(), s.count,
                  s.mean, s.q1, s.median, s.q3);
    text << buf;
  }
  const fs::path out(a.out);
  if (!a.keypoints.empty() || !a.intrinsics.empty()) {
    const auto rows = Table(Calibrate(a.keypoints, a.intrinsics, a.water_height_m));
    text << "\n" << FormatReprojectionTable(rows);
    WriteReprojectionRecords(out / "reprojection.jsonl", rows);
  }
  std::cout << text.str();
  WriteText(out / "report.txt", text.str());
  WriteMatchingRecords(out / "matching.jsonl", report, iou);
  return kExitOk;
}

int RunSynth(const SynthArgs& a) {
  SynthRequest request;
  if (!a.spec.empty()) {
    RequireFile("--spec", a.spec);
    request = ReadSynthRequest(a.spec);
  }
  if (a.seed_given) request.seed = a.seed;
  SceneSpec spec = request.spec ? *request.spec
                                : SampleSceneSpec(request.seed, request.sampler, request.noise);
  if (request.spec && a.seed_given) spec.seed = a.seed;
  const Scene scene = GenerateScene(spec);
  WriteScene(scene, a.out);
  std::cout << "scene " << spec.scene_id << ": " << scene.images.size() << " images, "
            << spec.vessels.size() << " vessels, " << scene.detections.size() << " detections, "
            << scene.ais_log.size() << " AIS lines\n";
  return kExitOk;
}

int RunRender(const RenderArgs& a) {
  RequireFile("--annotations", a.annotations);
  int width = a.width, height = a.height;
  if (!a.intrinsics.empty()) {
    RequireFile("--intrinsics", a.intrinsics);
    const auto k = ReadIntrinsics(a.intrinsics);
    if (k.size() != 1) throw Error(ErrorCode::kConfig, "render needs exactly one intrinsics record");
    width = k.begin()->second.width;
    height = k.begin()->second.height;
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kConfig, "image size required (--width/--height or --intrinsics)");
  }
  std::map<std::string, std::vector<Annotation>> by_image;
  if (!a.images.empty()) {
    RequireFile("--images", a.images);
    for (const auto& im : ReadImages(a.images)) by_image[im.image_id];
  }
  for (auto& an : ReadAnnotations(a.annotations)) by_image[an.image_id].push_back(std::move(an));
  const fs::path out(a.out);
  fs::create_directories(out);
  for (const auto& [image_id, anns] : by_image) {
    WriteText(out / (image_id + ".svg"), RenderSvg(anns, width, height));
  }
  std::cout << "rendered " << by_image.size() << " overlays\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vessel 3D pose annotation from AIS and camera detections"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Estimate camera models from keypoints");
  calibrate->add_option("--keypoints", cal.keypoints, "Keypoint records (JSONL)");
  calibrate->add_option("--intrinsics", cal.intrinsics, "Intrinsics records (JSONL)");
  calibrate->add_option("--out", cal.out, "Output directory")->required();
  calibrate->add_option("--water-height-m", cal.water_height_m, "Water surface ellipsoidal height");

  FuseArgs fuse;
  auto* fuse_cmd = app.add_subcommand("fuse", "Associate detections with AIS and build 3D boxes");
  fuse_cmd->add_option("--keypoints", fuse.keypoints, "Keypoint records, used without --cameras");
  fuse_cmd->add_option("--intrinsics", fuse.intrinsics, "Intrinsics records, used without --cameras");
  fuse_cmd->add_option("--cameras", fuse.cameras, "Camera models written by calibrate");
  fuse_cmd->add_option("--ais-log", fuse.ais_log, "Timestamped AIVDM log");
  fuse_cmd->add_option("--detections", fuse.detections, "Detection records (JSONL)");
  fuse_cmd->add_option("--images", fuse.images, "Image records with capture time (JSONL)");
  fuse_cmd->add_option("--out", fuse.out, "Output directory")->required();
  fuse_cmd->add_option("--water-height-m", fuse.config.water_height_m, "Water surface height");
  fuse_cmd->add_option("--match-threshold", fuse.config.match_threshold, "Maximum matching cost");
  fuse_cmd->add_option("--ais-max-age-s", fuse.config.ais_max_age_s, "Maximum position age");
  fuse_cmd->add_option("--border-margin-px", fuse.config.border_margin_px, "Border contact margin");
  fuse_cmd->add_option("--score-floor", fuse.config.score_floor, "Minimum detection score");
  fuse_cmd->add_option("--classes", fuse.classes, "Comma separated accepted classes");
  fuse_cmd->add_option("--correction", fuse.correction, "water_plane or proposal_sum");
  fuse_cmd->add_option("--side-planes", fuse.side_planes, "image_edge or vertical");
  fuse_cmd->add_option("--silhouette-passes", fuse.config.silhouette_passes,
                       "Correction rounds that include the box top corners");
  fuse_cmd->add_option("--workers", fuse.workers, "Worker threads");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score annotations against ground truth");
  eval->add_option("--ground-truth", ev.ground_truth, "Ground truth records (JSONL)");
  eval->add_option("--annotations", ev.annotations, "Annotations written by fuse");
  eval->add_option("--outcomes", ev.outcomes, "Outcome log written by fuse");
  eval->add_option("--keypoints", ev.keypoints, "Keypoints for the reprojection table");
  eval->add_option("--intrinsics", ev.intrinsics, "Intrinsics for the reprojection table");
  eval->add_option("--water-height-m", ev.water_height_m, "Water surface height");
  eval->add_option("--out", ev.out, "Output directory")->required();

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  synth->add_option("--spec", syn.spec, "Scene spec or sampler settings (JSON)");
  auto* seed = synth->add_option("--seed", syn.seed, "Random seed");
  synth->add_option("--out", syn.out, "Output directory")->required();

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Draw annotations as SVG overlays");
  render->add_option("--annotations", ren.annotations, "Annotations written by fuse");
  render->add_option("--images", ren.images, "Image records; images without boxes get empty canvases");
  render->add_option("--intrinsics", ren.intrinsics, "Takes the image size from intrinsics");
  render->add_option("--width", ren.width, "Image width");
  render->add_option("--height", ren.height, "Image height");
  render->add_option("--out", ren.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*calibrate) return RunCalibrate(cal);
    if (*fuse_cmd) return RunFuse(fuse);
    if (*eval) return RunEval(ev);
    if (*synth) {
      syn.seed_given = seed->count() > 0;
      return RunSynth(syn);
    }
    if (*render) return RunRender(ren);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
