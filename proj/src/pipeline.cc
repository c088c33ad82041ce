#include "vesselpose/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "vesselpose/error.h"

namespace vesselpose {
namespace {

struct Candidate {
  std::uint32_t mmsi;
  PlaneSegment3 segment;
  ProjectedSegment projected;
  const StaticVoyage* dims;
};

std::array<Eigen::Vector2d, 4> ProjectAxes(const CameraModel& camera, const Box3D& box,
                                           const StaticVoyage& dims) {
  const double half_length = 0.5 * (dims.dim_to_bow + dims.dim_to_stern);
  const double half_beam = 0.5 * (dims.dim_to_port + dims.dim_to_starboard);
  return {camera.Project(box.centroid),
          camera.Project(box.centroid + half_length * box.frame.x_axis),
          camera.Project(box.centroid + half_beam * box.frame.y_axis),
          camera.Project(box.centroid + 0.5 * box.height_m * box.frame.z_axis)};
}

}  // namespace

void FusionConfig::Validate() const {
  if (!(match_threshold > 0.0)) throw Error(ErrorCode::kConfig, "match threshold must be positive");
  if (!(ais_max_age_s > 0.0)) throw Error(ErrorCode::kConfig, "AIS age cap must be positive");
  if (!(border_margin_px >= 0.0)) throw Error(ErrorCode::kConfig, "border margin must be >= 0");
  if (!(score_floor > 0.0 && score_floor <= 1.0)) {
    throw Error(ErrorCode::kConfig, "score floor must be in (0, 1]");
  }
  if (!std::isfinite(water_height_m)) throw Error(ErrorCode::kConfig, "water height not finite");
  if (silhouette_passes < 0) throw Error(ErrorCode::kConfig, "silhouette passes must be >= 0");
}

ImageResult FuseImage(const ImageFrame& image, const CameraModel& camera,
                      const std::map<std::uint32_t, VesselState>& vessels,
                      std::span<const Detection2D> detections, const FusionConfig& config) {
  ImageResult result;
  result.image_id = image.image_id;
  const ImageGeometry geometry{camera.intrinsics().width, camera.intrinsics().height,
                               config.border_margin_px};

  std::vector<Detection2D> usable;
  std::vector<std::size_t> usable_index;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection2D& det = detections[i];
    std::string reason;
    try {
      det.Validate();
    } catch (const Error&) {
      reason = "invalid_detection";
    }
    if (reason.empty() && !config.classes.empty() &&
        std::find(config.classes.begin(), config.classes.end(), det.class_name) ==
            config.classes.end()) {
      reason = "class";
    }
    if (reason.empty() && det.score < config.score_floor) reason = "score_floor";
    if (!reason.empty()) {
      result.outcomes.push_back({image.image_id, std::nullopt, i, outcome::kFiltered, reason, {}});
      continue;
    }
    usable.push_back(det);
    usable_index.push_back(i);
  }

  std::vector<Candidate> candidates;
  for (const auto& [mmsi, state] : vessels) {
    const Readiness readiness = CheckPoseReady(state, image.timestamp, config.ais_max_age_s);
    if (readiness != Readiness::kReady) {
      result.outcomes.push_back({image.image_id, mmsi, std::nullopt, outcome::kExcluded,
                                 "no_ais:" + std::string(ReadinessName(readiness)), {}});
      continue;
    }
    try {
      const VesselFrame frame = BuildVesselFrame(state, config.water_height_m);
      PlaneSegment3 segment = WaterPlaneSegment(state, frame, image.timestamp);
      ProjectedSegment projected = ProjectSegment(camera, segment);
      candidates.push_back({mmsi, std::move(segment), projected, &*state.static_voyage});
    } catch (const Error& e) {
      const std::string reason =
          e.code() == ErrorCode::kBehindCamera ? "behind_camera" : std::string(ErrorCodeName(e.code()));
      result.outcomes.push_back({image.image_id, mmsi, std::nullopt, outcome::kExcluded, reason, {}});
    }
  }

  std::vector<SegmentCandidate> footprints;
  for (const auto& c : candidates) footprints.push_back({c.mmsi, c.projected.enclosing});
  const AssociationResult assoc =
      Associate(usable, footprints, geometry, config.match_threshold);

  for (const Association& match : assoc.matches) {
    const Detection2D& det = usable[match.detection];
    const std::size_t det_index = usable_index[match.detection];
    const auto cand = std::find_if(candidates.begin(), candidates.end(),
                                   [&](const Candidate& c) { return c.mmsi == match.mmsi; });
    try {
      const SegmentCorrection fix =
          CorrectSegment(camera, det, cand->segment, geometry,
                         {config.correction, config.side_planes, 0.0}, config.silhouette_passes);
      Annotation ann;
      ann.image_id = image.image_id;
      ann.mmsi = match.mmsi;
      ann.detection_index = det_index;
      ann.box = BuildBox3D(fix.segment, fix.height_m);
      for (int i = 0; i < 8; ++i) ann.corners_px[i] = camera.Project(ann.box.corners[i]);
      ann.axes_px = ProjectAxes(camera, ann.box, *cand->dims);
      ann.correction = fix.offset;
      ann.theta = match.cost;
      const BorderContact contact = TouchesBorder(det, geometry);
      if (contact.left) ann.flags.push_back("border_left");
      if (contact.right) ann.flags.push_back("border_right");
      result.annotations.push_back(std::move(ann));
      result.outcomes.push_back({image.image_id, match.mmsi, det_index, outcome::kAnnotated,
                                 "matched", match.cost});
    } catch (const Error& e) {
      result.outcomes.push_back({image.image_id, match.mmsi, det_index, outcome::kDropped,
                                 std::string(ErrorCodeName(e.code())), match.cost});
    }
  }
  for (std::size_t d : assoc.unmatched_detections) {
    result.outcomes.push_back({image.image_id, std::nullopt, usable_index[d], outcome::kNoMatch,
                               "detection_without_ais", {}});
  }
  for (std::uint32_t mmsi : assoc.unmatched_vessels) {
    const auto cand = std::find_if(candidates.begin(), candidates.end(),
                                   [&](const Candidate& c) { return c.mmsi == mmsi; });
    std::optional<double> best;
    for (const auto& det : usable) {
      const double theta = MatchCost(det, cand->projected.enclosing, geometry);
      if (!best || theta < *best) best = theta;
    }
    result.outcomes.push_back({image.image_id, mmsi, std::nullopt, outcome::kNoMatch,
                               best ? "cost_too_high" : "no_detection", best});
  }
  return result;
}

std::vector<ImageResult> FuseAll(std::span<const ImageFrame> images,
                                 const std::map<std::string, CameraModel>& cameras,
                                 std::span<const AisMessage> ais,
                                 std::span<const Detection2D> detections,
                                 const FusionConfig& config, int workers) {
  config.Validate();
  std::vector<ImageFrame> ordered(images.begin(), images.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const ImageFrame& a, const ImageFrame& b) { return a.image_id < b.image_id; });
  std::map<std::string, std::vector<Detection2D>> by_image;
  for (const auto& d : detections) by_image[d.image_id].push_back(d);

  std::vector<ImageResult> results(ordered.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto fuse_one = [&](std::size_t i) {
    const ImageFrame& image = ordered[i];
    results[i].image_id = image.image_id;
    const auto cam = cameras.find(image.viewport_id);
    if (cam == cameras.end()) {
      results[i].outcomes.push_back({image.image_id, std::nullopt, std::nullopt,
                                     outcome::kExcluded, "no_camera_for_viewport", {}});
      return;
    }
    const auto vessels = Aggregate(ais, image.timestamp);
    const auto dets = by_image.find(image.image_id);
    const std::span<const Detection2D> image_dets =
        dets == by_image.end() ? std::span<const Detection2D>() : std::span(dets->second);
    results[i] = FuseImage(image, cam->second, vessels, image_dets, config);
  };
  auto work = [&]() {
    for (std::size_t i = next++; i < ordered.size(); i = next++) {
      try {
        fuse_one(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = ordered.size();
      }
    }
  };
  const int n = std::max(1, workers);
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::map<std::string, std::vector<Correspondence>> GroupByViewport(
    std::span<const KeypointRecord> keypoints) {
  std::map<std::string, std::vector<Correspondence>> out;
  for (const auto& k : keypoints) {
    out[k.viewport_id].push_back({GeodeticToEcef(k.position), k.pixel});
  }
  return out;
}

ViewportCalibration CalibrateViewport(const std::string& viewport_id,
                                      std::span<const Correspondence> correspondences,
                                      const Intrinsics& intrinsics, double water_height_m) {
  CameraModel pnp = SolvePnP(correspondences, intrinsics);

  std::vector<EcefPoint> world;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& c : correspondences) {
    world.push_back(c.world);
    centroid += c.world;
  }
  centroid /= static_cast<double>(world.size());
  GeodeticCoord anchor = EcefToGeodetic(centroid);
  anchor.height_m = water_height_m;

  return {viewport_id,
          pnp,
          FitPlaneHomography(TangentInterimPlane(anchor), correspondences),
          FitPlaneHomography(PcaInterimPlane(world), correspondences),
          std::vector<Correspondence>(correspondences.begin(), correspondences.end())};
}

}  // namespace vesselpose
