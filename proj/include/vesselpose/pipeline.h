#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vesselpose/ais.h"
#include "vesselpose/camera.h"
#include "vesselpose/fusion.h"

namespace vesselpose {

struct FusionConfig {
  double water_height_m = 0.0;  // ellipsoidal height of the water surface
  double match_threshold = 0.35;
  double ais_max_age_s = 10.0;
  double border_margin_px = 2.0;
  double score_floor = 0.05;
  std::vector<std::string> classes;  // empty accepts every class
  CorrectionScheme correction = CorrectionScheme::kWaterPlaneSolve;
  SidePlanes side_planes = SidePlanes::kImageEdge;
  // Extra correct/infer-height rounds in which the box top corners also
  // bound the edge planes. 0 uses the footprint only.
  int silhouette_passes = 3;

  // Throws kConfig for non-positive thresholds.
  void Validate() const;
};

struct ImageFrame {
  std::string image_id;
  double timestamp = 0.0;
  std::string viewport_id;
};

// Stable outcome names used in the outcome log.
namespace outcome {
inline constexpr const char* kAnnotated = "annotated";
inline constexpr const char* kNoMatch = "no_match";
inline constexpr const char* kExcluded = "excluded";
inline constexpr const char* kDropped = "dropped";
inline constexpr const char* kFiltered = "filtered";
}  // namespace outcome

struct VesselOutcome {
  std::string image_id;
  std::optional<std::uint32_t> mmsi;
  std::optional<std::size_t> detection_index;
  std::string outcome;
  std::string reason;
  std::optional<double> theta;
};

struct Annotation {
  std::string image_id;
  std::uint32_t mmsi = 0;
  std::size_t detection_index = 0;
  Box3D box;
  std::array<Eigen::Vector2d, 8> corners_px;
  // Centroid followed by the ends of the x, y and z object axes.
  std::array<Eigen::Vector2d, 4> axes_px;
  Eigen::Vector3d correction = Eigen::Vector3d::Zero();
  double theta = 0.0;
  std::vector<std::string> flags;
};

struct ImageResult {
  std::string image_id;
  std::vector<Annotation> annotations;
  std::vector<VesselOutcome> outcomes;
};

// Runs association, correction and box construction for one image.
// `detections` are the image's detections in file order; their positions are
// the detection indices used in the output.
ImageResult FuseImage(const ImageFrame& image, const CameraModel& camera,
                      const std::map<std::uint32_t, VesselState>& vessels,
                      std::span<const Detection2D> detections, const FusionConfig& config);

// Fuses every image, `workers` at a time. Output is ordered by image id
// regardless of the worker count. Images whose viewport has no camera are
// reported with an excluded outcome.
std::vector<ImageResult> FuseAll(std::span<const ImageFrame> images,
                                 const std::map<std::string, CameraModel>& cameras,
                                 std::span<const AisMessage> ais,
                                 std::span<const Detection2D> detections,
                                 const FusionConfig& config, int workers = 1);

struct KeypointRecord {
  std::string id;
  GeodeticCoord position;
  Eigen::Vector2d pixel;
  std::string viewport_id;
};

std::map<std::string, std::vector<Correspondence>> GroupByViewport(
    std::span<const KeypointRecord> keypoints);

struct ViewportCalibration {
  std::string viewport_id;
  CameraModel pnp;
  PlaneHomography water_homography;
  PlaneHomography pca_homography;
  std::vector<Correspondence> correspondences;
};

// PnP and both homography baselines for one viewport. The water-plane
// homography is anchored below the keypoint centroid at the water height.
ViewportCalibration CalibrateViewport(const std::string& viewport_id,
                                      std::span<const Correspondence> correspondences,
                                      const Intrinsics& intrinsics, double water_height_m);

}  // namespace vesselpose
