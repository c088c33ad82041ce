#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vesselpose/ais.h"
#include "vesselpose/camera.h"
#include "vesselpose/fusion.h"
#include "vesselpose/geodesy.h"
#include "vesselpose/pipeline.h"

namespace vesselpose {

// Field-level AIS encoders, inverse of the decoders at field resolution.
// Unavailable optionals are written as their sentinels.
AisBits EncodePositionReport(const PositionReport& report);
AisBits EncodeStaticVoyage(const StaticVoyage& voyage);

// Armors `bits` into AIVDM sentences of at most 60 payload characters.
// `message_id` is only written for multipart messages.
std::vector<std::string> EncodeSentences(const AisBits& bits, char channel, int message_id);

// Sentences for the position and, if present, static record of a state.
std::vector<std::string> EncodeAis(const VesselState& state, char channel = 'A',
                                   int message_id = 0);

// Rounds to the resolution of the position report fields.
double QuantizeLatLon(double degrees);
double QuantizeSpeedKnots(double knots);

struct CameraSpec {
  GeodeticCoord position;
  double yaw_deg = 0.0;    // heading of the optical axis, clockwise from north
  double pitch_deg = 0.0;  // positive looks down
  double roll_deg = 0.0;
  Intrinsics intrinsics;
};

CameraModel CameraFromSpec(const CameraSpec& spec);

struct VesselSpec {
  std::uint32_t mmsi = 0;
  int image = 0;  // index into the scene's images
  // Antenna position at report time, before noise.
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  int heading_deg = 0;
  double speed_knots = 0.0;
  int age_ms = 0;  // image time minus report time
  int dim_to_bow = 0;
  int dim_to_stern = 0;
  int dim_to_port = 0;
  int dim_to_starboard = 0;
  double height_m = 0.0;
  double score = 0.9;
  std::string class_name = "boat";
};

struct NoiseSpec {
  double ais_position_offset_m = 0.0;
  double pixel_noise_px = 0.0;
  double detection_dropout_p = 0.0;
  double ais_dropout_p = 0.0;
  double keypoint_pixel_noise_px = 0.0;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  std::string scene_id = "scene";
  std::string viewport_id = "cam0";
  CameraSpec camera;
  double water_height_m = 0.0;
  int n_images = 1;
  double base_timestamp = 1718000000.0;
  double image_interval_s = 600.0;
  int n_keypoints = 12;
  double keypoint_height_spread_m = 8.0;
  std::vector<VesselSpec> vessels;
  NoiseSpec noise;

  // Throws kInvalidArgument.
  void Validate() const;
};

struct SamplerOptions {
  int min_vessels = 3;
  int max_vessels = 8;
  double min_pitch_deg = 1.0;
  double max_pitch_deg = 5.0;
  double min_range_m = 60.0;
  double max_range_m = 450.0;
  double max_pair_iou = 0.3;
  int n_images = 1;
};

// Random scene whose vessels all render fully inside the image.
SceneSpec SampleSceneSpec(std::uint64_t seed, const SamplerOptions& options = {},
                          const NoiseSpec& noise = {});

struct GroundTruthVessel {
  std::string image_id;
  std::uint32_t mmsi = 0;
  std::optional<std::size_t> detection_index;
  bool has_ais = true;
  Rect box;  // exact enclosing rectangle of the projected box
  Box3D box3d;
};

struct Scene {
  SceneSpec spec;
  CameraModel camera;
  std::vector<KeypointRecord> keypoints;
  std::vector<ImageFrame> images;
  std::vector<std::string> ais_log;  // "<epoch> <sentence>" lines
  std::vector<Detection2D> detections;
  std::vector<GroundTruthVessel> ground_truth;
};

// Pure function of the spec. Throws kUnrenderable if a vessel or keypoint
// leaves the image or the view frustum, kInvalidArgument for a bad spec.
Scene GenerateScene(const SceneSpec& spec);

// Writes keypoints, intrinsics, images, ais.log, detections, ground_truth,
// cameras and spec files into `dir`.
void WriteScene(const Scene& scene, const std::filesystem::path& dir);

}  // namespace vesselpose
