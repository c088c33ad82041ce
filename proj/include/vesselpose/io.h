#pragma once

#include <filesystem>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vesselpose/camera.h"
#include "vesselpose/evalkit.h"
#include "vesselpose/pipeline.h"
#include "vesselpose/synth.h"

namespace vesselpose {

// Every structured file is one JSON object per line carrying this version.
inline constexpr int kFormatVersion = 1;

// Readers throw kIo for unreadable files and kMalformed (with the line
// number) for records that do not parse or carry another format version.
std::vector<KeypointRecord> ReadKeypoints(const std::filesystem::path& path);
void WriteKeypoints(const std::filesystem::path& path, std::span<const KeypointRecord> keypoints);

std::map<std::string, Intrinsics> ReadIntrinsics(const std::filesystem::path& path);
void WriteIntrinsics(const std::filesystem::path& path,
                     const std::map<std::string, Intrinsics>& intrinsics);

std::vector<ImageFrame> ReadImages(const std::filesystem::path& path);
void WriteImages(const std::filesystem::path& path, std::span<const ImageFrame> images);

std::vector<Detection2D> ReadDetections(const std::filesystem::path& path);
void WriteDetections(const std::filesystem::path& path, std::span<const Detection2D> detections);

std::map<std::string, CameraModel> ReadCameras(const std::filesystem::path& path);
void WriteCameras(const std::filesystem::path& path,
                  const std::map<std::string, CameraModel>& cameras);

std::vector<Annotation> ReadAnnotations(const std::filesystem::path& path);
void WriteAnnotations(const std::filesystem::path& path, std::span<const ImageResult> results);

std::vector<VesselOutcome> ReadOutcomes(const std::filesystem::path& path);
void WriteOutcomes(const std::filesystem::path& path, std::span<const ImageResult> results);

std::vector<GroundTruthVessel> ReadGroundTruth(const std::filesystem::path& path);
void WriteGroundTruth(const std::filesystem::path& path,
                      std::span<const GroundTruthVessel> ground_truth);

// A single JSON object; missing keys keep their defaults.
SceneSpec ReadSceneSpec(const std::filesystem::path& path);
void WriteSceneSpec(const std::filesystem::path& path, const SceneSpec& spec);

// Input of the synth command: either a full scene spec (it has a "vessels"
// list) or sampler settings with a seed.
struct SynthRequest {
  std::optional<SceneSpec> spec;
  std::uint64_t seed = 0;
  SamplerOptions sampler;
  NoiseSpec noise;
};
SynthRequest ReadSynthRequest(const std::filesystem::path& path);

void WriteReprojectionRecords(const std::filesystem::path& path,
                              std::span<const ReprojectionRow> rows,
                              const std::string& viewport_id = "all");
void WriteMatchingRecords(const std::filesystem::path& path, const MatchingReport& report,
                          const std::map<std::string, IouSummary>& iou);

std::vector<std::string> ReadTextLines(const std::filesystem::path& path);
void WriteTextLines(const std::filesystem::path& path, std::span<const std::string> lines);
void WriteText(const std::filesystem::path& path, const std::string& text);

}  // namespace vesselpose
