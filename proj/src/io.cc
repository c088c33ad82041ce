#include "vesselpose/io.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vesselpose/error.h"

namespace vesselpose {
namespace {

using nlohmann::json;

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return in;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

template <typename T, typename Parse>
std::vector<T> ReadRecords(const std::filesystem::path& path, Parse parse) {
  std::ifstream in = OpenIn(path);
  std::vector<T> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (j.at("format_version").get<int>() != kFormatVersion) {
        throw Error(ErrorCode::kMalformed, "unsupported format_version");
      }
      out.push_back(parse(j));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformed, path.string() + ":" + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void WriteRecords(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out = OpenOut(path);
  for (const json& r : records) out << r.dump() << "\n";
}

json Record() { return json{{"format_version", kFormatVersion}}; }

json Vec(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }
json Vec(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

Eigen::Vector3d Vec3(const json& j) {
  if (j.size() != 3) throw Error(ErrorCode::kMalformed, "expected 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::Vector2d Vec2(const json& j) {
  if (j.size() != 2) throw Error(ErrorCode::kMalformed, "expected 2 numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

json IntrinsicsJson(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
          {"width", k.width}, {"height", k.height}};
}

Intrinsics IntrinsicsFrom(const json& j) {
  return {j.at("fx").get<double>(),  j.at("fy").get<double>(),   j.at("cx").get<double>(),
          j.at("cy").get<double>(),  j.at("width").get<int>(), j.at("height").get<int>()};
}

template <typename T>
void Maybe(const json& j, const char* key, T* value) {
  if (j.contains(key)) *value = j.at(key).get<T>();
}

json NoiseJson(const NoiseSpec& n) {
  return {{"ais_position_offset_m", n.ais_position_offset_m},
          {"pixel_noise_px", n.pixel_noise_px},
          {"detection_dropout_p", n.detection_dropout_p},
          {"ais_dropout_p", n.ais_dropout_p},
          {"keypoint_pixel_noise_px", n.keypoint_pixel_noise_px}};
}

NoiseSpec NoiseFrom(const json& j) {
  NoiseSpec n;
  Maybe(j, "ais_position_offset_m", &n.ais_position_offset_m);
  Maybe(j, "pixel_noise_px", &n.pixel_noise_px);
  Maybe(j, "detection_dropout_p", &n.detection_dropout_p);
  Maybe(j, "ais_dropout_p", &n.ais_dropout_p);
  Maybe(j, "keypoint_pixel_noise_px", &n.keypoint_pixel_noise_px);
  return n;
}

json ReadJsonObject(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<KeypointRecord> ReadKeypoints(const std::filesystem::path& path) {
  return ReadRecords<KeypointRecord>(path, [](const json& j) {
    return KeypointRecord{j.at("id").get<std::string>(),
                          {j.at("lat").get<double>(), j.at("lon").get<double>(),
                           j.at("height_m").get<double>()},
                          {j.at("u_px").get<double>(), j.at("v_px").get<double>()},
                          j.value("viewport_id", std::string("cam0"))};
  });
}

void WriteKeypoints(const std::filesystem::path& path, std::span<const KeypointRecord> keypoints) {
  std::vector<json> records;
  for (const auto& k : keypoints) {
    json r = Record();
    r["id"] = k.id;
    r["lat"] = k.position.latitude_deg;
    r["lon"] = k.position.longitude_deg;
    r["height_m"] = k.position.height_m;
    r["u_px"] = k.pixel.x();
    r["v_px"] = k.pixel.y();
    r["viewport_id"] = k.viewport_id;
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

std::map<std::string, Intrinsics> ReadIntrinsics(const std::filesystem::path& path) {
  std::map<std::string, Intrinsics> out;
  for (auto& [id, k] : ReadRecords<std::pair<std::string, Intrinsics>>(path, [](const json& j) {
         return std::make_pair(j.value("viewport_id", std::string("cam0")), IntrinsicsFrom(j));
       })) {
    out[id] = k;
  }
  return out;
}

void WriteIntrinsics(const std::filesystem::path& path,
                     const std::map<std::string, Intrinsics>& intrinsics) {
  std::vector<json> records;
  for (const auto& [id, k] : intrinsics) {
    json r = Record();
    r["viewport_id"] = id;
    r.update(IntrinsicsJson(k));
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

std::vector<ImageFrame> ReadImages(const std::filesystem::path& path) {
  return ReadRecords<ImageFrame>(path, [](const json& j) {
    return ImageFrame{j.at("image_id").get<std::string>(), j.at("timestamp").get<double>(),
                      j.value("viewport_id", std::string("cam0"))};
  });
}

void WriteImages(const std::filesystem::path& path, std::span<const ImageFrame> images) {
  std::vector<json> records;
  for (const auto& im : images) {
    json r = Record();
    r["image_id"] = im.image_id;
    r["timestamp"] = im.timestamp;
    r["viewport_id"] = im.viewport_id;
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

std::vector<Detection2D> ReadDetections(const std::filesystem::path& path) {
  return ReadRecords<Detection2D>(path, [](const json& j) {
    return Detection2D{j.at("image_id").get<std::string>(), j.at("x1").get<double>(),
                       j.at("y1").get<double>(),            j.at("x2").get<double>(),
                       j.at("y2").get<double>(),            j.at("score").get<double>(),
                       j.value("class", std::string())};
  });
}

void WriteDetections(const std::filesystem::path& path, std::span<const Detection2D> detections) {
  std::vector<json> records;
  for (const auto& d : detections) {
    json r = Record();
    r["image_id"] = d.image_id;
    r["x1"] = d.x1;
    r["y1"] = d.y1;
    r["x2"] = d.x2;
    r["y2"] = d.y2;
    r["score"] = d.score;
    r["class"] = d.class_name;
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

std::map<std::string, CameraModel> ReadCameras(const std::filesystem::path& path) {
  std::map<std::string, CameraModel> out;
  const auto records = ReadRecords<std::pair<std::string, CameraModel>>(path, [](const json& j) {
    Eigen::Matrix3d r;
    const json& rows = j.at("rotation");
    if (rows.size() != 3) throw Error(ErrorCode::kMalformed, "rotation needs 3 rows");
    for (int i = 0; i < 3; ++i) r.row(i) = Vec3(rows[i]).transpose();
    try {
      return std::make_pair(j.at("viewport_id").get<std::string>(),
                            CameraModel(IntrinsicsFrom(j.at("intrinsics")), r,
                                        Vec3(j.at("translation"))));
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformed, e.what());
    }
  });
  for (const auto& [id, cam] : records) out.emplace(id, cam);
  return out;
}

void WriteCameras(const std::filesystem::path& path,
                  const std::map<std::string, CameraModel>& cameras) {
  std::vector<json> records;
  for (const auto& [id, cam] : cameras) {
    json r = Record();
    r["viewport_id"] = id;
    r["intrinsics"] = IntrinsicsJson(cam.intrinsics());
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(Vec(Eigen::Vector3d(cam.rotation().row(i))));
    r["rotation"] = rows;
    r["translation"] = Vec(cam.translation());
    r["center_ecef"] = Vec(cam.Center());
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

std::vector<Annotation> ReadAnnotations(const std::filesystem::path& path) {
  return ReadRecords<Annotation>(path, [](const json& j) {
    Annotation a;
    a.image_id = j.at("image_id").get<std::string>();
    a.mmsi = j.at("mmsi").get<std::uint32_t>();
    a.detection_index = j.at("detection_index").get<std::size_t>();
    const json& corners = j.at("corners_ecef");
    const json& px = j.at("corners_px");
    if (corners.size() != 8 || px.size() != 8) throw Error(ErrorCode::kMalformed, "need 8 corners");
    for (int i = 0; i < 8; ++i) {
      a.box.corners[i] = Vec3(corners[i]);
      a.corners_px[i] = Vec2(px[i]);
    }
    a.box.centroid = Vec3(j.at("centroid_ecef"));
    const json& axes = j.at("rotation_axes");
    if (axes.size() != 3) throw Error(ErrorCode::kMalformed, "need 3 rotation axes");
    a.box.frame.origin = Vec3(j.at("origin_ecef"));
    a.box.frame.x_axis = Vec3(axes[0]);
    a.box.frame.y_axis = Vec3(axes[1]);
    a.box.frame.z_axis = Vec3(axes[2]);
    a.box.height_m = j.at("h_v_m").get<double>();
    const json& axes_px = j.at("axes_px");
    if (axes_px.size() != 4) throw Error(ErrorCode::kMalformed, "need 4 axis points");
    for (int i = 0; i < 4; ++i) a.axes_px[i] = Vec2(axes_px[i]);
    a.correction = Vec3(j.at("correction_m"));
    a.theta = j.at("theta").get<double>();
    a.flags = j.at("match_quality_flags").get<std::vector<std::string>>();
    return a;
  });
}

void WriteAnnotations(const std::filesystem::path& path, std::span<const ImageResult> results) {
  std::vector<json> records;
  for (const auto& result : results) {
    for (const auto& a : result.annotations) {
      json r = Record();
      r["image_id"] = a.image_id;
      r["mmsi"] = a.mmsi;
      r["detection_index"] = a.detection_index;
      json corners = json::array(), px = json::array(), axes_px = json::array();
      for (int i = 0; i < 8; ++i) {
        corners.push_back(Vec(a.box.corners[i]));
        px.push_back(Vec(a.corners_px[i]));
      }
      for (const auto& p : a.axes_px) axes_px.push_back(Vec(p));
      r["corners_ecef"] = corners;
      r["corners_px"] = px;
      r["centroid_ecef"] = Vec(a.box.centroid);
      r["origin_ecef"] = Vec(a.box.frame.origin);
      r["rotation_axes"] = json::array(
          {Vec(a.box.frame.x_axis), Vec(a.box.frame.y_axis), Vec(a.box.frame.z_axis)});
      r["h_v_m"] = a.box.height_m;
      r["axes_px"] = axes_px;
      r["correction_m"] = Vec(a.correction);
      r["theta"] = a.theta;
      r["match_quality_flags"] = a.flags;
      records.push_back(std::move(r));
    }
  }
  WriteRecords(path, records);
}

std::vector<VesselOutcome> ReadOutcomes(const std::filesystem::path& path) {
  return ReadRecords<VesselOutcome>(path, [](const json& j) {
    VesselOutcome o;
    o.image_id = j.at("image_id").get<std::string>();
    if (!j.at("mmsi").is_null()) o.mmsi = j.at("mmsi").get<std::uint32_t>();
    if (!j.at("detection_index").is_null()) o.detection_index = j.at("detection_index").get<std::size_t>();
    o.outcome = j.at("outcome").get<std::string>();
    o.reason = j.at("reason").get<std::string>();
    if (!j.at("theta").is_null()) o.theta = j.at("theta").get<double>();
    return o;
  });
}

void WriteOutcomes(const std::filesystem::path& path, std::span<const ImageResult> results) {
  std::vector<json> records;
  for (const auto& result : results) {
    for (const auto& o : result.outcomes) {
      json r = Record();
      r["image_id"] = o.image_id;
      r["mmsi"] = o.mmsi ? json(*o.mmsi) : json(nullptr);
      r["detection_index"] = o.detection_index ? json(*o.detection_index) : json(nullptr);
      r["outcome"] = o.outcome;
      r["reason"] = o.reason;
      r["theta"] = o.theta ? json(*o.theta) : json(nullptr);
      records.push_back(std::move(r));
    }
  }
  WriteRecords(path, records);
}

std::vector<GroundTruthVessel> ReadGroundTruth(const std::filesystem::path& path) {
  return ReadRecords<GroundTruthVessel>(path, [](const json& j) {
    GroundTruthVessel g;
    g.image_id = j.at("image_id").get<std::string>();
    g.mmsi = j.at("mmsi").get<std::uint32_t>();
    if (!j.at("detection_index").is_null()) g.detection_index = j.at("detection_index").get<std::size_t>();
    g.has_ais = j.at("has_ais").get<bool>();
    const json& box = j.at("box");
    if (box.size() != 4) throw Error(ErrorCode::kMalformed, "box needs 4 numbers");
    g.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(), box[3].get<double>()};
    if (j.contains("corners_ecef")) {
      const json& corners = j.at("corners_ecef");
      if (corners.size() != 8) throw Error(ErrorCode::kMalformed, "need 8 corners");
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      for (int i = 0; i < 8; ++i) {
        g.box3d.corners[i] = Vec3(corners[i]);
        sum += g.box3d.corners[i];
      }
      g.box3d.centroid = sum / 8.0;
      g.box3d.height_m = j.value("height_m", 0.0);
    }
    return g;
  });
}

void WriteGroundTruth(const std::filesystem::path& path,
                      std::span<const GroundTruthVessel> ground_truth) {
  std::vector<json> records;
  for (const auto& g : ground_truth) {
    json r = Record();
    r["image_id"] = g.image_id;
    r["mmsi"] = g.mmsi;
    r["detection_index"] = g.detection_index ? json(*g.detection_index) : json(nullptr);
    r["has_ais"] = g.has_ais;
    r["box"] = json::array({g.box.min_x, g.box.min_y, g.box.max_x, g.box.max_y});
    json corners = json::array();
    for (const auto& c : g.box3d.corners) corners.push_back(Vec(c));
    r["corners_ecef"] = corners;
    r["height_m"] = g.box3d.height_m;
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

namespace {

json SpecJson(const SceneSpec& s) {
  json vessels = json::array();
  for (const auto& v : s.vessels) {
    vessels.push_back({{"mmsi", v.mmsi},
                       {"image", v.image},
                       {"lat", v.latitude_deg},
                       {"lon", v.longitude_deg},
                       {"heading_deg", v.heading_deg},
                       {"speed_knots", v.speed_knots},
                       {"age_ms", v.age_ms},
                       {"dim_to_bow", v.dim_to_bow},
                       {"dim_to_stern", v.dim_to_stern},
                       {"dim_to_port", v.dim_to_port},
                       {"dim_to_starboard", v.dim_to_starboard},
                       {"height_m", v.height_m},
                       {"score", v.score},
                       {"class", v.class_name}});
  }
  return {{"format_version", kFormatVersion},
          {"seed", s.seed},
          {"scene_id", s.scene_id},
          {"viewport_id", s.viewport_id},
          {"camera",
           {{"lat", s.camera.position.latitude_deg},
            {"lon", s.camera.position.longitude_deg},
            {"height_m", s.camera.position.height_m},
            {"yaw_deg", s.camera.yaw_deg},
            {"pitch_deg", s.camera.pitch_deg},
            {"roll_deg", s.camera.roll_deg},
            {"intrinsics", IntrinsicsJson(s.camera.intrinsics)}}},
          {"water_height_m", s.water_height_m},
          {"n_images", s.n_images},
          {"base_timestamp", s.base_timestamp},
          {"image_interval_s", s.image_interval_s},
          {"n_keypoints", s.n_keypoints},
          {"keypoint_height_spread_m", s.keypoint_height_spread_m},
          {"vessels", vessels},
          {"noise", NoiseJson(s.noise)}};
}

SceneSpec SpecFrom(const json& j) {
  SceneSpec s;
  Maybe(j, "seed", &s.seed);
  Maybe(j, "scene_id", &s.scene_id);
  Maybe(j, "viewport_id", &s.viewport_id);
  if (j.contains("camera")) {
    const json& c = j.at("camera");
    s.camera.position = {c.at("lat").get<double>(), c.at("lon").get<double>(),
                         c.at("height_m").get<double>()};
    Maybe(c, "yaw_deg", &s.camera.yaw_deg);
    Maybe(c, "pitch_deg", &s.camera.pitch_deg);
    Maybe(c, "roll_deg", &s.camera.roll_deg);
    s.camera.intrinsics = IntrinsicsFrom(c.at("intrinsics"));
  }
  Maybe(j, "water_height_m", &s.water_height_m);
  Maybe(j, "n_images", &s.n_images);
  Maybe(j, "base_timestamp", &s.base_timestamp);
  Maybe(j, "image_interval_s", &s.image_interval_s);
  Maybe(j, "n_keypoints", &s.n_keypoints);
  Maybe(j, "keypoint_height_spread_m", &s.keypoint_height_spread_m);
  if (j.contains("noise")) s.noise = NoiseFrom(j.at("noise"));
  for (const json& v : j.value("vessels", json::array())) {
    VesselSpec vs;
    vs.mmsi = v.at("mmsi").get<std::uint32_t>();
    Maybe(v, "image", &vs.image);
    vs.latitude_deg = v.at("lat").get<double>();
    vs.longitude_deg = v.at("lon").get<double>();
    vs.heading_deg = v.at("heading_deg").get<int>();
    Maybe(v, "speed_knots", &vs.speed_knots);
    Maybe(v, "age_ms", &vs.age_ms);
    vs.dim_to_bow = v.at("dim_to_bow").get<int>();
    vs.dim_to_stern = v.at("dim_to_stern").get<int>();
    vs.dim_to_port = v.at("dim_to_port").get<int>();
    vs.dim_to_starboard = v.at("dim_to_starboard").get<int>();
    vs.height_m = v.at("height_m").get<double>();
    Maybe(v, "score", &vs.score);
    Maybe(v, "class", &vs.class_name);
    s.vessels.push_back(vs);
  }
  return s;
}

}  // namespace

SceneSpec ReadSceneSpec(const std::filesystem::path& path) {
  const json j = ReadJsonObject(path);
  try {
    return SpecFrom(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

void WriteSceneSpec(const std::filesystem::path& path, const SceneSpec& spec) {
  std::ofstream out = OpenOut(path);
  out << SpecJson(spec).dump(2) << "\n";
}

SynthRequest ReadSynthRequest(const std::filesystem::path& path) {
  const json j = ReadJsonObject(path);
  SynthRequest req;
  try {
    if (j.contains("vessels")) {
      req.spec = SpecFrom(j);
      req.seed = req.spec->seed;
      return req;
    }
    Maybe(j, "seed", &req.seed);
    if (j.contains("noise")) req.noise = NoiseFrom(j.at("noise"));
    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      Maybe(s, "min_vessels", &req.sampler.min_vessels);
      Maybe(s, "max_vessels", &req.sampler.max_vessels);
      Maybe(s, "min_pitch_deg", &req.sampler.min_pitch_deg);
      Maybe(s, "max_pitch_deg", &req.sampler.max_pitch_deg);
      Maybe(s, "min_range_m", &req.sampler.min_range_m);
      Maybe(s, "max_range_m", &req.sampler.max_range_m);
      Maybe(s, "max_pair_iou", &req.sampler.max_pair_iou);
      Maybe(s, "n_images", &req.sampler.n_images);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  return req;
}

void WriteReprojectionRecords(const std::filesystem::path& path,
                              std::span<const ReprojectionRow> rows,
                              const std::string& viewport_id) {
  std::vector<json> records;
  for (const auto& row : rows) {
    json r = Record();
    r["viewport_id"] = viewport_id;
    r["method"] = row.method;
    r["mae_px"] = row.report.mae_px;
    r["mae_over_width_pct"] = row.report.mae_over_width_pct;
    r["mae_over_height_pct"] = row.report.mae_over_height_pct;
    r["count"] = row.report.count;
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

void WriteMatchingRecords(const std::filesystem::path& path, const MatchingReport& report,
                          const std::map<std::string, IouSummary>& iou) {
  std::vector<json> records;
  auto add = [&](const char* result, const std::map<std::string, int>& rows, bool emitted) {
    for (const auto& [reason, count] : rows) {
      json r = Record();
      r["kind"] = "matching";
      r["result"] = result;
      r["reason"] = reason;
      r["count"] = count;
      r["pct_total"] = report.PercentOfTotal(count);
      r["pct_emitted"] = emitted ? json(report.PercentOfEmitted(count)) : json(nullptr);
      records.push_back(std::move(r));
    }
  };
  add("correct", report.correct_by_reason, true);
  add("wrong", report.wrong_by_reason, true);
  add("no_match", report.no_match_by_reason, false);
  for (const auto& [name, s] : iou) {
    json r = Record();
    r["kind"] = "iou";
    r["group"] = name;
    r["count"] = s.count;
    r["mean"] = s.mean;
    r["q1"] = s.q1;
    r["median"] = s.median;
    r["q3"] = s.q3;
    records.push_back(std::move(r));
  }
  for (const auto& e : report.entries) {
    json r = Record();
    r["kind"] = "entry";
    r["image_id"] = e.image_id;
    r["true_mmsi"] = e.true_mmsi ? json(*e.true_mmsi) : json(nullptr);
    r["assigned_mmsi"] = e.assigned_mmsi ? json(*e.assigned_mmsi) : json(nullptr);
    r["result"] = e.result == MatchResult::kCorrect ? "correct"
                  : e.result == MatchResult::kWrong ? "wrong"
                                                    : "no_match";
    r["reason"] = e.reason;
    r["iou"] = e.iou ? json(*e.iou) : json(nullptr);
    records.push_back(std::move(r));
  }
  WriteRecords(path, records);
}

std::vector<std::string> ReadTextLines(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

void WriteTextLines(const std::filesystem::path& path, std::span<const std::string> lines) {
  std::ofstream out = OpenOut(path);
  for (const auto& l : lines) out << l << "\n";
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = OpenOut(path);
  out << text;
}

}  // namespace vesselpose
