#include "vesselpose/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "vesselpose/error.h"
#include "vesselpose/evalkit.h"
#include "vesselpose/io.h"

namespace vesselpose {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kEdgeMarginPx = 8.0;

std::uint64_t TwosComplement(std::int64_t v) { return static_cast<std::uint64_t>(v); }

std::string Sentence(int count, int index, std::optional<int> message_id, char channel,
                     const std::string& payload, int fill) {
  std::ostringstream body;
  body << "AIVDM," << count << "," << index << ","
       << (message_id ? std::to_string(*message_id) : std::string()) << "," << channel << ","
       << payload << "," << fill;
  char checksum[4];
  std::snprintf(checksum, sizeof(checksum), "%02X", NmeaChecksum(body.str()));
  return "!" + body.str() + "*" + checksum;
}

std::string LogLine(double timestamp, const std::string& sentence) {
  char stamp[32];
  std::snprintf(stamp, sizeof(stamp), "%.3f", timestamp);
  return std::string(stamp) + " " + sentence;
}

// Moves a geodetic point by `east`/`north` metres in its tangent plane and
// keeps its height.
GeodeticCoord Offset(const GeodeticCoord& g, double east, double north) {
  const EnuFrame enu = EnuFrameAt(g);
  GeodeticCoord out = EcefToGeodetic(GeodeticToEcef(g) + east * enu.east + north * enu.north);
  out.height_m = g.height_m;
  return out;
}

bool InsideImage(const Eigen::Vector2d& p, const Intrinsics& k, double margin) {
  return p.x() >= margin && p.y() >= margin && p.x() <= k.width - margin &&
         p.y() <= k.height - margin;
}

double HorizontalHalfFov(const Intrinsics& k) { return std::atan2(0.5 * k.width, k.fx); }

struct VesselMessages {
  PositionReport position;
  StaticVoyage voyage;
};

VesselMessages MessagesFor(const VesselSpec& v, double image_time, double lat, double lon) {
  VesselMessages m;
  m.position.mmsi = v.mmsi;
  m.position.message_type = 1;
  m.position.timestamp = image_time - v.age_ms / 1000.0;
  m.position.latitude_deg = QuantizeLatLon(lat);
  m.position.longitude_deg = QuantizeLatLon(lon);
  m.position.speed_over_ground_mps =
      std::llround(v.speed_knots * 10.0) / 10.0 * kKnotsToMetersPerSecond;
  m.position.course_over_ground_deg = static_cast<double>(v.heading_deg);
  m.position.heading_deg = static_cast<double>(v.heading_deg);

  m.voyage.mmsi = v.mmsi;
  m.voyage.timestamp = m.position.timestamp - 1.0;
  char name[32];
  std::snprintf(name, sizeof(name), "VESSEL %u", v.mmsi % 100000);
  m.voyage.name = name;
  std::snprintf(name, sizeof(name), "DV%05u", v.mmsi % 100000);
  m.voyage.callsign = name;
  m.voyage.ship_type = 70;
  m.voyage.dim_to_bow = v.dim_to_bow;
  m.voyage.dim_to_stern = v.dim_to_stern;
  m.voyage.dim_to_port = v.dim_to_port;
  m.voyage.dim_to_starboard = v.dim_to_starboard;
  return m;
}

// Log lines for one vessel; message ids cycle through 0-9 for multipart.
void AppendLog(const VesselMessages& m, int* next_id, std::vector<std::pair<double, std::string>>* log) {
  const char channel = (*next_id % 2 == 0) ? 'A' : 'B';
  for (const auto& s : EncodeSentences(EncodeStaticVoyage(m.voyage), channel, *next_id % 10)) {
    log->emplace_back(m.voyage.timestamp, s);
  }
  ++*next_id;
  for (const auto& s : EncodeSentences(EncodePositionReport(m.position), channel, 0)) {
    log->emplace_back(m.position.timestamp, s);
  }
}

std::vector<std::string> SortedLog(std::vector<std::pair<double, std::string>> log) {
  std::stable_sort(log.begin(), log.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> lines;
  for (const auto& [t, s] : log) lines.push_back(LogLine(t, s));
  return lines;
}

double ImageTime(const SceneSpec& spec, int image) {
  return spec.base_timestamp + image * spec.image_interval_s;
}

std::string ImageId(const SceneSpec& spec, int image) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04d", image);
  return spec.scene_id + buf;
}

// Box of a vessel exactly as the fusion forward model rebuilds it from the
// encoded (noise-free) messages.
Box3D TruthBox(const VesselSpec& v, const SceneSpec& spec) {
  const double t = ImageTime(spec, v.image);
  const VesselMessages m = MessagesFor(v, t, v.latitude_deg, v.longitude_deg);
  int id = 0;
  std::vector<std::pair<double, std::string>> log;
  AppendLog(m, &id, &log);
  std::istringstream in([&] {
    std::string text;
    for (const auto& line : SortedLog(log)) text += line + "\n";
    return text;
  }());
  const std::vector<AisMessage> messages = ReadAisLog(in);
  const auto states = Aggregate(messages, t);
  const VesselState& state = states.at(v.mmsi);
  const VesselFrame frame = BuildVesselFrame(state, spec.water_height_m);
  return BuildBox3D(WaterPlaneSegment(state, frame, t), v.height_m);
}

std::array<Eigen::Vector2d, 8> ProjectBox(const CameraModel& camera, const Box3D& box) {
  std::array<Eigen::Vector2d, 8> px;
  for (int i = 0; i < 8; ++i) {
    if (camera.Depth(box.corners[i]) <= 1.0) {
      throw Error(ErrorCode::kUnrenderable, "vessel corner behind the camera");
    }
    px[i] = camera.Project(box.corners[i]);
  }
  return px;
}

}  // namespace

AisBits EncodePositionReport(const PositionReport& r) {
  if (r.message_type < 1 || r.message_type > 3) {
    throw Error(ErrorCode::kInvalidArgument, "position reports are types 1-3");
  }
  AisBits bits;
  bits.AppendUnsigned(r.message_type, 6);
  bits.AppendUnsigned(0, 2);  // repeat
  bits.AppendUnsigned(r.mmsi, 30);
  bits.AppendUnsigned(0, 4);     // navigation status: under way using engine
  bits.AppendUnsigned(0x80, 8);  // rate of turn not available
  const std::uint64_t sog =
      r.speed_over_ground_mps
          ? std::min<std::uint64_t>(1022, std::llround(*r.speed_over_ground_mps /
                                                       kKnotsToMetersPerSecond * 10.0))
          : 1023;
  bits.AppendUnsigned(sog, 10);
  bits.AppendUnsigned(0, 1);  // position accuracy
  const std::int64_t lon =
      r.longitude_deg ? std::llround(*r.longitude_deg * 600000.0) : 181 * 600000;
  const std::int64_t lat = r.latitude_deg ? std::llround(*r.latitude_deg * 600000.0) : 91 * 600000;
  bits.AppendUnsigned(TwosComplement(lon), 28);
  bits.AppendUnsigned(TwosComplement(lat), 27);
  const std::uint64_t cog =
      r.course_over_ground_deg ? std::llround(*r.course_over_ground_deg * 10.0) % 3600 : 3600;
  bits.AppendUnsigned(cog, 12);
  const std::uint64_t heading =
      r.heading_deg ? std::llround(*r.heading_deg) % 360 : kHeadingUnavailable;
  bits.AppendUnsigned(heading, 9);
  bits.AppendUnsigned(60, 6);  // time stamp not available
  bits.AppendUnsigned(0, 2);   // maneuver indicator
  bits.AppendUnsigned(0, 3);   // spare
  bits.AppendUnsigned(0, 1);   // RAIM
  bits.AppendUnsigned(0, 19);  // radio status
  return bits;
}

AisBits EncodeStaticVoyage(const StaticVoyage& s) {
  auto check = [](int v, int width, const char* what) {
    if (v < 0 || v >= (1 << width)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " does not fit its field");
    }
  };
  check(s.ship_type, 8, "ship type");
  check(s.dim_to_bow, 9, "dimension to bow");
  check(s.dim_to_stern, 9, "dimension to stern");
  check(s.dim_to_port, 6, "dimension to port");
  check(s.dim_to_starboard, 6, "dimension to starboard");
  AisBits bits;
  bits.AppendUnsigned(5, 6);
  bits.AppendUnsigned(0, 2);
  bits.AppendUnsigned(s.mmsi, 30);
  bits.AppendUnsigned(0, 2);   // AIS version
  bits.AppendUnsigned(0, 30);  // IMO number
  bits.AppendText(s.callsign, 7);
  bits.AppendText(s.name, 20);
  bits.AppendUnsigned(s.ship_type, 8);
  bits.AppendUnsigned(s.dim_to_bow, 9);
  bits.AppendUnsigned(s.dim_to_stern, 9);
  bits.AppendUnsigned(s.dim_to_port, 6);
  bits.AppendUnsigned(s.dim_to_starboard, 6);
  bits.AppendUnsigned(1, 4);   // EPFD: GPS
  bits.AppendUnsigned(0, 4);   // ETA month
  bits.AppendUnsigned(0, 5);   // ETA day
  bits.AppendUnsigned(24, 5);  // ETA hour
  bits.AppendUnsigned(60, 6);  // ETA minute
  bits.AppendUnsigned(0, 8);   // draught
  bits.AppendText("", 20);     // destination
  bits.AppendUnsigned(0, 1);   // DTE
  bits.AppendUnsigned(0, 1);   // spare
  return bits;
}

std::vector<std::string> EncodeSentences(const AisBits& bits, char channel, int message_id) {
  int fill = 0;
  const std::string payload = bits.Armor(&fill);
  constexpr std::size_t kMaxPayload = 60;
  const int count = static_cast<int>((payload.size() + kMaxPayload - 1) / kMaxPayload);
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    const std::string part = payload.substr(i * kMaxPayload, kMaxPayload);
    out.push_back(Sentence(count, i + 1, count > 1 ? std::optional<int>(message_id) : std::nullopt,
                           channel, part, i + 1 == count ? fill : 0));
  }
  return out;
}

std::vector<std::string> EncodeAis(const VesselState& state, char channel, int message_id) {
  std::vector<std::string> out;
  if (state.static_voyage) {
    out = EncodeSentences(EncodeStaticVoyage(*state.static_voyage), channel, message_id);
  }
  if (state.position) {
    for (auto& s : EncodeSentences(EncodePositionReport(*state.position), channel, message_id)) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

double QuantizeLatLon(double degrees) { return std::llround(degrees * 600000.0) / 600000.0; }

double QuantizeSpeedKnots(double knots) { return std::llround(knots * 10.0) / 10.0; }

CameraModel CameraFromSpec(const CameraSpec& spec) {
  const EnuFrame enu = EnuFrameAt(spec.position);
  const double yaw = spec.yaw_deg * kDeg, pitch = spec.pitch_deg * kDeg, roll = spec.roll_deg * kDeg;
  const Eigen::Vector3d forward =
      std::cos(pitch) * (std::sin(yaw) * enu.east + std::cos(yaw) * enu.north) -
      std::sin(pitch) * enu.up;
  const Eigen::Vector3d right0 = std::cos(yaw) * enu.east - std::sin(yaw) * enu.north;
  const Eigen::Vector3d down0 = forward.cross(right0);
  const Eigen::Vector3d right = std::cos(roll) * right0 + std::sin(roll) * down0;
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.normalized();
  r.row(1) = down.normalized();
  r.row(2) = forward.normalized();
  const Eigen::Vector3d center = GeodeticToEcef(spec.position);
  return CameraModel(spec.intrinsics, r, -r * center);
}

void SceneSpec::Validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidArgument, why); };
  if (n_images < 1) fail("scene needs at least one image");
  if (n_keypoints < 6) fail("scene needs at least 6 keypoints");
  if (!(keypoint_height_spread_m >= 0.0)) fail("keypoint height spread must be >= 0");
  if (camera.intrinsics.width <= 0 || camera.intrinsics.height <= 0) fail("empty image size");
  auto prob = [&](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(what) + " must be a probability");
  };
  prob(noise.detection_dropout_p, "detection dropout");
  prob(noise.ais_dropout_p, "AIS dropout");
  if (!(noise.ais_position_offset_m >= 0.0 && noise.pixel_noise_px >= 0.0 &&
        noise.keypoint_pixel_noise_px >= 0.0)) {
    fail("noise magnitudes must be >= 0");
  }
  std::set<std::uint32_t> seen;
  for (const auto& v : vessels) {
    if (!seen.insert(v.mmsi).second) fail("duplicate vessel mmsi");
    if (v.mmsi == 0 || v.mmsi >= (1U << 30)) fail("mmsi does not fit its field");
    if (v.image < 0 || v.image >= n_images) fail("vessel image index out of range");
    if (v.dim_to_bow + v.dim_to_stern <= 0 || v.dim_to_port + v.dim_to_starboard <= 0 ||
        v.dim_to_bow < 0 || v.dim_to_stern < 0 || v.dim_to_port < 0 || v.dim_to_starboard < 0) {
      fail("vessel dimensions must be positive");
    }
    if (!(v.height_m > 0.0)) fail("vessel height must be positive");
    if (v.heading_deg < 0 || v.heading_deg >= 360) fail("heading outside [0, 360)");
    if (!(v.speed_knots >= 0.0 && v.speed_knots < 102.2)) fail("speed outside the SOG field");
    if (v.age_ms < 0) fail("message age must be >= 0");
    if (!(v.score > 0.0 && v.score <= 1.0)) fail("score outside (0, 1]");
  }
}

SceneSpec SampleSceneSpec(std::uint64_t seed, const SamplerOptions& options, const NoiseSpec& noise) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto integer = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  SceneSpec spec;
  spec.seed = seed;
  char id[32];
  std::snprintf(id, sizeof(id), "scene%llu", static_cast<unsigned long long>(seed));
  spec.scene_id = id;
  spec.noise = noise;
  spec.n_images = options.n_images;
  spec.water_height_m = uniform(38.0, 42.0);

  CameraSpec& cam = spec.camera;
  cam.position = {53.54 + uniform(-0.01, 0.01), 9.97 + uniform(-0.02, 0.02),
                  spec.water_height_m + uniform(12.0, 30.0)};
  cam.yaw_deg = uniform(0.0, 360.0);
  cam.pitch_deg = uniform(options.min_pitch_deg, options.max_pitch_deg);
  cam.roll_deg = 0.0;
  const double f = uniform(1800.0, 2600.0);
  cam.intrinsics = {f, f, 1280.0 + uniform(-20.0, 20.0), 960.0 + uniform(-20.0, 20.0), 2560, 1920};
  const CameraModel camera = CameraFromSpec(cam);
  const double half_fov = HorizontalHalfFov(cam.intrinsics) * 0.85;

  std::set<std::uint32_t> used;
  for (int image = 0; image < spec.n_images; ++image) {
    const int n = integer(options.min_vessels, options.max_vessels);
    std::vector<Rect> placed;
    int placed_count = 0;
    for (int attempt = 0; placed_count < n; ++attempt) {
      if (attempt > 2000) throw Error(ErrorCode::kUnrenderable, "could not place vessels");
      VesselSpec v;
      do {
        v.mmsi = 211000000 + static_cast<std::uint32_t>(integer(0, 999999));
      } while (used.count(v.mmsi));
      v.image = image;
      v.heading_deg = integer(0, 359);
      v.speed_knots = integer(0, 150) / 10.0;
      v.age_ms = integer(0, 9000);
      const int length = integer(12, 120);
      v.dim_to_bow = integer(length / 4, 3 * length / 4);
      v.dim_to_stern = length - v.dim_to_bow;
      const int beam = std::clamp(length / 6 + integer(-2, 4), 4, 30);
      v.dim_to_port = integer(1, beam - 1);
      v.dim_to_starboard = beam - v.dim_to_port;
      v.height_m = std::round(uniform(4.0, std::min(30.0, 4.0 + 0.25 * length)) * 10.0) / 10.0;
      v.score = std::round(uniform(0.5, 1.0) * 100.0) / 100.0;

      // Antenna position at image time, then moved back along the heading to
      // the report time.
      const double bearing = cam.yaw_deg * kDeg + uniform(-half_fov, half_fov);
      const double range = uniform(options.min_range_m, options.max_range_m);
      const GeodeticCoord ground{cam.position.latitude_deg, cam.position.longitude_deg,
                                 spec.water_height_m};
      const GeodeticCoord now = Offset(ground, range * std::sin(bearing), range * std::cos(bearing));
      const double travelled =
          QuantizeSpeedKnots(v.speed_knots) * kKnotsToMetersPerSecond * v.age_ms / 1000.0;
      const double h = v.heading_deg * kDeg;
      const GeodeticCoord reported =
          Offset(now, -travelled * std::sin(h), -travelled * std::cos(h));
      v.latitude_deg = QuantizeLatLon(reported.latitude_deg);
      v.longitude_deg = QuantizeLatLon(reported.longitude_deg);

      Rect rect;
      try {
        const auto px = ProjectBox(camera, TruthBox(v, spec));
        if (!std::all_of(px.begin(), px.end(),
                         [&](const auto& p) { return InsideImage(p, cam.intrinsics, kEdgeMarginPx); })) {
          continue;
        }
        rect = Rect::Enclosing(px);
      } catch (const Error&) {
        continue;
      }
      if (rect.width() < 12.0 || rect.height() < 8.0) continue;
      const bool overlaps = std::any_of(placed.begin(), placed.end(), [&](const Rect& other) {
        return RectIoU(rect, other) > options.max_pair_iou;
      });
      if (overlaps) continue;
      placed.push_back(rect);
      used.insert(v.mmsi);
      spec.vessels.push_back(v);
      ++placed_count;
    }
  }
  return spec;
}

Scene GenerateScene(const SceneSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto gauss = [&rng](double sigma) {
    return sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(rng) : 0.0;
  };
  auto bernoulli = [&rng](double p) {
    return p > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  };

  const Intrinsics& k = spec.camera.intrinsics;
  Scene scene{spec, CameraFromSpec(spec.camera), {}, {}, {}, {}, {}};
  const CameraModel& camera = scene.camera;

  const double half_fov = HorizontalHalfFov(k) * 0.9;
  const GeodeticCoord ground{spec.camera.position.latitude_deg, spec.camera.position.longitude_deg,
                             spec.water_height_m};
  for (int i = 0; i < spec.n_keypoints; ++i) {
    const double lift = i == 0   ? 0.0
                        : i == 1 ? spec.keypoint_height_spread_m
                                 : uniform(0.0, spec.keypoint_height_spread_m);
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw Error(ErrorCode::kUnrenderable, "could not place keypoints");
      const double bearing = spec.camera.yaw_deg * kDeg + uniform(-half_fov, half_fov);
      const double range = uniform(50.0, 500.0);
      GeodeticCoord g = Offset(ground, range * std::sin(bearing), range * std::cos(bearing));
      g.height_m = spec.water_height_m + lift;
      const EcefPoint p = GeodeticToEcef(g);
      if (camera.Depth(p) <= 1.0) continue;
      const Eigen::Vector2d px = camera.Project(p);
      if (!InsideImage(px, k, kEdgeMarginPx)) continue;
      char id[16];
      std::snprintf(id, sizeof(id), "kp%02d", i);
      scene.keypoints.push_back(
          {id, g, px + Eigen::Vector2d(gauss(spec.noise.keypoint_pixel_noise_px),
                                       gauss(spec.noise.keypoint_pixel_noise_px)),
           spec.viewport_id});
      break;
    }
  }

  for (int i = 0; i < spec.n_images; ++i) {
    scene.images.push_back({ImageId(spec, i), ImageTime(spec, i), spec.viewport_id});
  }

  struct Pending {
    GroundTruthVessel truth;
    std::optional<Detection2D> detection;
  };
  std::vector<Pending> pending;
  std::vector<std::pair<double, std::string>> log;
  int message_id = 0;
  for (const VesselSpec& v : spec.vessels) {
    Pending p;
    p.truth.image_id = ImageId(spec, v.image);
    p.truth.mmsi = v.mmsi;
    p.truth.box3d = TruthBox(v, spec);
    std::array<Eigen::Vector2d, 8> px;
    try {
      px = ProjectBox(camera, p.truth.box3d);
    } catch (const Error&) {
      throw Error(ErrorCode::kUnrenderable, "vessel " + std::to_string(v.mmsi) + " is behind the camera");
    }
    for (const auto& q : px) {
      if (!InsideImage(q, k, 0.0)) {
        throw Error(ErrorCode::kUnrenderable, "vessel " + std::to_string(v.mmsi) + " leaves the image");
      }
    }
    p.truth.box = Rect::Enclosing(px);

    // Noise in a fixed order: AIS offset, detection pixels, dropouts.
    const double angle = uniform(0.0, 2.0 * std::numbers::pi);
    const GeodeticCoord sent =
        Offset({v.latitude_deg, v.longitude_deg, spec.water_height_m},
               spec.noise.ais_position_offset_m * std::cos(angle),
               spec.noise.ais_position_offset_m * std::sin(angle));
    Detection2D det;
    det.image_id = p.truth.image_id;
    det.x1 = std::clamp(p.truth.box.min_x + gauss(spec.noise.pixel_noise_px), 0.0, double(k.width));
    det.y1 = std::clamp(p.truth.box.min_y + gauss(spec.noise.pixel_noise_px), 0.0, double(k.height));
    det.x2 = std::clamp(p.truth.box.max_x + gauss(spec.noise.pixel_noise_px), 0.0, double(k.width));
    det.y2 = std::clamp(p.truth.box.max_y + gauss(spec.noise.pixel_noise_px), 0.0, double(k.height));
    det.score = v.score;
    det.class_name = v.class_name;
    const bool drop_detection = bernoulli(spec.noise.detection_dropout_p);
    const bool drop_ais = bernoulli(spec.noise.ais_dropout_p);
    if (!drop_detection) p.detection = det;
    p.truth.has_ais = !drop_ais;
    if (!drop_ais) {
      AppendLog(MessagesFor(v, ImageTime(spec, v.image), sent.latitude_deg, sent.longitude_deg),
                &message_id, &log);
    }
    pending.push_back(std::move(p));
  }
  scene.ais_log = SortedLog(std::move(log));

  // Detections per image in left-to-right order, like a detector's output.
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    if (a.truth.image_id != b.truth.image_id) return a.truth.image_id < b.truth.image_id;
    return a.truth.box.min_x < b.truth.box.min_x;
  });
  std::map<std::string, std::size_t> per_image;
  for (auto& p : pending) {
    if (p.detection) {
      p.truth.detection_index = per_image[p.truth.image_id]++;
      scene.detections.push_back(*p.detection);
    }
    scene.ground_truth.push_back(std::move(p.truth));
  }
  return scene;
}

void WriteScene(const Scene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  WriteSceneSpec(dir / "spec.json", scene.spec);
  WriteKeypoints(dir / "keypoints.jsonl", scene.keypoints);
  WriteIntrinsics(dir / "intrinsics.jsonl", {{scene.spec.viewport_id, scene.spec.camera.intrinsics}});
  WriteImages(dir / "images.jsonl", scene.images);
  WriteDetections(dir / "detections.jsonl", scene.detections);
  WriteGroundTruth(dir / "ground_truth.jsonl", scene.ground_truth);
  WriteCameras(dir / "cameras_truth.jsonl", {{scene.spec.viewport_id, scene.camera}});
  WriteTextLines(dir / "ais.log", scene.ais_log);
}

}  // namespace vesselpose
