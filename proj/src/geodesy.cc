#include "vesselpose/geodesy.h"

#include <cmath>
#include <numbers>

#include "vesselpose/error.h"

namespace vesselpose {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double PrimeVerticalRadius(double sin_lat) {
  return Wgs84::kSemiMajor /
         std::sqrt(1.0 - Wgs84::kEccentricitySq * sin_lat * sin_lat);
}

}  // namespace

EcefPoint GeodeticToEcef(const GeodeticCoord& g) {
  const double lat = g.latitude_deg * kDegToRad;
  const double lon = g.longitude_deg * kDegToRad;
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  const double n = PrimeVerticalRadius(sin_lat);
  return {(n + g.height_m) * cos_lat * std::cos(lon),
          (n + g.height_m) * cos_lat * std::sin(lon),
          (n * (1.0 - Wgs84::kEccentricitySq) + g.height_m) * sin_lat};
}

GeodeticCoord EcefToGeodetic(const EcefPoint& e) {
  if (!e.allFinite() || e.norm() == 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "ECEF point at the Earth's center has no geodetic position");
  }
  const double p = std::hypot(e.x(), e.y());
  GeodeticCoord g;
  if (p == 0.0) {
    g.latitude_deg = e.z() > 0.0 ? 90.0 : -90.0;
    g.longitude_deg = 0.0;
    g.height_m = std::abs(e.z()) - Wgs84::kSemiMinor;
    return g;
  }

  constexpr double a = Wgs84::kSemiMajor;
  constexpr double b = Wgs84::kSemiMinor;
  constexpr double e2 = Wgs84::kEccentricitySq;
  const double ep2 = (a * a - b * b) / (b * b);

  // Bowring's parametric-latitude start, then fixed-point refinement of
  // tan(lat) = (z + e2 N sin(lat)) / p.
  const double beta = std::atan2(a * e.z(), b * p);
  double lat = std::atan2(e.z() + ep2 * b * std::pow(std::sin(beta), 3),
                          p - e2 * a * std::pow(std::cos(beta), 3));
  for (int i = 0; i < 10; ++i) {
    const double sin_lat = std::sin(lat);
    const double next =
        std::atan2(e.z() + e2 * PrimeVerticalRadius(sin_lat) * sin_lat, p);
    const double delta = std::abs(next - lat);
    lat = next;
    if (delta < 1e-12) break;
  }

  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  g.latitude_deg = lat / kDegToRad;
  g.longitude_deg = std::atan2(e.y(), e.x()) / kDegToRad;
  if (g.longitude_deg <= -180.0) g.longitude_deg += 360.0;
  g.height_m = p * cos_lat + e.z() * sin_lat -
               a * std::sqrt(1.0 - e2 * sin_lat * sin_lat);
  return g;
}

EnuFrame EnuFrameAt(const GeodeticCoord& g) {
  const double lat = g.latitude_deg * kDegToRad;
  const double lon = g.longitude_deg * kDegToRad;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  EnuFrame f;
  f.east = {-so, co, 0.0};
  f.north = {-sl * co, -sl * so, cl};
  f.up = {cl * co, cl * so, sl};
  return f;
}

VesselFrame MakeVesselFrame(const GeodeticCoord& antenna, double heading_deg) {
  if (heading_deg == kHeadingUnavailable) {
    throw Error(ErrorCode::kMissingHeading, "heading not available");
  }
  if (!(heading_deg >= 0.0 && heading_deg < 360.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "heading outside [0, 360): " + std::to_string(heading_deg));
  }
  const EnuFrame enu = EnuFrameAt(antenna);
  const double h = heading_deg * kDegToRad;
  VesselFrame frame;
  frame.origin = GeodeticToEcef(antenna);
  frame.x_axis = (std::cos(h) * enu.north + std::sin(h) * enu.east).normalized();
  frame.z_axis = enu.up.normalized();
  frame.y_axis = frame.z_axis.cross(frame.x_axis).normalized();
  return frame;
}

}  // namespace vesselpose
