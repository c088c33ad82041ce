#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vesselpose {

// WGS84 ellipsoid (EPSG:4979 / EPSG:4978).
struct Wgs84 {
  static constexpr double kSemiMajor = 6378137.0;
  static constexpr double kFlattening = 1.0 / 298.257223563;
  static constexpr double kSemiMinor = kSemiMajor * (1.0 - kFlattening);
  static constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);
};

struct GeodeticCoord {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // (-180, 180]
  double height_m = 0.0;       // above the ellipsoid
};

// Earth-centered Earth-fixed position in meters.
using EcefPoint = Eigen::Vector3d;

EcefPoint GeodeticToEcef(const GeodeticCoord& g);

// Iterative latitude solve (tolerance 1e-12 rad, at most 10 iterations).
// Longitude is reported as 0 on the polar axis. Throws kInvalidArgument at
// the Earth's center.
GeodeticCoord EcefToGeodetic(const EcefPoint& e);

struct EnuFrame {
  Eigen::Vector3d east;
  Eigen::Vector3d north;
  Eigen::Vector3d up;  // ellipsoid normal
};

EnuFrame EnuFrameAt(const GeodeticCoord& g);

// Right-handed object frame of a vessel: x forward along the heading, y to
// port, z along the local ellipsoid normal. Roll and pitch are zero.
struct VesselFrame {
  EcefPoint origin = EcefPoint::Zero();
  Eigen::Vector3d x_axis = Eigen::Vector3d::UnitX();
  Eigen::Vector3d y_axis = Eigen::Vector3d::UnitY();
  Eigen::Vector3d z_axis = Eigen::Vector3d::UnitZ();
};

// AIS "heading not available" value.
inline constexpr double kHeadingUnavailable = 511.0;

// heading_deg is measured clockwise from true north. Throws kMissingHeading
// for the AIS sentinel and kInvalidArgument outside [0, 360).
VesselFrame MakeVesselFrame(const GeodeticCoord& antenna, double heading_deg);

}  // namespace vesselpose
