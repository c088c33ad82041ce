#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "vesselpose/camera.h"
#include "vesselpose/geodesy.h"

namespace vesselpose::test {

inline std::string DataPath(const std::string& name) {
  return std::string(VESSELPOSE_TEST_DATA_DIR) + "/" + name;
}

inline Eigen::Matrix3d RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

// Camera at `center` whose optical axis points at `target`, image x roughly
// horizontal with respect to `up`.
inline CameraModel LookAt(const Intrinsics& k, const Eigen::Vector3d& center,
                          const Eigen::Vector3d& target, const Eigen::Vector3d& up) {
  const Eigen::Vector3d z = (target - center).normalized();
  const Eigen::Vector3d x = z.cross(up).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  return CameraModel(k, r, -r * center);
}

inline Intrinsics DefaultIntrinsics() { return {2000.0, 2000.0, 1280.0, 960.0, 2560, 1920}; }

}  // namespace vesselpose::test
