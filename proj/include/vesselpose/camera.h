#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "vesselpose/geodesy.h"

namespace vesselpose {

// Pinhole intrinsics with zero skew and no distortion.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  Eigen::Matrix3d K() const;
};

// World-to-camera registration x = K [R | t] X. Immutable once built.
class CameraModel {
 public:
  // Throws kInvalidArgument unless R is a rotation within 1e-9 and fx, fy > 0.
  CameraModel(const Intrinsics& intrinsics, const Eigen::Matrix3d& rotation,
              const Eigen::Vector3d& translation);

  const Intrinsics& intrinsics() const { return intrinsics_; }
  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d ToCamera(const EcefPoint& p) const;
  double Depth(const EcefPoint& p) const { return ToCamera(p).z(); }

  // Throws kBehindCamera for depth <= 0.
  Eigen::Vector2d Project(const EcefPoint& p) const;

  // C = -R^T t.
  EcefPoint Center() const;

  // Unit world-space direction of the ray through `pixel`.
  Eigen::Vector3d Unproject(const Eigen::Vector2d& pixel) const;

 private:
  Intrinsics intrinsics_;
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

struct Correspondence {
  EcefPoint world;
  Eigen::Vector2d pixel;
};

// Plane spanned by two orthonormal directions through an anchor.
struct InterimPlane {
  Eigen::Matrix<double, 3, 2> basis;
  EcefPoint anchor;

  Eigen::Vector3d Normal() const { return basis.col(0).cross(basis.col(1)); }
};

// Anchor at the centroid, basis = two dominant principal directions.
// Throws kDegenerateGeometry for fewer than 3 points or collinear input.
InterimPlane PcaInterimPlane(std::span<const EcefPoint> points);

// East/north tangent plane at `anchor` (its height selects the water level).
InterimPlane TangentInterimPlane(const GeodeticCoord& anchor);

// A^T (p - anchor).
Eigen::Vector2d ProjectToPlane(const EcefPoint& p, const InterimPlane& plane);

enum class HomographyRefinement {
  kNone,               // normalized DLT only (algebraic error)
  kSymmetricTransfer,  // DLT followed by Levenberg-Marquardt
};

// Maps plane coordinates (x, y) to pixels (u, v); result has H(2,2) = 1.
// Throws kDegenerateGeometry for fewer than 4 pairs or a rank-deficient
// system.
Eigen::Matrix3d EstimateHomography(
    std::span<const Eigen::Vector2d> plane_points,
    std::span<const Eigen::Vector2d> pixels,
    HomographyRefinement refinement = HomographyRefinement::kSymmetricTransfer);

Eigen::Vector2d ApplyHomography(const Eigen::Matrix3d& H, const Eigen::Vector2d& x);

// World-to-image mapping that flattens points onto an interim plane first.
struct PlaneHomography {
  InterimPlane plane;
  Eigen::Matrix3d H = Eigen::Matrix3d::Identity();

  Eigen::Vector2d Project(const EcefPoint& p) const {
    return ApplyHomography(H, ProjectToPlane(p, plane));
  }
};

PlaneHomography FitPlaneHomography(
    const InterimPlane& plane, std::span<const Correspondence> correspondences,
    HomographyRefinement refinement = HomographyRefinement::kSymmetricTransfer);

struct PnPOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double initial_damping = 1e-3;
};

// DLT initialization followed by Levenberg-Marquardt over rotation and
// translation, in coordinates centered on the keypoint centroid.
// Throws kDegenerateGeometry (fewer than 6 points, coplanar DLT) or
// kBehindCamera if a point ends with non-positive depth.
CameraModel SolvePnP(std::span<const Correspondence> correspondences,
                     const Intrinsics& intrinsics, const PnPOptions& options = {});

// Levenberg-Marquardt from a given starting pose.
CameraModel RefinePose(std::span<const Correspondence> correspondences,
                       const CameraModel& initial, const PnPOptions& options = {});

struct ReprojectionReport {
  double mae_px = 0.0;
  double mae_over_width_pct = 0.0;
  double mae_over_height_pct = 0.0;
  std::size_t count = 0;
};

using WorldToImage = std::function<Eigen::Vector2d(const EcefPoint&)>;

ReprojectionReport ComputeReprojectionReport(const WorldToImage& project,
                                             std::span<const Correspondence> correspondences,
                                             int image_width, int image_height);
ReprojectionReport ComputeReprojectionReport(const CameraModel& model,
                                             std::span<const Correspondence> correspondences);
ReprojectionReport ComputeReprojectionReport(const PlaneHomography& homography,
                                             std::span<const Correspondence> correspondences,
                                             int image_width, int image_height);

}  // namespace vesselpose
