#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vesselpose/ais.h"
#include "vesselpose/camera.h"
#include "vesselpose/geodesy.h"

namespace vesselpose {

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() > 0.0 && height() > 0.0 ? width() * height() : 0.0; }

  static Rect Enclosing(std::span<const Eigen::Vector2d> pixels);
};

struct Detection2D {
  std::string image_id;
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;
  double score = 1.0;
  std::string class_name;

  Rect box() const { return {x1, y1, x2, y2}; }
  // Throws kInvalidArgument unless x1 < x2, y1 < y2 and score in (0, 1].
  void Validate() const;
};

// Water-level footprint. Corner order: bow-port, bow-starboard,
// stern-starboard, stern-port.
struct PlaneSegment3 {
  std::array<EcefPoint, 4> corners;
  VesselFrame frame;

  PlaneSegment3 Translated(const Eigen::Vector3d& offset) const;
  EcefPoint Center() const;
};

// Frame at the reported antenna position, lifted to the water surface.
// Throws kNotPoseReady (no position fix or no static record) or
// kMissingHeading.
VesselFrame BuildVesselFrame(const VesselState& state, double water_height_m);

// Footprint from A/B/C/D around the frame origin, dead-reckoned to
// image_time. Throws kNotPoseReady if the state lacks what the footprint
// needs or the position report is newer than the image.
PlaneSegment3 WaterPlaneSegment(const VesselState& state, const VesselFrame& frame,
                                double image_time);

struct ProjectedSegment {
  std::array<Eigen::Vector2d, 4> pixels;
  Rect enclosing;  // not clipped to the image
};

// Throws kBehindCamera if any corner has non-positive depth.
ProjectedSegment ProjectSegment(const CameraModel& model, const PlaneSegment3& segment);

struct ImageGeometry {
  int width = 0;
  int height = 0;
  double border_margin_px = 2.0;
};

struct BorderContact {
  bool left = false;
  bool right = false;
  bool any() const { return left || right; }
};

// A detection touches the left/right border if that edge is within the
// margin of the image edge.
BorderContact TouchesBorder(const Detection2D& det, const ImageGeometry& image);

struct CostTerms {
  double delta_cx = 0.0;
  double delta_bottom = 0.0;
  double delta_width = 0.0;
  bool on_border = false;
  double theta = 0.0;
};

// Matching cost between a detection and the enclosing rectangle of a
// projected footprint: (2 dcx + dbottom [+ dwidth]) / score, where the width
// term is omitted for detections on the image border.
CostTerms MatchCostTerms(const Detection2D& det, const Rect& footprint, const ImageGeometry& image);
double MatchCost(const Detection2D& det, const Rect& footprint, const ImageGeometry& image);

struct SegmentCandidate {
  std::uint32_t mmsi = 0;
  Rect footprint;
};

struct Association {
  std::size_t detection = 0;
  std::uint32_t mmsi = 0;
  double cost = 0.0;
};

struct AssociationResult {
  std::vector<Association> matches;
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::uint32_t> unmatched_vessels;
};

// Minimum-total-cost one-to-one assignment. The cost matrix is padded with
// `threshold` for detection-to-dummy and dummy-to-vessel edges; assigned
// pairs with cost >= threshold are reported as unmatched.
AssociationResult Associate(std::span<const Detection2D> detections,
                            std::span<const SegmentCandidate> segments,
                            const ImageGeometry& image, double threshold);

enum class CorrectionScheme {
  // Horizontal translation that puts the extremal corners on the active
  // constraint planes (balanced between the left and right planes when both
  // are active). A fixed point: re-running yields a zero correction.
  kWaterPlaneSolve,
  // One-shot sum of the per-plane proposals, halving the left and right
  // proposals when both are active.
  kProposalSum,
};

enum class SidePlanes {
  // Left and right planes contain the vessel's vertical axis.
  kVertical,
  // Left and right planes are the back-projections of the image columns x1
  // and x2, so they hold the box corners that set those edges.
  kImageEdge,
};

// Back-projected edge planes of a detection through the camera center. All
// normals are unit length and oriented towards the inside of the box.
struct EdgePlanes {
  EcefPoint center;
  Eigen::Vector3d left;    // alpha, through p2 = (x1, y2)
  Eigen::Vector3d right;   // beta, through p4 = (x2, y2)
  Eigen::Vector3d bottom;  // gamma, through p2 and p4
  Eigen::Vector3d top;     // delta, through p1 = (x1, y1) and p3 = (x2, y1)

  double Distance(const Eigen::Vector3d& normal, const EcefPoint& p) const {
    return (p - center).dot(normal);
  }
};

// Throws kDegeneratePlanes if any normal is (numerically) zero.
EdgePlanes BuildEdgePlanes(const CameraModel& model, const Detection2D& det,
                           const Eigen::Vector3d& up, SidePlanes sides = SidePlanes::kVertical);

struct CorrectionOptions {
  CorrectionScheme scheme = CorrectionScheme::kWaterPlaneSolve;
  SidePlanes side_planes = SidePlanes::kVertical;
  // With height_m > 0 the top corners of a box of that height above the
  // segment compete for the extremal corner as well.
  double height_m = 0.0;
};

// Each plane uses the corner most outside it. Throws kDegeneratePlanes.
Eigen::Vector3d CorrectionVector(const CameraModel& model, const Detection2D& det,
                                 const PlaneSegment3& segment, const ImageGeometry& image,
                                 const CorrectionOptions& options = {});

// Smallest lift along z_v that brings a corner of the corrected footprint
// onto the top-edge plane; the other corners then stay below the top edge.
// Throws kNonPositiveHeight or kDegeneratePlanes.
double InferHeight(const CameraModel& model, const Detection2D& det,
                   const PlaneSegment3& corrected);

struct SegmentCorrection {
  PlaneSegment3 segment;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  double height_m = 0.0;
};

// Corrects the footprint, infers the height, then runs up to
// `silhouette_passes` further rounds with the box top corners included.
// Throws kDegeneratePlanes or kNonPositiveHeight.
SegmentCorrection CorrectSegment(const CameraModel& model, const Detection2D& det,
                                 const PlaneSegment3& segment, const ImageGeometry& image,
                                 CorrectionOptions options, int silhouette_passes);

struct Box3D {
  std::array<EcefPoint, 8> corners;  // 0-3 bottom, 4-7 top
  EcefPoint centroid = EcefPoint::Zero();
  VesselFrame frame;
  double height_m = 0.0;
};

// Throws kNonPositiveHeight for height_m <= 0.
Box3D BuildBox3D(const PlaneSegment3& corrected, double height_m);

}  // namespace vesselpose
