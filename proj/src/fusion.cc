#include "vesselpose/fusion.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "vesselpose/assignment.h"
#include "vesselpose/error.h"

namespace vesselpose {
namespace {

Eigen::Vector3d UnitNormal(const Eigen::Vector3d& n, const char* which) {
  const double norm = n.norm();
  if (!(norm >= 1e-12)) {
    throw Error(ErrorCode::kDegeneratePlanes, std::string(which) + " plane normal vanishes");
  }
  return n / norm;
}

// Flips `normal` so that the ray through `probe` lies on its positive side.
Eigen::Vector3d OrientTowards(const Eigen::Vector3d& normal, const Eigen::Vector3d& probe_ray) {
  return probe_ray.dot(normal) < 0.0 ? Eigen::Vector3d(-normal) : normal;
}

double MinDistance(const EdgePlanes& planes, const Eigen::Vector3d& normal,
                   const PlaneSegment3& segment, double height_m) {
  const Eigen::Vector3d lift = height_m * segment.frame.z_axis;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : segment.corners) {
    d = std::min(d, planes.Distance(normal, c));
    if (height_m > 0.0) d = std::min(d, planes.Distance(normal, c + lift));
  }
  return d;
}

}  // namespace

Rect Rect::Enclosing(std::span<const Eigen::Vector2d> pixels) {
  Rect r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pixels) {
    r.min_x = std::min(r.min_x, p.x());
    r.min_y = std::min(r.min_y, p.y());
    r.max_x = std::max(r.max_x, p.x());
    r.max_y = std::max(r.max_y, p.y());
  }
  return r;
}

void Detection2D::Validate() const {
  if (!(x1 < x2 && y1 < y2)) {
    throw Error(ErrorCode::kInvalidArgument, "detection box is empty");
  }
  if (!(score > 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "detection score outside (0, 1]");
  }
}

PlaneSegment3 PlaneSegment3::Translated(const Eigen::Vector3d& offset) const {
  PlaneSegment3 out = *this;
  for (auto& c : out.corners) c += offset;
  out.frame.origin += offset;
  return out;
}

EcefPoint PlaneSegment3::Center() const {
  return (corners[0] + corners[1] + corners[2] + corners[3]) / 4.0;
}

VesselFrame BuildVesselFrame(const VesselState& state, double water_height_m) {
  if (!state.position || !state.position->latitude_deg || !state.position->longitude_deg) {
    throw Error(ErrorCode::kNotPoseReady, "vessel has no position fix");
  }
  const PositionReport& p = *state.position;
  const GeodeticCoord antenna{*p.latitude_deg, *p.longitude_deg, water_height_m};
  return MakeVesselFrame(antenna, p.heading_deg.value_or(kHeadingUnavailable));
}

PlaneSegment3 WaterPlaneSegment(const VesselState& state, const VesselFrame& frame,
                                double image_time) {
  const Readiness readiness =
      CheckPoseReady(state, image_time, std::numeric_limits<double>::infinity());
  if (readiness != Readiness::kReady) {
    throw Error(ErrorCode::kNotPoseReady, std::string(ReadinessName(readiness)));
  }
  const StaticVoyage& dims = *state.static_voyage;
  const double a = dims.dim_to_bow, b = dims.dim_to_stern;
  const double c = dims.dim_to_port, d = dims.dim_to_starboard;
  const EcefPoint& o = frame.origin;
  PlaneSegment3 seg;
  seg.frame = frame;
  seg.corners[0] = o + a * frame.x_axis + c * frame.y_axis;
  seg.corners[1] = o + a * frame.x_axis - d * frame.y_axis;
  seg.corners[2] = o - b * frame.x_axis - d * frame.y_axis;
  seg.corners[3] = o - b * frame.x_axis + c * frame.y_axis;
  const double age = image_time - state.position->timestamp;
  const double speed = state.position->speed_over_ground_mps.value_or(0.0);
  return seg.Translated(DeadReckon(frame, speed, age));
}

ProjectedSegment ProjectSegment(const CameraModel& model, const PlaneSegment3& segment) {
  ProjectedSegment out;
  for (int i = 0; i < 4; ++i) out.pixels[i] = model.Project(segment.corners[i]);
  out.enclosing = Rect::Enclosing(out.pixels);
  return out;
}

BorderContact TouchesBorder(const Detection2D& det, const ImageGeometry& image) {
  return {det.x1 <= image.border_margin_px, det.x2 >= image.width - image.border_margin_px};
}

CostTerms MatchCostTerms(const Detection2D& det, const Rect& footprint,
                         const ImageGeometry& image) {
  const double w = image.width, h = image.height;
  CostTerms t;
  t.delta_cx = std::abs((det.x1 + det.x2) / 2.0 - (footprint.min_x + footprint.max_x) / 2.0) / w;
  t.delta_bottom = std::abs(det.y2 - footprint.max_y) / h;
  t.delta_width = std::abs((det.x2 - det.x1) - footprint.width()) / w;
  t.on_border = TouchesBorder(det, image).any();
  const double sum = 2.0 * t.delta_cx + t.delta_bottom + (t.on_border ? 0.0 : t.delta_width);
  t.theta = sum / det.score;
  return t;
}

double MatchCost(const Detection2D& det, const Rect& footprint, const ImageGeometry& image) {
  return MatchCostTerms(det, footprint, image).theta;
}

AssociationResult Associate(std::span<const Detection2D> detections,
                            std::span<const SegmentCandidate> segments,
                            const ImageGeometry& image, double threshold) {
  const Eigen::Index nd = static_cast<Eigen::Index>(detections.size());
  const Eigen::Index ns = static_cast<Eigen::Index>(segments.size());
  // Square (nd + ns) matrix: real block top-left, dummy rows/columns cost
  // `threshold`, dummy-to-dummy cost 0.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(nd + ns, ns + nd);
  cost.topRightCorner(nd, nd).setConstant(threshold);
  cost.bottomLeftCorner(ns, ns).setConstant(threshold);
  for (Eigen::Index i = 0; i < nd; ++i) {
    for (Eigen::Index j = 0; j < ns; ++j) {
      cost(i, j) = MatchCost(detections[i], segments[j].footprint, image);
    }
  }
  const std::vector<int> assignment = SolveAssignment(cost);

  AssociationResult result;
  std::vector<bool> vessel_matched(ns, false);
  for (Eigen::Index i = 0; i < nd; ++i) {
    const int j = assignment[i];
    if (j >= 0 && j < ns && cost(i, j) < threshold) {
      result.matches.push_back({static_cast<std::size_t>(i), segments[j].mmsi, cost(i, j)});
      vessel_matched[j] = true;
    } else {
      result.unmatched_detections.push_back(static_cast<std::size_t>(i));
    }
  }
  for (Eigen::Index j = 0; j < ns; ++j) {
    if (!vessel_matched[j]) result.unmatched_vessels.push_back(segments[j].mmsi);
  }
  return result;
}

EdgePlanes BuildEdgePlanes(const CameraModel& model, const Detection2D& det,
                           const Eigen::Vector3d& up, SidePlanes sides) {
  const Eigen::Vector2d p1(det.x1, det.y1), p2(det.x1, det.y2);
  const Eigen::Vector2d p3(det.x2, det.y1), p4(det.x2, det.y2);
  const double half_w = std::max(1.0, (det.x2 - det.x1) / 2.0);
  const double half_h = std::max(1.0, (det.y2 - det.y1) / 2.0);
  const Eigen::Vector3d r1 = model.Unproject(p1), r2 = model.Unproject(p2);
  const Eigen::Vector3d r3 = model.Unproject(p3), r4 = model.Unproject(p4);

  EdgePlanes planes;
  planes.center = model.Center();
  const bool vertical = sides == SidePlanes::kVertical;
  planes.left = OrientTowards(UnitNormal(vertical ? up.cross(r2) : r1.cross(r2), "left"),
                              model.Unproject({det.x1 + half_w, det.y2}));
  planes.right = OrientTowards(UnitNormal(vertical ? up.cross(r4) : r3.cross(r4), "right"),
                               model.Unproject({det.x2 - half_w, det.y2}));
  planes.bottom = OrientTowards(UnitNormal(r2.cross(r4), "bottom"),
                                model.Unproject({(det.x1 + det.x2) / 2.0, det.y2 - half_h}));
  planes.top = OrientTowards(UnitNormal(r1.cross(r3), "top"),
                             model.Unproject({(det.x1 + det.x2) / 2.0, det.y1 + half_h}));
  return planes;
}

Eigen::Vector3d CorrectionVector(const CameraModel& model, const Detection2D& det,
                                 const PlaneSegment3& segment, const ImageGeometry& image,
                                 const CorrectionOptions& options) {
  const EdgePlanes planes = BuildEdgePlanes(model, det, segment.frame.z_axis, options.side_planes);
  const double height_m = options.height_m;
  const BorderContact contact = TouchesBorder(det, image);
  const bool use_left = !contact.left;
  const bool use_right = !contact.right;
  const double d_left = MinDistance(planes, planes.left, segment, height_m);
  const double d_right = MinDistance(planes, planes.right, segment, height_m);
  const double d_bottom = MinDistance(planes, planes.bottom, segment, height_m);

  if (options.scheme == CorrectionScheme::kProposalSum) {
    Eigen::Vector3d v = -d_bottom * planes.bottom;
    const double side_weight = use_left && use_right ? 0.5 : 1.0;
    if (use_left) v -= side_weight * d_left * planes.left;
    if (use_right) v -= side_weight * d_right * planes.right;
    return v;
  }

  const Eigen::Vector3d& e1 = segment.frame.x_axis;
  const Eigen::Vector3d& e2 = segment.frame.y_axis;
  const Eigen::Vector2d bottom_row(planes.bottom.dot(e1), planes.bottom.dot(e2));
  if (!use_left && !use_right) {
    const double g2 = bottom_row.squaredNorm();
    if (!(g2 >= 1e-24)) {
      throw Error(ErrorCode::kDegeneratePlanes, "bottom plane is parallel to the water");
    }
    const Eigen::Vector2d ab = -d_bottom * bottom_row / g2;
    return ab.x() * e1 + ab.y() * e2;
  }

  Eigen::Matrix2d m;
  Eigen::Vector2d rhs;
  m.row(0) = bottom_row.transpose();
  rhs(0) = -d_bottom;
  Eigen::Vector3d side_normal;
  if (use_left && use_right) {
    // Equal signed margins to the left and right planes.
    side_normal = planes.left - planes.right;
    rhs(1) = d_right - d_left;
  } else if (use_left) {
    side_normal = planes.left;
    rhs(1) = -d_left;
  } else {
    side_normal = planes.right;
    rhs(1) = -d_right;
  }
  m.row(1) << side_normal.dot(e1), side_normal.dot(e2);
  if (!(std::abs(m.determinant()) >= 1e-12)) {
    throw Error(ErrorCode::kDegeneratePlanes, "constraint planes do not fix a water-plane shift");
  }
  const Eigen::Vector2d ab = m.partialPivLu().solve(rhs);
  return ab.x() * e1 + ab.y() * e2;
}

double InferHeight(const CameraModel& model, const Detection2D& det,
                   const PlaneSegment3& corrected) {
  const Eigen::Vector3d& up = corrected.frame.z_axis;
  const EdgePlanes planes = BuildEdgePlanes(model, det, up);
  const double rate = up.dot(planes.top);
  if (!(std::abs(rate) >= 1e-12)) {
    throw Error(ErrorCode::kDegeneratePlanes, "top plane contains the vertical");
  }
  double h = std::numeric_limits<double>::infinity();
  for (const auto& c : corrected.corners) h = std::min(h, -planes.Distance(planes.top, c) / rate);
  if (!(h > 0.0)) {
    throw Error(ErrorCode::kNonPositiveHeight, "inferred height " + std::to_string(h));
  }
  return h;
}

SegmentCorrection CorrectSegment(const CameraModel& model, const Detection2D& det,
                                 const PlaneSegment3& segment, const ImageGeometry& image,
                                 CorrectionOptions options, int silhouette_passes) {
  options.height_m = 0.0;
  SegmentCorrection out;
  out.offset = CorrectionVector(model, det, segment, image, options);
  out.segment = segment.Translated(out.offset);
  out.height_m = InferHeight(model, det, out.segment);
  for (int pass = 0; pass < silhouette_passes; ++pass) {
    options.height_m = out.height_m;
    const Eigen::Vector3d step = CorrectionVector(model, det, out.segment, image, options);
    out.segment = out.segment.Translated(step);
    out.offset += step;
    out.height_m = InferHeight(model, det, out.segment);
    if (step.norm() < 1e-9) break;
  }
  return out;
}

Box3D BuildBox3D(const PlaneSegment3& corrected, double height_m) {
  if (!(height_m > 0.0)) {
    throw Error(ErrorCode::kNonPositiveHeight, "box height must be positive");
  }
  Box3D box;
  box.frame = corrected.frame;
  box.height_m = height_m;
  const Eigen::Vector3d lift = height_m * corrected.frame.z_axis;
  box.centroid.setZero();
  for (int i = 0; i < 4; ++i) {
    box.corners[i] = corrected.corners[i];
    box.corners[i + 4] = corrected.corners[i] + lift;
    box.centroid += box.corners[i] + box.corners[i + 4];
  }
  box.centroid /= 8.0;
  return box;
}

}  // namespace vesselpose
