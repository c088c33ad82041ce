#include "vesselpose/camera.h"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "levenberg_marquardt.h"
#include "vesselpose/error.h"

namespace vesselpose {
namespace {

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Matrix3d ExpSo3(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Eigen::Matrix3d NearestRotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

// Isotropic normalization: centroid to origin, mean distance to sqrt(2).
Eigen::Matrix3d NormalizingTransform(std::span<const Eigen::Vector2d> pts) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 0.0)) {
    throw Error(ErrorCode::kDegenerateGeometry, "all points coincide");
  }
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  return t;
}

Eigen::Vector2d Transform(const Eigen::Matrix3d& t, const Eigen::Vector2d& p) {
  return (t * p.homogeneous()).hnormalized();
}

// Symmetric transfer error of a homography in normalized coordinates, with
// H(2,2) fixed to 1.
class HomographyProblem {
 public:
  using Params = Eigen::Matrix3d;

  HomographyProblem(std::span<const Eigen::Vector2d> src, std::span<const Eigen::Vector2d> dst)
      : src_(src), dst_(dst) {}

  int NumParams() const { return 8; }

  void Evaluate(const Params& h, Eigen::VectorXd* r, Eigen::MatrixXd* jac) const {
    Residuals(h, r);
    if (!jac) return;
    const Eigen::Index m = r->size();
    jac->resize(m, 8);
    Eigen::VectorXd plus, minus;
    for (int k = 0; k < 8; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(h(k / 3, k % 3)));
      Params hp = h, hm = h;
      hp(k / 3, k % 3) += step;
      hm(k / 3, k % 3) -= step;
      Residuals(hp, &plus);
      Residuals(hm, &minus);
      jac->col(k) = (plus - minus) / (2.0 * step);
    }
  }

  Params Plus(const Params& h, const Eigen::VectorXd& delta) const {
    Params out = h;
    for (int k = 0; k < 8; ++k) out(k / 3, k % 3) += delta(k);
    return out;
  }

 private:
  void Residuals(const Params& h, Eigen::VectorXd* r) const {
    const Eigen::Matrix3d inv = h.inverse();
    r->resize(4 * static_cast<Eigen::Index>(src_.size()));
    for (std::size_t i = 0; i < src_.size(); ++i) {
      r->segment<2>(4 * i) = Transform(h, src_[i]) - dst_[i];
      r->segment<2>(4 * i + 2) = Transform(inv, dst_[i]) - src_[i];
    }
  }

  std::span<const Eigen::Vector2d> src_;
  std::span<const Eigen::Vector2d> dst_;
};

struct Pose {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
};

// Pixel reprojection residuals over a left-multiplied rotation increment and
// a translation increment.
class PoseProblem {
 public:
  using Params = Pose;

  PoseProblem(std::span<const Eigen::Vector3d> world, std::span<const Eigen::Vector2d> pixels,
              const Intrinsics& k)
      : world_(world), pixels_(pixels), k_(k) {}

  int NumParams() const { return 6; }

  void Evaluate(const Params& pose, Eigen::VectorXd* r, Eigen::MatrixXd* jac) const {
    const Eigen::Index n = static_cast<Eigen::Index>(world_.size());
    r->resize(2 * n);
    if (jac) jac->resize(2 * n, 6);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Vector3d rotated = pose.rotation * world_[i];
      const Eigen::Vector3d pc = rotated + pose.translation;
      const double inv_z = 1.0 / pc.z();
      (*r)(2 * i) = k_.fx * pc.x() * inv_z + k_.cx - pixels_[i].x();
      (*r)(2 * i + 1) = k_.fy * pc.y() * inv_z + k_.cy - pixels_[i].y();
      if (!jac) continue;
      Eigen::Matrix<double, 2, 3> d_proj;
      d_proj << k_.fx * inv_z, 0, -k_.fx * pc.x() * inv_z * inv_z,
                0, k_.fy * inv_z, -k_.fy * pc.y() * inv_z * inv_z;
      jac->block<2, 3>(2 * i, 0) = -d_proj * Skew(rotated);
      jac->block<2, 3>(2 * i, 3) = d_proj;
    }
  }

  Params Plus(const Params& pose, const Eigen::VectorXd& delta) const {
    return {ExpSo3(delta.head<3>()) * pose.rotation, pose.translation + delta.tail<3>()};
  }

 private:
  std::span<const Eigen::Vector3d> world_;
  std::span<const Eigen::Vector2d> pixels_;
  Intrinsics k_;
};

Eigen::Vector3d Centroid(std::span<const Correspondence> correspondences) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& corr : correspondences) c += corr.world;
  return c / static_cast<double>(correspondences.size());
}

void CheckDepths(const CameraModel& model, std::span<const Correspondence> correspondences) {
  for (const auto& corr : correspondences) {
    const Eigen::Vector3d pc = model.ToCamera(corr.world);
    if (!pc.allFinite() || !(pc.z() > 0.0)) {
      throw Error(ErrorCode::kBehindCamera, "keypoint has non-positive depth in solved pose");
    }
  }
}

// Runs LM in coordinates centered at `centroid` and maps the result back.
CameraModel RefineCentered(std::span<const Correspondence> correspondences,
                           const Intrinsics& intrinsics, const Eigen::Vector3d& centroid,
                           Pose pose, const PnPOptions& options) {
  std::vector<Eigen::Vector3d> world;
  std::vector<Eigen::Vector2d> pixels;
  for (const auto& corr : correspondences) {
    world.push_back(corr.world - centroid);
    pixels.push_back(corr.pixel);
  }
  const PoseProblem problem(world, pixels, intrinsics);
  internal::LmOptions lm;
  lm.max_iterations = options.max_iterations;
  lm.gradient_tolerance = options.gradient_tolerance;
  lm.initial_damping = options.initial_damping;
  internal::MinimizeLm(problem, &pose, lm);
  const Eigen::Matrix3d rotation = NearestRotation(pose.rotation);
  CameraModel model(intrinsics, rotation, pose.translation - rotation * centroid);
  CheckDepths(model, correspondences);
  return model;
}

}  // namespace

Eigen::Matrix3d Intrinsics::K() const {
  Eigen::Matrix3d k;
  k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
  return k;
}

CameraModel::CameraModel(const Intrinsics& intrinsics, const Eigen::Matrix3d& rotation,
                         const Eigen::Vector3d& translation)
    : intrinsics_(intrinsics), rotation_(rotation), translation_(translation) {
  if (!(intrinsics.fx > 0.0 && intrinsics.fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (!rotation.allFinite() || !translation.allFinite() ||
      std::abs(rotation.determinant() - 1.0) > 1e-9 ||
      !(rotation.transpose() * rotation).isApprox(Eigen::Matrix3d::Identity(), 1e-9)) {
    throw Error(ErrorCode::kInvalidArgument, "camera rotation is not orthonormal");
  }
}

Eigen::Vector3d CameraModel::ToCamera(const EcefPoint& p) const {
  return rotation_ * p + translation_;
}

Eigen::Vector2d CameraModel::Project(const EcefPoint& p) const {
  const Eigen::Vector3d pc = ToCamera(p);
  if (!(pc.z() > 0.0)) throw Error(ErrorCode::kBehindCamera, "point has non-positive depth");
  return {intrinsics_.fx * pc.x() / pc.z() + intrinsics_.cx,
          intrinsics_.fy * pc.y() / pc.z() + intrinsics_.cy};
}

EcefPoint CameraModel::Center() const { return -rotation_.transpose() * translation_; }

Eigen::Vector3d CameraModel::Unproject(const Eigen::Vector2d& pixel) const {
  const Eigen::Vector3d ray((pixel.x() - intrinsics_.cx) / intrinsics_.fx,
                            (pixel.y() - intrinsics_.cy) / intrinsics_.fy, 1.0);
  return (rotation_.transpose() * ray).normalized();
}

InterimPlane PcaInterimPlane(std::span<const EcefPoint> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::kDegenerateGeometry, "PCA plane needs at least 3 points");
  }
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) cov += (p - centroid) * (p - centroid).transpose();
  cov /= static_cast<double>(points.size());

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d values = eig.eigenvalues();  // ascending
  if (!(values(1) > 1e-12 * std::max(values(2), 1e-300))) {
    throw Error(ErrorCode::kDegenerateGeometry, "points are collinear");
  }
  InterimPlane plane;
  plane.anchor = centroid;
  plane.basis.col(0) = eig.eigenvectors().col(2).normalized();
  plane.basis.col(1) = eig.eigenvectors().col(1).normalized();
  return plane;
}

InterimPlane TangentInterimPlane(const GeodeticCoord& anchor) {
  const EnuFrame enu = EnuFrameAt(anchor);
  InterimPlane plane;
  plane.anchor = GeodeticToEcef(anchor);
  plane.basis.col(0) = enu.east;
  plane.basis.col(1) = enu.north;
  return plane;
}

Eigen::Vector2d ProjectToPlane(const EcefPoint& p, const InterimPlane& plane) {
  return plane.basis.transpose() * (p - plane.anchor);
}

Eigen::Vector2d ApplyHomography(const Eigen::Matrix3d& H, const Eigen::Vector2d& x) {
  return Transform(H, x);
}

Eigen::Matrix3d EstimateHomography(std::span<const Eigen::Vector2d> plane_points,
                                   std::span<const Eigen::Vector2d> pixels,
                                   HomographyRefinement refinement) {
  if (plane_points.size() != pixels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "homography input sizes differ");
  }
  const std::size_t n = plane_points.size();
  if (n < 4) throw Error(ErrorCode::kDegenerateGeometry, "homography needs at least 4 pairs");

  const Eigen::Matrix3d ts = NormalizingTransform(plane_points);
  const Eigen::Matrix3d td = NormalizingTransform(pixels);
  std::vector<Eigen::Vector2d> src(n), dst(n);
  for (std::size_t i = 0; i < n; ++i) {
    src[i] = Transform(ts, plane_points[i]);
    dst[i] = Transform(td, pixels[i]);
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(n), 9);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = src[i].x(), y = src[i].y(), u = dst[i].x(), v = dst[i].y();
    a.row(2 * i) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    a.row(2 * i + 1) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::kDegenerateGeometry, "homography system is rank deficient");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  if (std::abs(hn(2, 2)) < 1e-12) {
    throw Error(ErrorCode::kDegenerateGeometry, "homography maps the centroid to infinity");
  }
  hn /= hn(2, 2);

  if (refinement == HomographyRefinement::kSymmetricTransfer) {
    HomographyProblem problem(src, dst);
    internal::MinimizeLm(problem, &hn, internal::LmOptions{});
  }

  Eigen::Matrix3d hm = td.inverse() * hn * ts;
  if (!hm.allFinite() || std::abs(hm(2, 2)) < 1e-300 || std::abs(hm.determinant()) < 1e-300) {
    throw Error(ErrorCode::kDegenerateGeometry, "singular homography");
  }
  return hm / hm(2, 2);
}

PlaneHomography FitPlaneHomography(const InterimPlane& plane,
                                   std::span<const Correspondence> correspondences,
                                   HomographyRefinement refinement) {
  std::vector<Eigen::Vector2d> src, dst;
  for (const auto& c : correspondences) {
    src.push_back(ProjectToPlane(c.world, plane));
    dst.push_back(c.pixel);
  }
  return {plane, EstimateHomography(src, dst, refinement)};
}

CameraModel SolvePnP(std::span<const Correspondence> correspondences,
                     const Intrinsics& intrinsics, const PnPOptions& options) {
  const std::size_t n = correspondences.size();
  if (n < 6) throw Error(ErrorCode::kDegenerateGeometry, "PnP needs at least 6 correspondences");

  const Eigen::Vector3d centroid = Centroid(correspondences);
  double scale = 0.0;
  for (const auto& c : correspondences) scale += (c.world - centroid).norm();
  scale /= static_cast<double>(n);
  if (!(scale > 0.0)) throw Error(ErrorCode::kDegenerateGeometry, "keypoints coincide");
  scale = std::sqrt(3.0) / scale;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(n), 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d x = ((correspondences[i].world - centroid) * scale).homogeneous();
    const double u = (correspondences[i].pixel.x() - intrinsics.cx) / intrinsics.fx;
    const double v = (correspondences[i].pixel.y() - intrinsics.cy) / intrinsics.fy;
    a.block<1, 4>(2 * i, 0) = x.transpose();
    a.block<1, 4>(2 * i, 8) = -u * x.transpose();
    a.block<1, 4>(2 * i + 1, 4) = x.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -v * x.transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (!(sv(10) > 1e-9 * sv(0))) {
    throw Error(ErrorCode::kDegenerateGeometry, "DLT system is rank deficient (coplanar points?)");
  }
  const Eigen::VectorXd p = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> proj;
  proj << p(0), p(1), p(2), p(3), p(4), p(5), p(6), p(7), p(8), p(9), p(10), p(11);
  if (proj.leftCols<3>().determinant() < 0) proj = -proj;

  const Eigen::JacobiSVD<Eigen::Matrix3d> msvd(proj.leftCols<3>());
  const double s = msvd.singularValues().mean();
  Pose pose;
  pose.rotation = NearestRotation(proj.leftCols<3>());
  // In scaled coordinates t_s = p4 / s; undo the world scaling.
  pose.translation = proj.col(3) / s / scale;
  return RefineCentered(correspondences, intrinsics, centroid, pose, options);
}

CameraModel RefinePose(std::span<const Correspondence> correspondences,
                       const CameraModel& initial, const PnPOptions& options) {
  if (correspondences.size() < 3) {
    throw Error(ErrorCode::kDegenerateGeometry, "pose refinement needs at least 3 points");
  }
  const Eigen::Vector3d centroid = Centroid(correspondences);
  Pose pose{initial.rotation(), initial.translation() + initial.rotation() * centroid};
  return RefineCentered(correspondences, initial.intrinsics(), centroid, pose, options);
}

ReprojectionReport ComputeReprojectionReport(const WorldToImage& project,
                                             std::span<const Correspondence> correspondences,
                                             int image_width, int image_height) {
  ReprojectionReport report;
  report.count = correspondences.size();
  if (correspondences.empty()) return report;
  double sum = 0.0;
  for (const auto& c : correspondences) sum += (project(c.world) - c.pixel).norm();
  report.mae_px = sum / static_cast<double>(correspondences.size());
  if (image_width > 0) report.mae_over_width_pct = 100.0 * report.mae_px / image_width;
  if (image_height > 0) report.mae_over_height_pct = 100.0 * report.mae_px / image_height;
  return report;
}

ReprojectionReport ComputeReprojectionReport(const CameraModel& model,
                                             std::span<const Correspondence> correspondences) {
  return ComputeReprojectionReport([&model](const EcefPoint& p) { return model.Project(p); },
                                   correspondences, model.intrinsics().width,
                                   model.intrinsics().height);
}

ReprojectionReport ComputeReprojectionReport(const PlaneHomography& homography,
                                             std::span<const Correspondence> correspondences,
                                             int image_width, int image_height) {
  return ComputeReprojectionReport(
      [&homography](const EcefPoint& p) { return homography.Project(p); }, correspondences,
      image_width, image_height);
}

}  // namespace vesselpose
