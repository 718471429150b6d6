#include "epipose/geometry.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "epipose/error.hpp"

namespace epipose {

namespace {

bool all_finite(const auto& m) { return m.array().isFinite().all(); }

void require_rotation(const Mat3& R, const char* what) {
  if (!all_finite(R)) throw Error(ErrorKind::InvalidRotation, fmt::format("{} has non-finite entries", what));
  if (!is_rotation(R)) {
    const double ortho = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
    throw Error(ErrorKind::InvalidRotation,
                fmt::format("{} is not a rotation (|RtR - I|max = {:.3g}, det = {:.9g})", what,
                            ortho, R.determinant()));
  }
}

}  // namespace

Intrinsics::Intrinsics(double fx, double fy, double cx, double cy, double skew)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), skew_(skew) {
  if (!(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy) &&
        std::isfinite(skew)))
    throw Error(ErrorKind::InvalidIntrinsics, "non-finite calibration value");
  if (!(fx > 0.0) || !(fy > 0.0))
    throw Error(ErrorKind::InvalidIntrinsics,
                fmt::format("focal lengths must be positive (fx = {}, fy = {})", fx, fy));
}

Mat3 Intrinsics::matrix() const {
  Mat3 K;
  K << fx_, skew_, cx_,
       0.0, fy_, cy_,
       0.0, 0.0, 1.0;
  return K;
}

Mat3 Intrinsics::inverse() const {
  Mat3 Kinv;
  Kinv << 1.0 / fx_, -skew_ / (fx_ * fy_), (skew_ * cy_ - cx_ * fy_) / (fx_ * fy_),
          0.0, 1.0 / fy_, -cy_ / fy_,
          0.0, 0.0, 1.0;
  return Kinv;
}

Intrinsics Intrinsics::rescaled(int old_width, int old_height, int new_width,
                                int new_height) const {
  if (old_width <= 0 || old_height <= 0 || new_width <= 0 || new_height <= 0)
    throw Error(ErrorKind::InvalidArgument, "image sizes must be positive");
  const double sx = double(new_width) / double(old_width);
  const double sy = double(new_height) / double(old_height);
  return {fx_ * sx, fy_ * sy, cx_ * sx, cy_ * sy, skew_ * sx};
}

bool is_rotation(const Mat3& R, double tolerance) {
  const double ortho = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tolerance && std::abs(R.determinant() - 1.0) <= tolerance;
}

Mat3 nearest_rotation(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

Extrinsic::Extrinsic(const Mat3& R, const Vec3& t) : R_(R), t_(t) {
  require_rotation(R, "extrinsic rotation");
  if (!all_finite(t)) throw Error(ErrorKind::InvalidArgument, "extrinsic translation is not finite");
}

Extrinsic Extrinsic::inverse() const {
  const Mat3 Rt = R_.transpose();
  return {Rt, -(Rt * t_)};
}

RelativeMotion::RelativeMotion(const Mat3& R, const Vec3& T) : R_(R), T_(T) {
  require_rotation(R, "relative rotation");
  if (!all_finite(T)) throw Error(ErrorKind::InvalidArgument, "relative translation is not finite");
}

FundamentalMatrix::FundamentalMatrix(const Mat3& F) : F_(F) {
  if (!all_finite(F)) throw Error(ErrorKind::InvalidFundamental, "non-finite entries");
  const Vec3 sv = Eigen::JacobiSVD<Mat3>(F).singularValues();
  if (sv(0) > 0.0 && sv(2) / sv(0) > kRankRatioTolerance)
    throw Error(ErrorKind::InvalidFundamental,
                fmt::format("matrix is not rank-2 (sigma3/sigma1 = {:.3g})", sv(2) / sv(0)));
}

Mat3 skew(const Vec3& v) {
  Mat3 M;
  M << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return M;
}

RelativeMotion relative_motion(const Extrinsic& source, const Extrinsic& target) {
  const Mat3 R = target.rotation() * source.rotation().transpose();
  const Vec3 T = target.translation() - R * source.translation();
  return {R, T};
}

FundamentalMatrix fundamental_matrix(const Intrinsics& source_k, const Intrinsics& target_k,
                                     const RelativeMotion& motion) {
  if (motion.translation().norm() < kDegeneracyTolerance)
    throw Error(ErrorKind::DegenerateMotion,
                "relative translation is zero; the views share a centre and have no epipolar geometry");
  const Mat3 F = target_k.inverse().transpose() * skew(motion.translation()) * motion.rotation() *
                 source_k.inverse();
  return FundamentalMatrix(F);
}

std::optional<Vec3> try_epipolar_line(const FundamentalMatrix& F, const Pixel& source_pixel) {
  Vec3 l = F.matrix() * source_pixel.homogeneous();
  if (std::abs(l.x()) + std::abs(l.y()) <= kDegeneracyTolerance) return std::nullopt;
  return l;
}

Vec3 epipolar_line(const FundamentalMatrix& F, const Pixel& source_pixel) {
  auto l = try_epipolar_line(F, source_pixel);
  if (!l)
    throw Error(ErrorKind::DegenerateLine,
                fmt::format("pixel ({}, {}) maps to a line at infinity", source_pixel.x,
                            source_pixel.y));
  return *l;
}

}  // namespace epipose
