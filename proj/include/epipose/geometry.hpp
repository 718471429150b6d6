#pragma once

#include <compare>
#include <optional>

#include <Eigen/Core>

namespace epipose {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kRotationTolerance = 1e-6;
inline constexpr double kRankRatioTolerance = 1e-7;
inline constexpr double kDegeneracyTolerance = 1e-12;

/// Integer pixel location; x is the column, y the row. Pixel centres sit at
/// integer coordinates, so the image rectangle spans [-0.5, W-0.5] x [-0.5, H-0.5].
struct Pixel {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Pixel&, const Pixel&) = default;
  // Row-major ordering.
  friend constexpr std::strong_ordering operator<=>(const Pixel& a, const Pixel& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }

  [[nodiscard]] Vec3 homogeneous() const { return {double(x), double(y), 1.0}; }
};

/// Pinhole calibration. Construction validates fx > 0, fy > 0.
class Intrinsics {
 public:
  Intrinsics(double fx, double fy, double cx, double cy, double skew = 0.0);

  [[nodiscard]] double fx() const noexcept { return fx_; }
  [[nodiscard]] double fy() const noexcept { return fy_; }
  [[nodiscard]] double cx() const noexcept { return cx_; }
  [[nodiscard]] double cy() const noexcept { return cy_; }
  [[nodiscard]] double skew() const noexcept { return skew_; }

  [[nodiscard]] Mat3 matrix() const;
  /// Closed-form inverse of the upper-triangular K.
  [[nodiscard]] Mat3 inverse() const;

  /// Intrinsics for the same camera after resizing its image from
  /// (old_width, old_height) to (new_width, new_height): fx, cx, skew scale by
  /// the width ratio and fy, cy by the height ratio.
  [[nodiscard]] Intrinsics rescaled(int old_width, int old_height, int new_width,
                                    int new_height) const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;

 private:
  double fx_, fy_, cx_, cy_, skew_;
};

/// True when R is orthonormal with det +1 within `tolerance`
/// (max-abs entry of RᵀR − I, and |det R − 1|).
[[nodiscard]] bool is_rotation(const Mat3& R, double tolerance = kRotationTolerance);

/// Nearest rotation in Frobenius norm (SVD projection, det forced to +1).
[[nodiscard]] Mat3 nearest_rotation(const Mat3& M);

/// World-to-camera rigid pose: x_cam = R * x_world + t.
class Extrinsic {
 public:
  Extrinsic() : R_(Mat3::Identity()), t_(Vec3::Zero()) {}
  Extrinsic(const Mat3& R, const Vec3& t);

  [[nodiscard]] const Mat3& rotation() const noexcept { return R_; }
  [[nodiscard]] const Vec3& translation() const noexcept { return t_; }

  /// The opposite-direction transform. For a world-to-camera pose this is the
  /// camera-to-world pose and vice versa.
  [[nodiscard]] Extrinsic inverse() const;

  [[nodiscard]] Vec3 apply(const Vec3& x) const { return R_ * x + t_; }

 private:
  Mat3 R_;
  Vec3 t_;
};

/// Rigid motion taking source-camera coordinates into target-camera coordinates.
class RelativeMotion {
 public:
  RelativeMotion(const Mat3& R, const Vec3& T);

  [[nodiscard]] const Mat3& rotation() const noexcept { return R_; }
  [[nodiscard]] const Vec3& translation() const noexcept { return T_; }

 private:
  Mat3 R_;
  Vec3 T_;
};

/// 3x3 map from source pixels to target epipolar lines. Construction checks
/// the rank-2 condition sigma3 / sigma1 <= 1e-7 (when sigma1 > 0).
class FundamentalMatrix {
 public:
  explicit FundamentalMatrix(const Mat3& F);

  [[nodiscard]] const Mat3& matrix() const noexcept { return F_; }

 private:
  Mat3 F_;
};

/// Cross-product matrix: skew(v) * w == v.cross(w).
[[nodiscard]] Mat3 skew(const Vec3& v);

/// R = R_t R_sᵀ, T = t_t − R t_s.
[[nodiscard]] RelativeMotion relative_motion(const Extrinsic& source, const Extrinsic& target);

/// F = K_t⁻ᵀ [T]ₓ R K_s⁻¹. Throws DegenerateMotion when ‖T‖ < 1e-12.
[[nodiscard]] FundamentalMatrix fundamental_matrix(const Intrinsics& source_k,
                                                   const Intrinsics& target_k,
                                                   const RelativeMotion& motion);
[[nodiscard]] inline FundamentalMatrix fundamental_matrix(const Intrinsics& k,
                                                          const RelativeMotion& motion) {
  return fundamental_matrix(k, k, motion);
}

/// Line coefficients (a, b, c) of a*x + b*y + c = 0 in the target image.
/// Throws DegenerateLine when |a| + |b| <= 1e-12.
[[nodiscard]] Vec3 epipolar_line(const FundamentalMatrix& F, const Pixel& source_pixel);

/// Same product without the degeneracy check; nullopt for a degenerate line.
[[nodiscard]] std::optional<Vec3> try_epipolar_line(const FundamentalMatrix& F,
                                                    const Pixel& source_pixel);

}  // namespace epipose
