#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "epipose/geometry.hpp"
#include "epipose/image.hpp"
#include "epipose/sampling.hpp"

namespace epipose {

using Rgb = std::array<float, 3>;

struct EncodeOptions {
  /// Skip grid pixels whose source colour matches `background_color` within
  /// `background_tolerance` on every channel.
  bool skip_background = false;
  Rgb background_color{0.0f, 0.0f, 0.0f};
  double background_tolerance = 0.0;
  /// Emit the fourth (translation-magnitude) channel.
  bool extended = false;

  friend bool operator==(const EncodeOptions&, const EncodeOptions&) = default;
};

/// Affine map used when the translation channel is rendered to an 8-bit
/// image: grey = clamp(offset + scale * delta_t, 0, 1) on line pixels, 0 elsewhere.
struct DeltaVisualization {
  double offset = 0.5;
  double scale = 1.0 / 40.0;

  [[nodiscard]] double apply(double delta_t) const;
  friend bool operator==(const DeltaVisualization&, const DeltaVisualization&) = default;
};

enum class EncodeStatus {
  Ok,
  /// Every sampled pixel was background or every line missed the image.
  Empty,
};

struct EncodedPose {
  ImageBuffer image;
  SampleGrid grid;
  EncodeOptions options;
  std::optional<double> delta_t;
  DeltaVisualization delta_viz;
  std::size_t lines_drawn = 0;
  std::size_t pixels_set = 0;
  EncodeStatus status = EncodeStatus::Ok;

  friend bool operator==(const EncodedPose&, const EncodedPose&) = default;
};

/// Stronger than operator==: payload compared bit for bit (distinguishes -0.0, NaN).
[[nodiscard]] bool bitwise_equal(const EncodedPose& a, const EncodedPose& b);

[[nodiscard]] bool is_background(std::span<const float> color, const EncodeOptions& options);

/// Draws, for each grid pixel in grid order, the rasterised epipolar line F·p
/// into a zero-initialised H x W x 3 image using that pixel's source colour.
/// Later lines overwrite earlier ones. Grid pixels mapping to a line at
/// infinity (the source epipole) contribute nothing.
[[nodiscard]] EncodedPose encode(const ImageBuffer& source, const FundamentalMatrix& F,
                                 const SampleGrid& grid, const EncodeOptions& options = {});

/// Dominant-axis change of absolute translation, signed:
/// d = |t_t| − |t_s| componentwise, m = argmax |d_i| (lowest index on ties),
/// result sign(d_m)·|d_m|.
///
/// sign(x)·|x| is x itself, so this returns d_m; it does not substitute the
/// full norm ‖d‖ for the magnitude. Because absolute values are taken per
/// component, the sign reflects motion relative to the scene origin rather
/// than the camera heading.
[[nodiscard]] double extended_delta(const Vec3& source_translation, const Vec3& target_translation);

/// encode() plus a fourth channel carrying extended_delta() at every pixel
/// whose RGB maximum is > 0, zero elsewhere. Requires options.extended.
[[nodiscard]] EncodedPose encode_extended(const ImageBuffer& source, const FundamentalMatrix& F,
                                          const SampleGrid& grid, const EncodeOptions& options,
                                          const Vec3& source_translation,
                                          const Vec3& target_translation);

/// Full source-to-target pipeline: relative motion, fundamental matrix, then
/// encode() or encode_extended() depending on options.extended.
[[nodiscard]] EncodedPose encode_views(const ImageBuffer& source, const Intrinsics& source_k,
                                       const Intrinsics& target_k, const Extrinsic& source_pose,
                                       const Extrinsic& target_pose, const SampleGrid& grid,
                                       const EncodeOptions& options);

}  // namespace epipose
