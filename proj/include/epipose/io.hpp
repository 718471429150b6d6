#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epipose/encoder.hpp"
#include "epipose/geometry.hpp"
#include "epipose/image.hpp"

namespace epipose {

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

/// Reads an 8- or 16-bit PNG into [0, 1] floats. Palette images are expanded
/// to RGB, grey+alpha to RGBA. Sub-byte grey depths raise UnsupportedBitDepth;
/// anything libpng rejects raises DecodeError.
[[nodiscard]] ImageBuffer read_png(const std::filesystem::path& path);

/// Writes a 1-, 3- or 4-channel image as 8-bit PNG (values clamped to [0, 1]).
void write_png(const ImageBuffer& image, const std::filesystem::path& path);

/// Renders an encoding for inspection: RGB lines to `path`, and for a
/// four-channel encoding the translation channel as a separate grey image at
/// `<stem>_delta.png` through the pose's DeltaVisualization. Returns the
/// files written.
std::vector<std::filesystem::path> write_encoding_png(const EncodedPose& pose,
                                                      const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Poses and calibration
// ---------------------------------------------------------------------------

enum class PoseConvention { WorldToCamera, CameraToWorld };

[[nodiscard]] std::string_view to_string(PoseConvention convention) noexcept;

/// Converts a pose expressed in `convention` to world-to-camera.
[[nodiscard]] Extrinsic to_world_to_camera(const Extrinsic& pose, PoseConvention convention);

/// Tolerance for rotations read from text; within it they are projected onto
/// the nearest rotation.
inline constexpr double kTextRotationTolerance = 1e-4;

/// Frames stored world-to-camera; `source_convention` records what the file held.
struct PoseSequence {
  std::vector<Extrinsic> frames;
  std::vector<int> frame_ids;
  PoseConvention source_convention = PoseConvention::CameraToWorld;
};

/// KITTI odometry pose text: one row-major 3x4 camera-to-world matrix
/// (12 reals) per non-empty line. Frame ids count non-empty lines from 0.
/// Errors are ParseError / InvalidRotation naming the 1-based line.
[[nodiscard]] PoseSequence parse_kitti_poses(std::string_view text);
[[nodiscard]] PoseSequence load_kitti_poses(const std::filesystem::path& path);

struct CameraConfig {
  Intrinsics intrinsics;
  std::optional<Extrinsic> pose;  // world-to-camera
  /// Image size the intrinsics were calibrated for, when given.
  std::optional<std::pair<int, int>> image_size;  // (width, height)
};

/// JSON camera description:
///
///   { "fx": 280, "fy": 280, "cx": 128, "cy": 128, "skew": 0,
///     "width": 256, "height": 256,
///     "convention": "world_to_camera" | "camera_to_world",
///     "R": [[r00, r01, r02], [r10, r11, r12], [r20, r21, r22]],
///     "t": [tx, ty, tz] }
///
/// fx, fy, cx, cy are required. R and t come together; "convention" is
/// required when they are present. width/height come together.
[[nodiscard]] CameraConfig parse_camera_config(std::string_view text);
[[nodiscard]] CameraConfig load_camera_config(const std::filesystem::path& path);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// EPT1 tensor files
// ---------------------------------------------------------------------------

/// Layout (all integers little-endian):
///
///   offset  size  field
///        0     4  magic "EPT1"
///        4     1  dtype tag, 1 = float32
///        5     3  reserved, zero
///        8     4  uint32 H
///       12     4  uint32 W
///       16     4  uint32 C
///       20     4  uint32 M, metadata byte count
///       24     M  metadata, UTF-8 "key=value\n" lines
///     24+M  HWC*4 payload, float32 LE, row-major (y, x, c)
///
/// The file must end exactly after the payload.
inline constexpr char kTensorMagic[4] = {'E', 'P', 'T', '1'};
inline constexpr std::uint8_t kTensorFloat32 = 1;

[[nodiscard]] std::string serialize_tensor(const EncodedPose& pose);
[[nodiscard]] EncodedPose deserialize_tensor(std::string_view bytes);

void write_tensor(const EncodedPose& pose, const std::filesystem::path& path);
[[nodiscard]] EncodedPose read_tensor(const std::filesystem::path& path);

}  // namespace epipose
