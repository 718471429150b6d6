#pragma once

// Helpers shared by the command implementations.

#include <filesystem>
#include <optional>
#include <string>

#include "epipose/geometry.hpp"
#include "epipose/io.hpp"

namespace epipose::cli::detail {

/// A camera view named on the command line: either `poses.txt#N` (frame N of
/// a KITTI pose file) or a camera-config JSON carrying R and t.
struct View {
  Extrinsic pose;
  std::optional<CameraConfig> config;
};

[[nodiscard]] View load_view(const std::string& spec);

/// Intrinsics from an explicit config file, else from the view's own config,
/// rescaled to width x height when the config records a different size.
[[nodiscard]] Intrinsics resolve_intrinsics(const std::optional<std::filesystem::path>& explicit_path,
                                            const View& view, int width, int height);

[[nodiscard]] Intrinsics fit_to_image(const CameraConfig& config, int width, int height);

[[nodiscard]] ImageBuffer load_source_image(const std::filesystem::path& path);

}  // namespace epipose::cli::detail
