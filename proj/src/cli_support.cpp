#include "cli_support.hpp"

#include <charconv>

#include <fmt/format.h>

#include "epipose/error.hpp"

namespace epipose::cli::detail {

View load_view(const std::string& spec) {
  const auto hash = spec.rfind('#');
  if (hash != std::string::npos) {
    const std::string file = spec.substr(0, hash);
    const std::string index_text = spec.substr(hash + 1);
    int index = -1;
    auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
    if (ec != std::errc{} || ptr != index_text.data() + index_text.size() || index < 0)
      throw Error(ErrorKind::InvalidArgument, fmt::format("bad frame index in pose spec '{}'", spec));
    const PoseSequence seq = load_kitti_poses(file);
    if (std::size_t(index) >= seq.frames.size())
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("'{}' has {} poses, frame {} requested", file, seq.frames.size(), index));
    return {seq.frames[std::size_t(index)], std::nullopt};
  }
  CameraConfig config = load_camera_config(spec);
  if (!config.pose)
    throw Error(ErrorKind::MissingField, fmt::format("{}: camera config has no R/t pose", spec));
  return {*config.pose, config};
}

Intrinsics fit_to_image(const CameraConfig& config, int width, int height) {
  if (config.image_size && (config.image_size->first != width || config.image_size->second != height))
    return config.intrinsics.rescaled(config.image_size->first, config.image_size->second, width,
                                      height);
  return config.intrinsics;
}

Intrinsics resolve_intrinsics(const std::optional<std::filesystem::path>& explicit_path,
                              const View& view, int width, int height) {
  if (explicit_path) return fit_to_image(load_camera_config(*explicit_path), width, height);
  if (view.config) return fit_to_image(*view.config, width, height);
  throw Error(ErrorKind::MissingField,
              "no intrinsics: pass --intrinsics or use camera-config poses that carry fx/fy/cx/cy");
}

ImageBuffer load_source_image(const std::filesystem::path& path) { return to_rgb(read_png(path)); }

}  // namespace epipose::cli::detail
