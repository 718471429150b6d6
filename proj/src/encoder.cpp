#include "epipose/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "epipose/error.hpp"
#include "epipose/raster.hpp"

namespace epipose {

namespace {

void validate_inputs(const ImageBuffer& source, const SampleGrid& grid) {
  if (source.channels() != 3)
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("source image must have 3 channels, got {}", source.channels()));
  if (grid.height() != source.height() || grid.width() != source.width())
    throw Error(ErrorKind::BadGrid,
                fmt::format("grid built for {}x{} but source is {}x{}", grid.width(),
                            grid.height(), source.width(), source.height()));
  for (float v : source.values())
    if (!(v >= 0.0f && v <= 1.0f))
      throw Error(ErrorKind::InvalidArgument, "source colour values must lie in [0, 1]");
  for (const Pixel& p : grid.coords())
    if (p.x < 0 || p.y < 0 || p.x >= source.width() || p.y >= source.height())
      throw Error(ErrorKind::BadGrid, fmt::format("grid pixel ({}, {}) out of bounds", p.x, p.y));
}

}  // namespace

double DeltaVisualization::apply(double delta_t) const {
  return std::clamp(offset + scale * delta_t, 0.0, 1.0);
}

bool bitwise_equal(const EncodedPose& a, const EncodedPose& b) {
  if (!a.image.same_shape(b.image)) return false;
  const auto va = a.image.values();
  const auto vb = b.image.values();
  if (std::memcmp(va.data(), vb.data(), va.size_bytes()) != 0) return false;
  auto same_double = [](const std::optional<double>& x, const std::optional<double>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || std::memcmp(&*x, &*y, sizeof(double)) == 0;
  };
  return a.grid == b.grid && a.options == b.options && same_double(a.delta_t, b.delta_t) &&
         a.delta_viz == b.delta_viz && a.lines_drawn == b.lines_drawn &&
         a.pixels_set == b.pixels_set && a.status == b.status;
}

bool is_background(std::span<const float> color, const EncodeOptions& options) {
  for (std::size_t c = 0; c < 3; ++c)
    if (std::abs(double(color[c]) - double(options.background_color[c])) >
        options.background_tolerance)
      return false;
  return true;
}

EncodedPose encode(const ImageBuffer& source, const FundamentalMatrix& F, const SampleGrid& grid,
                   const EncodeOptions& options) {
  validate_inputs(source, grid);
  if (!(options.background_tolerance >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "background tolerance must be >= 0");

  const int H = source.height(), W = source.width();
  EncodedPose out;
  out.image = ImageBuffer(H, W, 3, 0.0f);
  out.grid = grid;
  out.options = options;

  std::vector<unsigned char> touched(std::size_t(H) * std::size_t(W), 0);
  for (const Pixel& p : grid.coords()) {
    const auto color = source.pixel(p.y, p.x);
    if (options.skip_background && is_background(color, options)) continue;
    const auto line = try_epipolar_line(F, p);
    if (!line) continue;
    const auto segment = clip_line(*line, H, W);
    if (!segment) continue;
    const auto pixels = rasterize(*segment);
    if (pixels.empty()) continue;
    ++out.lines_drawn;
    for (const Pixel& q : pixels) {
      std::copy(color.begin(), color.end(), out.image.pixel(q.y, q.x).begin());
      touched[std::size_t(q.y) * std::size_t(W) + std::size_t(q.x)] = 1;
    }
  }
  out.pixels_set = std::size_t(std::count(touched.begin(), touched.end(), 1));
  out.status = out.lines_drawn == 0 ? EncodeStatus::Empty : EncodeStatus::Ok;
  return out;
}

double extended_delta(const Vec3& source_translation, const Vec3& target_translation) {
  const Vec3 delta = target_translation.cwiseAbs() - source_translation.cwiseAbs();
  int dominant = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(delta[i]) > std::abs(delta[dominant])) dominant = i;
  const double t_m = delta[dominant];
  const double sign = t_m > 0.0 ? 1.0 : (t_m < 0.0 ? -1.0 : 0.0);
  return sign * std::abs(t_m);
}

EncodedPose encode_extended(const ImageBuffer& source, const FundamentalMatrix& F,
                            const SampleGrid& grid, const EncodeOptions& options,
                            const Vec3& source_translation, const Vec3& target_translation) {
  if (!options.extended)
    throw Error(ErrorKind::InvalidArgument, "encode_extended requires options.extended");
  if (!source_translation.allFinite() || !target_translation.allFinite())
    throw Error(ErrorKind::InvalidArgument, "translations must be finite");

  EncodedPose rgb = encode(source, F, grid, options);
  const double delta = extended_delta(source_translation, target_translation);
  const auto delta_f = float(delta);

  const int H = rgb.image.height(), W = rgb.image.width();
  ImageBuffer image(H, W, 4, 0.0f);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const auto in = rgb.image.pixel(y, x);
      auto px = image.pixel(y, x);
      std::copy(in.begin(), in.end(), px.begin());
      if (std::max({in[0], in[1], in[2]}) > 0.0f) px[3] = delta_f;
    }
  rgb.image = std::move(image);
  rgb.delta_t = delta;
  return rgb;
}

EncodedPose encode_views(const ImageBuffer& source, const Intrinsics& source_k,
                         const Intrinsics& target_k, const Extrinsic& source_pose,
                         const Extrinsic& target_pose, const SampleGrid& grid,
                         const EncodeOptions& options) {
  const auto F = fundamental_matrix(source_k, target_k, relative_motion(source_pose, target_pose));
  if (options.extended)
    return encode_extended(source, F, grid, options, source_pose.translation(),
                           target_pose.translation());
  return encode(source, F, grid, options);
}

}  // namespace epipose
