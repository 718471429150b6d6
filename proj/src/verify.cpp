#include "epipose/verify.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "epipose/error.hpp"
#include "epipose/raster.hpp"

namespace epipose {

VerifyReport verify_encoding(const EncodedPose& pose, const ImageBuffer& source,
                             const FundamentalMatrix& F, double max_distance,
                             const std::optional<Vec3>& source_translation,
                             const std::optional<Vec3>& target_translation,
                             std::size_t max_reported) {
  const ImageBuffer& img = pose.image;
  if (img.height() != source.height() || img.width() != source.width())
    throw Error(ErrorKind::ShapeMismatch, "encoding and source image differ in size");
  if (source.channels() != 3)
    throw Error(ErrorKind::InvalidArgument, "source image must have 3 channels");
  const bool extended = img.channels() == 4;
  if (extended && (!source_translation || !target_translation))
    throw Error(ErrorKind::InvalidArgument, "4-channel check needs both translations");

  VerifyReport report;
  auto violate = [&](Pixel p, std::string reason) {
    ++report.violation_count;
    if (report.violations.size() < max_reported) report.violations.push_back({p, std::move(reason)});
  };

  // Lines of every contributing grid pixel, grouped by source colour.
  std::map<Rgb, std::vector<Vec3>> lines_by_color;
  for (const Pixel& p : pose.grid.coords()) {
    const auto c = source.pixel(p.y, p.x);
    if (pose.options.skip_background && is_background(c, pose.options)) continue;
    const auto line = try_epipolar_line(F, p);
    if (!line) continue;
    lines_by_color[Rgb{c[0], c[1], c[2]}].push_back(*line);
  }

  std::optional<float> delta;
  if (extended) delta = float(extended_delta(*source_translation, *target_translation));

  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const auto px = img.pixel(y, x);
      const bool nonzero = px[0] != 0.0f || px[1] != 0.0f || px[2] != 0.0f;
      if (extended) {
        const float want = std::max({px[0], px[1], px[2]}) > 0.0f ? *delta : 0.0f;
        if (std::memcmp(&px[3], &want, sizeof(float)) != 0)
          violate({x, y}, fmt::format("channel 4 is {} but should be {}", px[3], want));
      }
      if (!nonzero) continue;
      ++report.nonzero_pixels;
      const auto it = lines_by_color.find(Rgb{px[0], px[1], px[2]});
      if (it == lines_by_color.end()) {
        violate({x, y}, fmt::format("colour ({}, {}, {}) belongs to no sampled pixel", px[0],
                                    px[1], px[2]));
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& l : it->second) best = std::min(best, line_distance(l, x, y));
      report.max_residual = std::max(report.max_residual, best);
      if (best > max_distance)
        violate({x, y}, fmt::format("{:.6f} px from its line (limit {:.6f})", best, max_distance));
    }

  const EncodedPose fresh =
      extended ? encode_extended(source, F, pose.grid, pose.options, *source_translation,
                                 *target_translation)
               : encode(source, F, pose.grid, pose.options);
  if (!fresh.image.same_shape(img)) {
    report.mismatch_count = img.size();
  } else {
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        const auto a = img.pixel(y, x);
        const auto b = fresh.image.pixel(y, x);
        if (std::memcmp(a.data(), b.data(), a.size_bytes()) != 0) {
          ++report.mismatch_count;
          if (report.violations.size() < max_reported)
            report.violations.push_back({{x, y}, "differs from a fresh encoding"});
        }
      }
  }
  return report;
}

}  // namespace epipose
