#pragma once

#include <optional>
#include <vector>

#include "epipose/geometry.hpp"

namespace epipose {

/// Part of an infinite line a*x + b*y + c = 0 inside the image rectangle
/// [-0.5, W-0.5] x [-0.5, H-0.5]. Endpoints are ordered by (x, y).
struct LineSegment {
  Vec2 start;
  Vec2 end;
  Vec3 line;
  int height = 0;
  int width = 0;
};

/// Perpendicular distance from (x, y) to the line.
[[nodiscard]] double line_distance(const Vec3& line, double x, double y);

/// Clips the line to a height x width image. Empty when they do not meet.
/// Throws DegenerateLine when |a| + |b| <= 1e-12.
[[nodiscard]] std::optional<LineSegment> clip_line(const Vec3& line, int height, int width);

/// One pixel per integer position along the segment's major axis (the axis of
/// larger extent, x on ties), ordered by increasing major coordinate. The minor
/// coordinate is the line's value rounded to nearest, ties to the lower index.
/// Every emitted pixel centre is within 0.5 px of the line.
[[nodiscard]] std::vector<Pixel> rasterize(const LineSegment& segment);

}  // namespace epipose
