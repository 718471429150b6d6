#include "epipose/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epipose/error.hpp"

namespace epipose {

double line_distance(const Vec3& line, double x, double y) {
  return std::abs(line.x() * x + line.y() * y + line.z()) / std::hypot(line.x(), line.y());
}

std::optional<LineSegment> clip_line(const Vec3& line, int height, int width) {
  if (std::abs(line.x()) + std::abs(line.y()) <= kDegeneracyTolerance)
    throw Error(ErrorKind::DegenerateLine, "cannot clip a line at infinity");
  if (height < 1 || width < 1) return std::nullopt;

  const double norm = std::hypot(line.x(), line.y());
  const double a = line.x() / norm, b = line.y() / norm, c = line.z() / norm;
  // Foot of the perpendicular from the origin, and the unit direction.
  const Vec2 origin(-c * a, -c * b);
  const Vec2 dir(-b, a);

  const double xmin = -0.5, xmax = width - 0.5;
  const double ymin = -0.5, ymax = height - 0.5;

  // Liang-Barsky on the parametrisation origin + s * dir.
  double s0 = -std::numeric_limits<double>::infinity();
  double s1 = std::numeric_limits<double>::infinity();
  const double p[4] = {-dir.x(), dir.x(), -dir.y(), dir.y()};
  const double q[4] = {origin.x() - xmin, xmax - origin.x(), origin.y() - ymin,
                       ymax - origin.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double s = q[i] / p[i];
    if (p[i] < 0.0)
      s0 = std::max(s0, s);
    else
      s1 = std::min(s1, s);
  }
  if (s0 > s1) return std::nullopt;

  auto clamp_to_rect = [&](Vec2 v) {
    return Vec2(std::clamp(v.x(), xmin, xmax), std::clamp(v.y(), ymin, ymax));
  };
  Vec2 first = clamp_to_rect(origin + s0 * dir);
  Vec2 second = clamp_to_rect(origin + s1 * dir);
  if (std::pair(second.x(), second.y()) < std::pair(first.x(), first.y())) std::swap(first, second);
  return LineSegment{first, second, line, height, width};
}

std::vector<Pixel> rasterize(const LineSegment& segment) {
  const double a = segment.line.x(), b = segment.line.y(), c = segment.line.z();
  const bool major_x =
      std::abs(segment.end.x() - segment.start.x()) >= std::abs(segment.end.y() - segment.start.y());

  // Along x: y = -(a x + c) / b. Along y: x = -(b y + c) / a.
  const double lo = major_x ? std::min(segment.start.x(), segment.end.x())
                            : std::min(segment.start.y(), segment.end.y());
  const double hi = major_x ? std::max(segment.start.x(), segment.end.x())
                            : std::max(segment.start.y(), segment.end.y());
  const int major_limit = major_x ? segment.width : segment.height;
  const int minor_limit = major_x ? segment.height : segment.width;
  const int first = std::max(0, int(std::ceil(lo)));
  const int last = std::min(major_limit - 1, int(std::floor(hi)));

  std::vector<Pixel> pixels;
  if (last < first) return pixels;
  pixels.reserve(std::size_t(last - first + 1));
  for (int m = first; m <= last; ++m) {
    const double minor = major_x ? -(a * m + c) / b : -(b * m + c) / a;
    const int n = std::clamp(int(std::ceil(minor - 0.5)), 0, minor_limit - 1);
    pixels.push_back(major_x ? Pixel{m, n} : Pixel{n, m});
  }
  return pixels;
}

}  // namespace epipose
