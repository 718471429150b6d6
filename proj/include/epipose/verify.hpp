#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "epipose/encoder.hpp"

namespace epipose {

inline const double kMaxLineDistance = std::sqrt(2.0) / 2.0;

struct Violation {
  Pixel pixel;
  std::string reason;
};

struct VerifyReport {
  /// Largest distance from a non-zero pixel to the nearest sampled line of the
  /// same colour.
  double max_residual = 0.0;
  std::size_t nonzero_pixels = 0;
  std::size_t violation_count = 0;
  /// Pixels that differ from a fresh encoding of the same inputs.
  std::size_t mismatch_count = 0;
  /// First few violations, in row-major order.
  std::vector<Violation> violations;

  [[nodiscard]] bool passed() const noexcept { return violation_count == 0 && mismatch_count == 0; }
};

/// Re-derives every sampled line from F and checks the stored encoding:
///  - each non-zero pixel's colour equals the source colour of a contributing
///    grid pixel whose line passes within `max_distance`;
///  - the fourth channel, when present, holds delta_t exactly on non-zero RGB
///    pixels and 0 elsewhere;
///  - the whole image is bit-identical to re-encoding (zero where untouched,
///    last-writer colours where lines cross).
/// `source_translation`/`target_translation` are needed for 4-channel input.
[[nodiscard]] VerifyReport verify_encoding(const EncodedPose& pose, const ImageBuffer& source,
                                           const FundamentalMatrix& F,
                                           double max_distance = kMaxLineDistance,
                                           const std::optional<Vec3>& source_translation = {},
                                           const std::optional<Vec3>& target_translation = {},
                                           std::size_t max_reported = 20);

}  // namespace epipose
