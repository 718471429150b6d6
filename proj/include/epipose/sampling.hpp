#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "epipose/geometry.hpp"

namespace epipose {

struct RegularMode {
  int r = 0;
  friend bool operator==(const RegularMode&, const RegularMode&) = default;
};

struct RandomMode {
  double fraction = 0.0;
  std::uint64_t seed = 0;
  friend bool operator==(const RandomMode&, const RandomMode&) = default;
};

using SamplingMode = std::variant<RegularMode, RandomMode>;

/// Identifier of the generator behind random_samples(). Bump the suffix if the
/// draw procedure ever changes; it is stored in tensor metadata.
inline constexpr std::string_view kRandomGeneratorName = "mt19937_64/fisher-yates/v1";

/// Source-pixel locations whose epipolar lines get drawn, in row-major order.
class SampleGrid {
 public:
  SampleGrid() = default;
  SampleGrid(int height, int width, SamplingMode mode, std::vector<Pixel> coords);

  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] const SamplingMode& mode() const noexcept { return mode_; }
  [[nodiscard]] const std::vector<Pixel>& coords() const noexcept { return coords_; }
  [[nodiscard]] std::size_t size() const noexcept { return coords_.size(); }

  friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  SamplingMode mode_;
  std::vector<Pixel> coords_;
};

/// Regular grid with r samples per axis: spacing s = floor(extent / r) and
/// positions k*s - 1 for k = 1..r, giving exactly r*r in-bounds pixels.
[[nodiscard]] SampleGrid grid_samples(int height, int width, int r);

/// floor(fraction * H * W) distinct pixels drawn uniformly without
/// replacement, reproducible from `seed`. Returned in row-major order.
[[nodiscard]] SampleGrid random_samples(int height, int width, double fraction,
                                        std::uint64_t seed);

/// Rebuilds the grid a mode describes.
[[nodiscard]] SampleGrid make_grid(int height, int width, const SamplingMode& mode);

}  // namespace epipose
