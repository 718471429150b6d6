#include "epipose/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "epipose/error.hpp"

namespace epipose {

namespace {

// Unbiased draw in [0, bound) by multiply-and-reject. std::uniform_int_distribution
// is implementation-defined, so it cannot back a replayable sampler.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  u128 m = u128(rng()) * bound;
  auto low = std::uint64_t(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = u128(rng()) * bound;
      low = std::uint64_t(m);
    }
  }
  return std::uint64_t(m >> 64);
}

std::size_t sample_count(double fraction, std::size_t total) {
  const double product = fraction * double(total);
  auto n = std::size_t(std::floor(product));
  // 0.29 * 100 evaluates to 28.999999999999996; snap representation noise.
  if (product - double(n) > 1.0 - 1e-9) ++n;
  return std::min(n, total);
}

}  // namespace

SampleGrid::SampleGrid(int height, int width, SamplingMode mode, std::vector<Pixel> coords)
    : height_(height), width_(width), mode_(mode), coords_(std::move(coords)) {}

SampleGrid grid_samples(int height, int width, int r) {
  if (height < 1 || width < 1)
    throw Error(ErrorKind::BadGrid, fmt::format("image size {}x{} is empty", width, height));
  if (r < 1 || r > std::min(height, width))
    throw Error(ErrorKind::BadGrid,
                fmt::format("r = {} outside [1, {}] for a {}x{} image", r,
                            std::min(height, width), width, height));
  const int step_y = height / r;
  const int step_x = width / r;
  std::vector<Pixel> coords;
  coords.reserve(std::size_t(r) * std::size_t(r));
  for (int j = 1; j <= r; ++j)
    for (int k = 1; k <= r; ++k) coords.push_back({k * step_x - 1, j * step_y - 1});
  return {height, width, RegularMode{r}, std::move(coords)};
}

SampleGrid random_samples(int height, int width, double fraction, std::uint64_t seed) {
  if (height < 1 || width < 1)
    throw Error(ErrorKind::BadGrid, fmt::format("image size {}x{} is empty", width, height));
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw Error(ErrorKind::BadGrid, fmt::format("fraction {} outside (0, 1]", fraction));

  const std::size_t total = std::size_t(height) * std::size_t(width);
  const std::size_t n = sample_count(fraction, total);

  std::vector<std::uint32_t> index(total);
  std::iota(index.begin(), index.end(), std::uint32_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + bounded(rng, total - i);
    std::swap(index[i], index[j]);
  }
  index.resize(n);
  std::sort(index.begin(), index.end());

  std::vector<Pixel> coords;
  coords.reserve(n);
  for (std::uint32_t flat : index) coords.push_back({int(flat % width), int(flat / width)});
  return {height, width, RandomMode{fraction, seed}, std::move(coords)};
}

SampleGrid make_grid(int height, int width, const SamplingMode& mode) {
  return std::visit(
      [&](const auto& m) -> SampleGrid {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, RegularMode>)
          return grid_samples(height, width, m.r);
        else
          return random_samples(height, width, m.fraction, m.seed);
      },
      mode);
}

}  // namespace epipose
