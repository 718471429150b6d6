#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "epipose/error.hpp"

namespace epipose {

/// Row-major H x W x C image (channel fastest).
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, T fill = T{})
      : height_(height), width_(width), channels_(channels) {
    if (height < 0 || width < 0 || channels < 1)
      throw Error(ErrorKind::InvalidArgument, "image dimensions must be non-negative with >= 1 channel");
    data_.assign(std::size_t(height) * std::size_t(width) * std::size_t(channels), fill);
  }
  Image(int height, int width, int channels, std::span<const T> values)
      : Image(height, width, channels) {
    if (values.size() != data_.size())
      throw Error(ErrorKind::ShapeMismatch, "value count does not match image dimensions");
    std::copy(values.begin(), values.end(), data_.begin());
  }

  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int channels() const noexcept { return channels_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::size_t index(int y, int x, int c = 0) const noexcept {
    return (std::size_t(y) * std::size_t(width_) + std::size_t(x)) * std::size_t(channels_) +
           std::size_t(c);
  }
  [[nodiscard]] T& at(int y, int x, int c = 0) noexcept { return data_[index(y, x, c)]; }
  [[nodiscard]] const T& at(int y, int x, int c = 0) const noexcept { return data_[index(y, x, c)]; }

  [[nodiscard]] std::span<T> pixel(int y, int x) noexcept {
    return {data_.data() + index(y, x), std::size_t(channels_)};
  }
  [[nodiscard]] std::span<const T> pixel(int y, int x) const noexcept {
    return {data_.data() + index(y, x), std::size_t(channels_)};
  }

  [[nodiscard]] std::span<T> values() noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return data_; }

  template <typename U>
  [[nodiscard]] bool same_shape(const Image<U>& other) const noexcept {
    return height_ == other.height() && width_ == other.width() && channels_ == other.channels();
  }

  template <typename U>
  [[nodiscard]] Image<U> cast() const {
    Image<U> out(height_, width_, channels_);
    auto dst = out.values();
    for (std::size_t i = 0; i < data_.size(); ++i) dst[i] = U(data_[i]);
    return out;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

/// Single-precision image; 8/16-bit files and the tensor payload map onto it.
using ImageBuffer = Image<float>;
using ImageD = Image<double>;

template <typename T, typename U>
void require_same_shape(const Image<T>& a, const Image<U>& b) {
  if (!a.same_shape(b))
    throw Error(ErrorKind::ShapeMismatch,
                "images differ in shape (" + std::to_string(a.height()) + "x" +
                    std::to_string(a.width()) + "x" + std::to_string(a.channels()) + " vs " +
                    std::to_string(b.height()) + "x" + std::to_string(b.width()) + "x" +
                    std::to_string(b.channels()) + ")");
}

/// Three-channel view of an image: grey is replicated, alpha dropped.
[[nodiscard]] ImageBuffer to_rgb(const ImageBuffer& image);

}  // namespace epipose
