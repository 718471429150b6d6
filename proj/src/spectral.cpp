#include "epipose/spectral.hpp"

#include <cmath>

#include <fmt/format.h>

#include "epipose/error.hpp"

namespace epipose {

namespace {

// Symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1. Valid for |overhang| <= n.
int reflect(int i, int n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - i - 1;
  return i;
}

void require_fits(const ImageD& image, const GaussianKernel& kernel) {
  if (image.height() < kernel.size || image.width() < kernel.size)
    throw Error(ErrorKind::ImageTooSmall,
                fmt::format("{}x{} image is smaller than the {}x{} kernel", image.width(),
                            image.height(), kernel.size, kernel.size));
}

}  // namespace

GaussianKernel gaussian_kernel(int size) {
  if (size < 3 || size % 2 == 0)
    throw Error(ErrorKind::BadKernel, fmt::format("kernel size must be odd and >= 3, got {}", size));
  GaussianKernel k;
  k.size = size;
  k.mu = (size - 1) / 2.0;
  const double ratio = double(size) / double(size + 1);
  k.sigma = ratio * ratio;

  k.taps.resize(std::size_t(size));
  double tap_sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - k.mu;
    k.taps[std::size_t(i)] = std::exp(-(d * d) / (2.0 * k.sigma * k.sigma));
    tap_sum += k.taps[std::size_t(i)];
  }
  for (double& t : k.taps) t /= tap_sum;

  k.weights.resize(std::size_t(size) * std::size_t(size));
  double weight_sum = 0.0;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      const double di = i - k.mu, dj = j - k.mu;
      const double w = std::exp(-(di * di + dj * dj) / (2.0 * k.sigma * k.sigma));
      k.weights[std::size_t(i * size + j)] = w;
      weight_sum += w;
    }
  for (double& w : k.weights) w /= weight_sum;
  return k;
}

ImageD lowpass(const ImageD& image, const GaussianKernel& kernel) {
  require_fits(image, kernel);
  const int H = image.height(), W = image.width(), C = image.channels();
  const int half = kernel.size / 2;

  ImageD rows(H, W, C);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int k = 0; k < kernel.size; ++k)
          acc += kernel.taps[std::size_t(k)] * image.at(y, reflect(x + k - half, W), c);
        rows.at(y, x, c) = acc;
      }

  ImageD out(H, W, C);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int k = 0; k < kernel.size; ++k)
          acc += kernel.taps[std::size_t(k)] * rows.at(reflect(y + k - half, H), x, c);
        out.at(y, x, c) = acc;
      }
  return out;
}

ImageD lowpass_direct(const ImageD& image, const GaussianKernel& kernel) {
  require_fits(image, kernel);
  const int H = image.height(), W = image.width(), C = image.channels();
  const int half = kernel.size / 2;
  ImageD out(H, W, C);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int i = 0; i < kernel.size; ++i)
          for (int j = 0; j < kernel.size; ++j)
            acc += kernel.weight(i, j) *
                   image.at(reflect(y + i - half, H), reflect(x + j - half, W), c);
        out.at(y, x, c) = acc;
      }
  return out;
}

FrequencySplit decompose(const ImageD& image, const GaussianKernel& kernel) {
  FrequencySplit split{lowpass(image, kernel), ImageD(image.height(), image.width(), image.channels())};
  const auto in = image.values();
  const auto low = split.low.values();
  auto high = split.high.values();
  for (std::size_t i = 0; i < in.size(); ++i) high[i] = in[i] - low[i];
  return split;
}

FrequencySplit decompose(const ImageBuffer& image, const GaussianKernel& kernel) {
  return decompose(image.cast<double>(), kernel);
}

double spectral_loss(const ImageD& pred, const ImageD& target, const GaussianKernel& kernel) {
  require_same_shape(pred, target);
  const auto hp = decompose(pred, kernel).high;
  const auto ht = decompose(target, kernel).high;
  const auto a = hp.values();
  const auto b = ht.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / double(a.size());
}

double spectral_loss(const ImageBuffer& pred, const ImageBuffer& target,
                     const GaussianKernel& kernel) {
  require_same_shape(pred, target);
  return spectral_loss(pred.cast<double>(), target.cast<double>(), kernel);
}

LossReport total_loss(const ImageD& pred, const ImageD& target, double lambda,
                      const GaussianKernel& kernel) {
  require_same_shape(pred, target);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::InvalidArgument, fmt::format("lambda must be finite and >= 0, got {}", lambda));
  LossReport report;
  report.lambda = lambda;
  const auto a = pred.values();
  const auto b = target.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  report.l1 = acc / double(a.size());
  report.spectral = spectral_loss(pred, target, kernel);
  report.total = report.l1 + lambda * report.spectral;
  return report;
}

LossReport total_loss(const ImageBuffer& pred, const ImageBuffer& target, double lambda,
                      const GaussianKernel& kernel) {
  require_same_shape(pred, target);
  return total_loss(pred.cast<double>(), target.cast<double>(), lambda, kernel);
}

}  // namespace epipose
