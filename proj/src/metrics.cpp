#include "epipose/metrics.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "epipose/error.hpp"

namespace epipose {

namespace {

ImageD grayscale(const ImageBuffer& image) {
  ImageD out(image.height(), image.width(), 1);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      double acc = 0.0;
      for (float v : image.pixel(y, x)) acc += v;
      out.at(y, x) = acc / image.channels();
    }
  return out;
}

std::array<double, kSsimWindow> ssim_taps() {
  std::array<double, kSsimWindow> taps{};
  const double centre = (kSsimWindow - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - centre;
    taps[std::size_t(i)] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[std::size_t(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable Gaussian filtering restricted to positions where the window fits.
ImageD filter_valid(const ImageD& in, const std::array<double, kSsimWindow>& taps) {
  const int H = in.height(), W = in.width();
  const int oh = H - kSsimWindow + 1, ow = W - kSsimWindow + 1;
  ImageD rows(H, ow, 1);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[std::size_t(k)] * in.at(y, x + k);
      rows.at(y, x) = acc;
    }
  ImageD out(oh, ow, 1);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[std::size_t(k)] * rows.at(y + k, x);
      out.at(y, x) = acc;
    }
  return out;
}

ImageD product(const ImageD& a, const ImageD& b) {
  ImageD out(a.height(), a.width(), 1);
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

}  // namespace

double mae(const ImageBuffer& pred, const ImageBuffer& target) {
  require_same_shape(pred, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += std::abs(double(pred.values()[i]) - double(target.values()[i]));
  return pred.empty() ? 0.0 : acc / double(pred.size());
}

double mse(const ImageBuffer& pred, const ImageBuffer& target) {
  require_same_shape(pred, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = double(pred.values()[i]) - double(target.values()[i]);
    acc += d * d;
  }
  return pred.empty() ? 0.0 : acc / double(pred.size());
}

double psnr_from_mse(double mse) {
  if (mse == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(const ImageBuffer& pred, const ImageBuffer& target) {
  return psnr_from_mse(mse(pred, target));
}

double ssim(const ImageBuffer& pred, const ImageBuffer& target) {
  require_same_shape(pred, target);
  if (pred.height() < kSsimWindow || pred.width() < kSsimWindow)
    throw Error(ErrorKind::ImageTooSmall,
                fmt::format("SSIM needs at least {0}x{0} pixels, got {1}x{2}", kSsimWindow,
                            pred.width(), pred.height()));
  constexpr double C1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  constexpr double C2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);
  static const auto taps = ssim_taps();

  const ImageD a = grayscale(pred);
  const ImageD b = grayscale(target);
  const ImageD mu_a = filter_valid(a, taps);
  const ImageD mu_b = filter_valid(b, taps);
  const ImageD aa = filter_valid(product(a, a), taps);
  const ImageD bb = filter_valid(product(b, b), taps);
  const ImageD ab = filter_valid(product(a, b), taps);

  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a.values()[i], mb = mu_b.values()[i];
    const double var_a = aa.values()[i] - ma * ma;
    const double var_b = bb.values()[i] - mb * mb;
    const double cov = ab.values()[i] - ma * mb;
    acc += ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) /
           ((ma * ma + mb * mb + C1) * (var_a + var_b + C2));
  }
  return acc / double(mu_a.size());
}

MetricReport evaluate(const ImageBuffer& pred, const ImageBuffer& target) {
  MetricReport r;
  r.mae = mae(pred, target);
  r.mse = mse(pred, target);
  r.psnr = psnr_from_mse(r.mse);
  r.ssim = ssim(pred, target);
  return r;
}

}  // namespace epipose
