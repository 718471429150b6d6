#pragma once

#include <limits>

#include "epipose/image.hpp"

namespace epipose {

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// PSNR of identical images.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

struct MetricReport {
  double mae = 0.0;
  double mse = 0.0;
  double ssim = 1.0;
  double psnr = kPsnrInfinite;
};

[[nodiscard]] double mae(const ImageBuffer& pred, const ImageBuffer& target);
[[nodiscard]] double mse(const ImageBuffer& pred, const ImageBuffer& target);

/// 10 log10(1 / MSE) for unit peak; kPsnrInfinite when MSE == 0.
[[nodiscard]] double psnr(const ImageBuffer& pred, const ImageBuffer& target);
[[nodiscard]] double psnr_from_mse(double mse);

/// Mean SSIM over the valid positions of an 11x11 Gaussian window
/// (sigma 1.5, C1 = 0.01^2, C2 = 0.03^2), computed on the channel mean of
/// each image. Throws ImageTooSmall below 11x11.
[[nodiscard]] double ssim(const ImageBuffer& pred, const ImageBuffer& target);

[[nodiscard]] MetricReport evaluate(const ImageBuffer& pred, const ImageBuffer& target);

}  // namespace epipose
