#pragma once

#include <utility>
#include <vector>

#include "epipose/image.hpp"

namespace epipose {

/// Square Gaussian filter with mean mu = (k-1)/2 and sigma = (k/(k+1))^2,
/// weights exp(-((i-mu)^2 + (j-mu)^2) / (2 sigma^2)) normalised to unit sum.
struct GaussianKernel {
  int size = 0;
  double mu = 0.0;
  double sigma = 0.0;
  /// Normalised 1-D factor; weights == outer(taps, taps).
  std::vector<double> taps;
  /// size x size, row-major.
  std::vector<double> weights;

  [[nodiscard]] double weight(int i, int j) const { return weights[std::size_t(i * size + j)]; }
};

inline constexpr int kDefaultKernelSize = 5;
inline constexpr double kDefaultLambda = 1.0;

/// Throws BadKernel unless size is odd and >= 3.
[[nodiscard]] GaussianKernel gaussian_kernel(int size = kDefaultKernelSize);

/// Per-channel convolution with symmetric (edge-repeating) reflection at the
/// borders, computed separably. Throws ImageTooSmall when H or W < kernel size.
[[nodiscard]] ImageD lowpass(const ImageD& image, const GaussianKernel& kernel);

/// Direct two-dimensional evaluation of the same convolution; kept as the
/// reference the separable path is checked against.
[[nodiscard]] ImageD lowpass_direct(const ImageD& image, const GaussianKernel& kernel);

struct FrequencySplit {
  ImageD low;
  ImageD high;
};

/// low = image * kernel, high = image - low.
[[nodiscard]] FrequencySplit decompose(const ImageD& image, const GaussianKernel& kernel);
[[nodiscard]] FrequencySplit decompose(const ImageBuffer& image, const GaussianKernel& kernel);

/// Mean over pixels and channels of (high(pred) - high(target))^2.
[[nodiscard]] double spectral_loss(const ImageD& pred, const ImageD& target,
                                   const GaussianKernel& kernel);
[[nodiscard]] double spectral_loss(const ImageBuffer& pred, const ImageBuffer& target,
                                   const GaussianKernel& kernel);

struct LossReport {
  double l1 = 0.0;
  double spectral = 0.0;
  double total = 0.0;
  double lambda = kDefaultLambda;
};

/// l1 = mean |pred - target|; total = l1 + lambda * spectral.
[[nodiscard]] LossReport total_loss(const ImageD& pred, const ImageD& target, double lambda,
                                    const GaussianKernel& kernel);
[[nodiscard]] LossReport total_loss(const ImageBuffer& pred, const ImageBuffer& target,
                                    double lambda, const GaussianKernel& kernel);

}  // namespace epipose
