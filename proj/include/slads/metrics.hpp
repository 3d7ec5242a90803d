#pragma once

#include "slads/image.hpp"

namespace slads {

/// Returned by psnr() when the two images are identical.
inline constexpr double kPsnrCap = 99.0;
inline constexpr double kPeakIntensity = 255.0;

/// Sum of absolute differences over all pixels.
double distortion(const ImageGrid& truth, const ImageGrid& estimate);

double mean_squared_error(const ImageGrid& truth, const ImageGrid& estimate);

/// 10 log10(255^2 / MSE) in dB, capped at kPsnrCap when MSE is zero.
double psnr(const ImageGrid& truth, const ImageGrid& estimate);
double psnr_from_mse(double mse);

}  // namespace slads
