#include "slads/metrics.hpp"

#include <cmath>

namespace slads {

namespace {

void require_same_dims(const ImageGrid& a, const ImageGrid& b) {
    if (a.dims() != b.dims())
        throw DimensionError("image dimensions differ: " + std::to_string(a.width()) + "x" +
                             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()));
}

}  // namespace

double distortion(const ImageGrid& truth, const ImageGrid& estimate) {
    require_same_dims(truth, estimate);
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) sum += std::abs(truth[i] - estimate[i]);
    return sum;
}

double mean_squared_error(const ImageGrid& truth, const ImageGrid& estimate) {
    require_same_dims(truth, estimate);
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = truth[i] - estimate[i];
        sum += d * d;
    }
    return sum / static_cast<double>(truth.size());
}

double psnr_from_mse(double mse) {
    if (mse <= 0.0) return kPsnrCap;
    return 10.0 * std::log10(kPeakIntensity * kPeakIntensity / mse);
}

double psnr(const ImageGrid& truth, const ImageGrid& estimate) {
    return psnr_from_mse(mean_squared_error(truth, estimate));
}

}  // namespace slads
