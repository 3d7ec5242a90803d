#include "slads/image.hpp"

#include <cmath>
#include <string>

namespace slads {

ImageGrid::ImageGrid(Dims dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
    if (dims.width <= 0 || dims.height <= 0)
        throw DimensionError("image dimensions must be positive");
    if (values_.size() != dims.size())
        throw DimensionError("image has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(dims.size()));
}

ImageGrid::ImageGrid(Dims dims, double fill) : ImageGrid(dims, std::vector<double>(dims.size(), fill)) {}

GroundTruthImage::GroundTruthImage(Dims dims, std::vector<double> values)
    : ImageGrid(dims, std::move(values)) {
    for (std::size_t i = 0; i < size(); ++i) {
        const double v = (*this)[i];
        if (!(v >= 0.0 && v <= 255.0))
            throw ContractError("ground truth value " + std::to_string(v) + " at index " +
                                std::to_string(i) + " outside [0, 255]");
    }
}

std::uint8_t quantize_intensity(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::round(v));
}

std::vector<std::uint8_t> quantize(const ImageGrid& image) {
    std::vector<std::uint8_t> out(image.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = quantize_intensity(image[i]);
    return out;
}

}  // namespace slads
