#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slads/error.hpp"

namespace slads {

struct Dims {
    int width = 0;
    int height = 0;

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    bool contains(int row, int col) const noexcept {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    friend bool operator==(const Dims&, const Dims&) = default;
};

struct PixelLocation {
    int row = 0;
    int col = 0;

    std::size_t linear(const Dims& dims) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(dims.width) +
               static_cast<std::size_t>(col);
    }
    static PixelLocation from_linear(std::size_t index, const Dims& dims) noexcept {
        return {static_cast<int>(index / static_cast<std::size_t>(dims.width)),
                static_cast<int>(index % static_cast<std::size_t>(dims.width))};
    }
    friend bool operator==(const PixelLocation&, const PixelLocation&) = default;
};

/// Row-major grid of real intensities.
class ImageGrid {
public:
    ImageGrid() = default;
    ImageGrid(Dims dims, std::vector<double> values);
    ImageGrid(Dims dims, double fill);

    const Dims& dims() const noexcept { return dims_; }
    int width() const noexcept { return dims_.width; }
    int height() const noexcept { return dims_.height; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double at(int row, int col) const noexcept {
        return values_[static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) +
                       static_cast<std::size_t>(col)];
    }
    double at(PixelLocation p) const noexcept { return at(p.row, p.col); }

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
    Dims dims_;
    std::vector<double> values_;
};

/// The full object image. Values stay on the 0..255 scale.
class GroundTruthImage : public ImageGrid {
public:
    GroundTruthImage() = default;
    /// Throws ContractError if any value is outside [0, 255] or the size does not match.
    GroundTruthImage(Dims dims, std::vector<double> values);
};

/// Estimate of the object image computed from scattered measurements.
class Reconstruction : public ImageGrid {
public:
    using ImageGrid::ImageGrid;
};

/// Round half away from zero and clamp to 0..255.
std::uint8_t quantize_intensity(double v) noexcept;
std::vector<std::uint8_t> quantize(const ImageGrid& image);

}  // namespace slads
