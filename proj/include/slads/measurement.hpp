#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "slads/image.hpp"

namespace slads {

struct Measurement {
    PixelLocation location;
    double value = 0.0;
};

/// Uniform grid of square cells, each listing the linear indices of the
/// measured pixels it contains. Used for nearest-neighbour queries.
class BucketIndex {
public:
    static constexpr int kCellSize = 8;

    struct Entry {
        std::uint32_t index;
        std::int32_t row;
        std::int32_t col;
    };

    BucketIndex() = default;
    explicit BucketIndex(Dims dims);

    void insert(PixelLocation p, std::uint32_t linear_index);

    int cells_x() const noexcept { return cells_x_; }
    int cells_y() const noexcept { return cells_y_; }
    std::span<const Entry> cell(int cy, int cx) const noexcept {
        return cells_[static_cast<std::size_t>(cy) * static_cast<std::size_t>(cells_x_) +
                      static_cast<std::size_t>(cx)];
    }

private:
    int cells_x_ = 0;
    int cells_y_ = 0;
    std::vector<std::vector<Entry>> cells_;
};

/// Append-only record of probed pixels and their values.
class MeasurementSet {
public:
    MeasurementSet() = default;
    explicit MeasurementSet(Dims dims);

    /// Throws ContractError on an out-of-bounds or already measured location.
    void add_measurement(PixelLocation s, double value);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool complete() const noexcept { return entries_.size() == dims_.size(); }
    double density() const noexcept {
        return static_cast<double>(entries_.size()) / static_cast<double>(dims_.size());
    }

    bool is_measured(std::size_t linear_index) const noexcept { return mask_[linear_index] != 0; }
    bool is_measured(PixelLocation p) const noexcept { return is_measured(p.linear(dims_)); }
    /// Measured value at a pixel; meaningful only where is_measured() holds.
    double value_at(std::size_t linear_index) const noexcept { return values_[linear_index]; }

    std::span<const Measurement> entries() const noexcept { return entries_; }
    std::span<const std::uint8_t> mask() const noexcept { return mask_; }
    const BucketIndex& buckets() const noexcept { return buckets_; }

private:
    Dims dims_;
    std::vector<Measurement> entries_;
    std::vector<std::uint8_t> mask_;
    std::vector<double> values_;
    BucketIndex buckets_;
};

/// Mask image with measured pixels at 255 and the rest at 0.
std::vector<std::uint8_t> mask_pixels(const MeasurementSet& set);

}  // namespace slads
