#include "slads/measurement.hpp"

#include <string>

namespace slads {

BucketIndex::BucketIndex(Dims dims)
    : cells_x_((dims.width + kCellSize - 1) / kCellSize),
      cells_y_((dims.height + kCellSize - 1) / kCellSize),
      cells_(static_cast<std::size_t>(cells_x_) * static_cast<std::size_t>(cells_y_)) {}

void BucketIndex::insert(PixelLocation p, std::uint32_t linear_index) {
    cells_[static_cast<std::size_t>(p.row / kCellSize) * static_cast<std::size_t>(cells_x_) +
           static_cast<std::size_t>(p.col / kCellSize)]
        .push_back({linear_index, p.row, p.col});
}

MeasurementSet::MeasurementSet(Dims dims)
    : dims_(dims), mask_(dims.size(), 0), values_(dims.size(), 0.0), buckets_(dims) {
    if (dims.width <= 0 || dims.height <= 0) throw DimensionError("dimensions must be positive");
}

void MeasurementSet::add_measurement(PixelLocation s, double value) {
    if (!dims_.contains(s.row, s.col))
        throw ContractError("location (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                            ") is outside the " + std::to_string(dims_.width) + "x" +
                            std::to_string(dims_.height) + " grid");
    const std::size_t i = s.linear(dims_);
    if (mask_[i])
        throw ContractError("location (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                            ") is already measured");
    entries_.push_back({s, value});
    mask_[i] = 1;
    values_[i] = value;
    buckets_.insert(s, static_cast<std::uint32_t>(i));
}

std::vector<std::uint8_t> mask_pixels(const MeasurementSet& set) {
    std::vector<std::uint8_t> out(set.mask().begin(), set.mask().end());
    for (auto& v : out) v = v ? 255 : 0;
    return out;
}

}  // namespace slads
