#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "slads/image.hpp"
#include "slads/measurement.hpp"
#include "slads/recon.hpp"

namespace slads {

inline constexpr int kFeatureCount = 6;
inline constexpr double kStddevFloor = 1e-8;

using FeatureArray = std::array<double, kFeatureCount>;

/// Local descriptor of an unmeasured pixel, in fixed order:
///   0  horizontal central gradient of the reconstruction (one-sided at borders)
///   1  vertical central gradient
///   2  standard deviation of the L nearest measured values
///   3  mean |recon(s) - v_j| over those neighbours
///   4  distance to the nearest measured pixel
///   5  fraction of measured pixels within Chebyshev radius `window` (window clipped to the image)
struct FeatureVector {
    FeatureArray values{};
    PixelLocation location;
};

struct FeatureStats {
    FeatureArray means{};
    FeatureArray stddevs{};

    friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

/// Per-pixel count of measured pixels inside the Chebyshev window of
/// half-width `halfwidth` centred on that pixel.
class WindowCounts {
public:
    WindowCounts(const MeasurementSet& set, int halfwidth);

    void add(PixelLocation p);
    int count(std::size_t linear_index) const noexcept { return counts_[linear_index]; }
    int area(PixelLocation p) const noexcept;
    int halfwidth() const noexcept { return halfwidth_; }

private:
    Dims dims_;
    int halfwidth_;
    std::vector<int> counts_;
};

int count_measured_in_window(const MeasurementSet& set, PixelLocation s, int halfwidth);
int window_area(const Dims& dims, PixelLocation s, int halfwidth) noexcept;

/// Throws ContractError if `s` is measured or the set is empty.
FeatureVector extract_features(const Reconstruction& recon, const MeasurementSet& set, PixelLocation s,
                               const IdwParams& params);

/// Same descriptor with the window count supplied by the caller. Also
/// reports the squared distance to the L-th nearest measurement (or
/// INT64_MAX when fewer than L exist): a new measurement can only change
/// this pixel's neighbour-based features if it lands within that distance.
FeatureVector extract_features_fast(const Reconstruction& recon, const MeasurementSet& set, PixelLocation s,
                                    const IdwParams& params, int measured_in_window, std::int64_t* reach_dist2);

/// Population mean and standard deviation per feature (stddev floored at kStddevFloor).
FeatureStats fit_stats(std::span<const FeatureArray> rows);

FeatureArray standardize(const FeatureArray& v, const FeatureStats& stats);
FeatureVector standardize(const FeatureVector& v, const FeatureStats& stats);
/// Throws DimensionError when v.size() != kFeatureCount.
std::vector<double> standardize(std::span<const double> v, const FeatureStats& stats);

}  // namespace slads
