#pragma once

#include <cstdint>
#include <vector>

#include "slads/image.hpp"
#include "slads/measurement.hpp"

namespace slads {

/// Inverse-distance-weighted mean interpolation settings.
struct IdwParams {
    int neighbors = 10;   ///< L nearest measured pixels contributing to each estimate
    double power = 2.0;   ///< weight = 1 / distance^power
    int window = 15;      ///< half-width of local update windows (pixels)

    /// Throws ContractError unless neighbors >= 1, power > 0, window >= 1.
    void validate() const;
    friend bool operator==(const IdwParams&, const IdwParams&) = default;
};

struct Neighbor {
    PixelLocation location;
    double value = 0.0;
    double distance = 0.0;
};

/// Squared distance and linear index of a measured pixel. Ordered by
/// (dist2, index), which is the canonical tie rule.
struct NeighborHit {
    std::int64_t dist2;
    std::uint32_t index;

    friend bool operator<(const NeighborHit& a, const NeighborHit& b) noexcept {
        return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
    }
};

/// Fills `out` (capacity >= count) with the min(count, k) nearest measured
/// pixels to (row, col) in ascending (dist2, index) order; returns how many.
int find_nearest(const MeasurementSet& set, int row, int col, int count, NeighborHit* out);

/// The min(L, k) measured locations nearest to `query`, ascending distance,
/// ties broken by lower linear index. Throws ContractError on an empty set.
std::vector<Neighbor> nearest_measured(const MeasurementSet& set, PixelLocation query, int count);

/// IDW estimate from already-located neighbours. A zero-distance hit
/// returns that measurement's value. The result is clamped to the range of
/// the contributing values so that it is always a convex combination.
double idw_from_hits(const MeasurementSet& set, const NeighborHit* hits, int n, double power);

/// IDW estimate at a single pixel.
double idw_estimate(const MeasurementSet& set, PixelLocation p, const IdwParams& params);

Reconstruction reconstruct(const MeasurementSet& set, const IdwParams& params);

/// Recomputes every unmeasured pixel in the (2*halfwidth+1)^2 window
/// around `center` and copies measured values into place.
void refresh_window(Reconstruction& recon, const MeasurementSet& set, PixelLocation center, int halfwidth,
                    const IdwParams& params);

/// Update of `prev` after `s_new` was appended to `set`: only the window of
/// half-width params.window around s_new is recomputed.
Reconstruction reconstruct_incremental(Reconstruction prev, const MeasurementSet& set, PixelLocation s_new,
                                       const IdwParams& params);

}  // namespace slads
