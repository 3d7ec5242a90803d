#include "slads/recon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slads {

void IdwParams::validate() const {
    if (neighbors < 1) throw ContractError("IDW neighbor count must be >= 1");
    if (!(power > 0.0) || !std::isfinite(power)) throw ContractError("IDW power must be > 0");
    if (window < 1) throw ContractError("window half-width must be >= 1");
}

namespace {

// Sorted insertion into a bounded list of the best `count` hits so far.
inline void offer(NeighborHit hit, NeighborHit* out, int& n, int count) {
    if (n == count) {
        if (!(hit < out[n - 1])) return;
        --n;
    }
    int pos = n;
    while (pos > 0 && hit < out[pos - 1]) {
        out[pos] = out[pos - 1];
        --pos;
    }
    out[pos] = hit;
    ++n;
}

inline std::int64_t axis_gap(int q, int lo, int hi) noexcept {
    if (q < lo) return lo - q;
    if (q > hi) return q - hi;
    return 0;
}

}  // namespace

int find_nearest(const MeasurementSet& set, int row, int col, int count, NeighborHit* out) {
    constexpr int B = BucketIndex::kCellSize;
    const BucketIndex& buckets = set.buckets();
    const int qcx = col / B;
    const int qcy = row / B;
    const int max_ring = std::max(buckets.cells_x(), buckets.cells_y());
    int n = 0;

    auto scan_cell = [&](int cy, int cx) {
        if (cy < 0 || cx < 0 || cy >= buckets.cells_y() || cx >= buckets.cells_x()) return;
        if (n == count) {
            const std::int64_t gx = axis_gap(col, cx * B, cx * B + B - 1);
            const std::int64_t gy = axis_gap(row, cy * B, cy * B + B - 1);
            if (gx * gx + gy * gy > out[n - 1].dist2) return;
        }
        for (const BucketIndex::Entry& e : buckets.cell(cy, cx)) {
            const std::int64_t dr = e.row - row;
            const std::int64_t dc = e.col - col;
            offer({dr * dr + dc * dc, e.index}, out, n, count);
        }
    };

    for (int r = 0; r <= max_ring; ++r) {
        if (r == 0) {
            scan_cell(qcy, qcx);
        } else {
            for (int cx = qcx - r; cx <= qcx + r; ++cx) {
                scan_cell(qcy - r, cx);
                scan_cell(qcy + r, cx);
            }
            for (int cy = qcy - r + 1; cy <= qcy + r - 1; ++cy) {
                scan_cell(cy, qcx - r);
                scan_cell(cy, qcx + r);
            }
        }
        // Every pixel in ring r+1 is at least r*B+1 away along one axis.
        if (n == count) {
            const std::int64_t bound = static_cast<std::int64_t>(r) * B + 1;
            if (bound * bound > out[n - 1].dist2) break;
        }
    }
    return n;
}

std::vector<Neighbor> nearest_measured(const MeasurementSet& set, PixelLocation query, int count) {
    if (set.empty()) throw ContractError("nearest_measured on an empty measurement set");
    if (count < 1) throw ContractError("neighbor count must be >= 1");
    if (!set.dims().contains(query.row, query.col)) throw ContractError("query location outside the grid");
    std::vector<NeighborHit> hits(static_cast<std::size_t>(count));
    const int n = find_nearest(set, query.row, query.col, count, hits.data());
    std::vector<Neighbor> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.push_back({PixelLocation::from_linear(hits[i].index, set.dims()), set.value_at(hits[i].index),
                       std::sqrt(static_cast<double>(hits[i].dist2))});
    }
    return out;
}

double idw_from_hits(const MeasurementSet& set, const NeighborHit* hits, int n, double power) {
    if (hits[0].dist2 == 0) return set.value_at(hits[0].index);
    double num = 0.0;
    double den = 0.0;
    double lo = set.value_at(hits[0].index);
    double hi = lo;
    const bool inverse_square = power == 2.0;
    for (int j = 0; j < n; ++j) {
        const double v = set.value_at(hits[j].index);
        const double d2 = static_cast<double>(hits[j].dist2);
        const double w = inverse_square ? 1.0 / d2 : std::pow(d2, -0.5 * power);
        num += w * v;
        den += w;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return std::clamp(num / den, lo, hi);
}

namespace {

constexpr int kMaxStackNeighbors = 64;

struct HitBuffer {
    explicit HitBuffer(int count) {
        if (count > kMaxStackNeighbors) heap.resize(static_cast<std::size_t>(count));
    }
    NeighborHit* data() { return heap.empty() ? stack : heap.data(); }

    NeighborHit stack[kMaxStackNeighbors];
    std::vector<NeighborHit> heap;
};

}  // namespace

double idw_estimate(const MeasurementSet& set, PixelLocation p, const IdwParams& params) {
    if (set.empty()) throw ContractError("cannot interpolate from an empty measurement set");
    const std::size_t i = p.linear(set.dims());
    if (set.is_measured(i)) return set.value_at(i);
    HitBuffer buf(params.neighbors);
    const int n = find_nearest(set, p.row, p.col, params.neighbors, buf.data());
    return idw_from_hits(set, buf.data(), n, params.power);
}

Reconstruction reconstruct(const MeasurementSet& set, const IdwParams& params) {
    params.validate();
    if (set.empty()) throw ContractError("cannot reconstruct from an empty measurement set");
    Reconstruction recon(set.dims(), 0.0);
    refresh_window(recon, set, {0, 0}, std::max(set.dims().width, set.dims().height), params);
    return recon;
}

void refresh_window(Reconstruction& recon, const MeasurementSet& set, PixelLocation center, int halfwidth,
                    const IdwParams& params) {
    const Dims& dims = set.dims();
    const int r0 = std::max(0, center.row - halfwidth);
    const int r1 = std::min(dims.height - 1, center.row + halfwidth);
    const int c0 = std::max(0, center.col - halfwidth);
    const int c1 = std::min(dims.width - 1, center.col + halfwidth);
    HitBuffer buf(params.neighbors);
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(dims.width) +
                                  static_cast<std::size_t>(c);
            if (set.is_measured(i)) {
                recon[i] = set.value_at(i);
                continue;
            }
            const int n = find_nearest(set, r, c, params.neighbors, buf.data());
            recon[i] = idw_from_hits(set, buf.data(), n, params.power);
        }
    }
}

Reconstruction reconstruct_incremental(Reconstruction prev, const MeasurementSet& set, PixelLocation s_new,
                                       const IdwParams& params) {
    params.validate();
    if (set.empty() || !(set.entries().back().location == s_new))
        throw ContractError("reconstruct_incremental: new location must be the latest measurement");
    if (prev.dims() != set.dims()) throw DimensionError("previous reconstruction has different dimensions");
    refresh_window(prev, set, s_new, params.window, params);
    return prev;
}

}  // namespace slads
