#include "slads/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace slads {

WindowCounts::WindowCounts(const MeasurementSet& set, int halfwidth)
    : dims_(set.dims()), halfwidth_(halfwidth), counts_(set.dims().size(), 0) {
    for (const Measurement& m : set.entries()) add(m.location);
}

void WindowCounts::add(PixelLocation p) {
    const int r0 = std::max(0, p.row - halfwidth_);
    const int r1 = std::min(dims_.height - 1, p.row + halfwidth_);
    const int c0 = std::max(0, p.col - halfwidth_);
    const int c1 = std::min(dims_.width - 1, p.col + halfwidth_);
    for (int r = r0; r <= r1; ++r) {
        int* row = counts_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(dims_.width);
        for (int c = c0; c <= c1; ++c) ++row[c];
    }
}

int WindowCounts::area(PixelLocation p) const noexcept { return window_area(dims_, p, halfwidth_); }

int window_area(const Dims& dims, PixelLocation s, int halfwidth) noexcept {
    const int rows = std::min(dims.height - 1, s.row + halfwidth) - std::max(0, s.row - halfwidth) + 1;
    const int cols = std::min(dims.width - 1, s.col + halfwidth) - std::max(0, s.col - halfwidth) + 1;
    return rows * cols;
}

int count_measured_in_window(const MeasurementSet& set, PixelLocation s, int halfwidth) {
    const Dims& dims = set.dims();
    int count = 0;
    for (int r = std::max(0, s.row - halfwidth); r <= std::min(dims.height - 1, s.row + halfwidth); ++r)
        for (int c = std::max(0, s.col - halfwidth); c <= std::min(dims.width - 1, s.col + halfwidth); ++c)
            count += set.is_measured(PixelLocation{r, c}) ? 1 : 0;
    return count;
}

namespace {

double central_gradient(const Reconstruction& recon, PixelLocation s, int dr, int dc) {
    const int extent = dr != 0 ? recon.height() : recon.width();
    const int pos = dr != 0 ? s.row : s.col;
    if (extent < 2) return 0.0;
    const PixelLocation prev{s.row - dr, s.col - dc};
    const PixelLocation next{s.row + dr, s.col + dc};
    if (pos == 0) return std::abs(recon.at(next) - recon.at(s));
    if (pos == extent - 1) return std::abs(recon.at(s) - recon.at(prev));
    return std::abs(recon.at(next) - recon.at(prev)) / 2.0;
}

constexpr int kMaxNeighbors = 64;

}  // namespace

FeatureVector extract_features_fast(const Reconstruction& recon, const MeasurementSet& set, PixelLocation s,
                                    const IdwParams& params, int measured_in_window, std::int64_t* reach_dist2) {
    NeighborHit stack_hits[kMaxNeighbors];
    std::vector<NeighborHit> heap_hits;
    NeighborHit* hits = stack_hits;
    if (params.neighbors > kMaxNeighbors) {
        heap_hits.resize(static_cast<std::size_t>(params.neighbors));
        hits = heap_hits.data();
    }
    const int n = find_nearest(set, s.row, s.col, params.neighbors, hits);

    FeatureVector f;
    f.location = s;
    f.values[0] = central_gradient(recon, s, 0, 1);
    f.values[1] = central_gradient(recon, s, 1, 0);

    double mean = 0.0;
    for (int j = 0; j < n; ++j) mean += set.value_at(hits[j].index);
    mean /= n;
    double var = 0.0;
    double spread = 0.0;
    const double here = recon.at(s);
    for (int j = 0; j < n; ++j) {
        const double v = set.value_at(hits[j].index);
        var += (v - mean) * (v - mean);
        spread += std::abs(here - v);
    }
    f.values[2] = std::sqrt(var / n);
    f.values[3] = spread / n;
    f.values[4] = std::sqrt(static_cast<double>(hits[0].dist2));
    f.values[5] = static_cast<double>(measured_in_window) /
                  static_cast<double>(window_area(set.dims(), s, params.window));

    if (reach_dist2)
        *reach_dist2 = n < params.neighbors ? std::numeric_limits<std::int64_t>::max() : hits[n - 1].dist2;
    return f;
}

FeatureVector extract_features(const Reconstruction& recon, const MeasurementSet& set, PixelLocation s,
                               const IdwParams& params) {
    params.validate();
    if (set.empty()) throw ContractError("feature extraction needs at least one measurement");
    if (recon.dims() != set.dims()) throw DimensionError("reconstruction and measurement set dimensions differ");
    if (!set.dims().contains(s.row, s.col)) throw ContractError("feature location outside the grid");
    if (set.is_measured(s))
        throw ContractError("location (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                            ") is already measured");
    return extract_features_fast(recon, set, s, params, count_measured_in_window(set, s, params.window), nullptr);
}

FeatureStats fit_stats(std::span<const FeatureArray> rows) {
    if (rows.empty()) throw ContractError("cannot fit feature statistics on an empty database");
    // Welford accumulation
    FeatureArray mean{};
    FeatureArray m2{};
    double count = 0.0;
    for (const FeatureArray& row : rows) {
        count += 1.0;
        for (int j = 0; j < kFeatureCount; ++j) {
            const double delta = row[j] - mean[j];
            mean[j] += delta / count;
            m2[j] += delta * (row[j] - mean[j]);
        }
    }
    FeatureStats stats;
    stats.means = mean;
    for (int j = 0; j < kFeatureCount; ++j)
        stats.stddevs[j] = std::max(kStddevFloor, std::sqrt(std::max(0.0, m2[j] / count)));
    return stats;
}

FeatureArray standardize(const FeatureArray& v, const FeatureStats& stats) {
    FeatureArray out;
    for (int j = 0; j < kFeatureCount; ++j) out[j] = (v[j] - stats.means[j]) / stats.stddevs[j];
    return out;
}

FeatureVector standardize(const FeatureVector& v, const FeatureStats& stats) {
    return {standardize(v.values, stats), v.location};
}

std::vector<double> standardize(std::span<const double> v, const FeatureStats& stats) {
    if (v.size() != static_cast<std::size_t>(kFeatureCount))
        throw DimensionError("feature vector has " + std::to_string(v.size()) + " entries, expected " +
                             std::to_string(kFeatureCount));
    std::vector<double> out(v.size());
    for (int j = 0; j < kFeatureCount; ++j) out[j] = (v[j] - stats.means[j]) / stats.stddevs[j];
    return out;
}

}  // namespace slads
