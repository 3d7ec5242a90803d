#include "slads/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slads/error.hpp"
#include "slads/rng.hpp"

namespace slads::synth {

namespace {

struct Ellipse {
    double cy, cx, ry, rx, cos_t, sin_t, value;

    bool contains(double y, double x) const {
        const double dy = y - cy;
        const double dx = x - cx;
        const double u = (dx * cos_t + dy * sin_t) / rx;
        const double v = (-dx * sin_t + dy * cos_t) / ry;
        return u * u + v * v <= 1.0;
    }
};

Ellipse random_ellipse(Rng& rng, Dims dims, double min_r, double max_r, double lo, double hi) {
    const double theta = rng.uniform(0.0, std::numbers::pi);
    return {rng.uniform(0.0, dims.height), rng.uniform(0.0, dims.width), rng.uniform(min_r, max_r),
            rng.uniform(min_r, max_r),     std::cos(theta),                 std::sin(theta),
            std::round(rng.uniform(lo, hi))};
}

std::vector<Ellipse> scatter_ellipses(Rng& rng, Dims dims, int count, double lo, double hi) {
    const double scale = std::min(dims.width, dims.height);
    std::vector<Ellipse> shapes;
    for (int i = 0; i < count; ++i)
        shapes.push_back(random_ellipse(rng, dims, std::max(1.5, scale / 20.0), std::max(2.0, scale / 6.0), lo, hi));
    return shapes;
}

double paint(const std::vector<Ellipse>& shapes, double y, double x, double background) {
    double v = background;
    for (const auto& e : shapes)
        if (e.contains(y, x)) v = e.value;
    return v;
}

GroundTruthImage finish(Dims dims, std::vector<double> values) {
    for (auto& v : values) v = std::clamp(std::round(v), 0.0, 255.0);
    return GroundTruthImage(dims, std::move(values));
}

}  // namespace

GroundTruthImage blobs(Dims dims, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x424c4f42u));
    const double background = std::round(rng.uniform(20.0, 80.0));
    const int count = 6 + static_cast<int>(rng.index(9)) + static_cast<int>(dims.size() / 2048);
    const auto shapes = scatter_ellipses(rng, dims, count, 100.0, 240.0);
    std::vector<double> values(dims.size());
    for (int r = 0; r < dims.height; ++r)
        for (int c = 0; c < dims.width; ++c)
            values[PixelLocation{r, c}.linear(dims)] = paint(shapes, r + 0.5, c + 0.5, background);
    return finish(dims, std::move(values));
}

GroundTruthImage grains(Dims dims, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x47524e53u));
    const int count = std::max(4, static_cast<int>(dims.size() / 120));
    struct Site {
        double y, x, value;
    };
    std::vector<Site> sites;
    for (int i = 0; i < count; ++i)
        sites.push_back({rng.uniform(0.0, dims.height), rng.uniform(0.0, dims.width), std::round(rng.uniform(30.0, 220.0))});
    std::vector<double> values(dims.size());
    for (int r = 0; r < dims.height; ++r) {
        for (int c = 0; c < dims.width; ++c) {
            double best = std::numeric_limits<double>::infinity();
            double v = 0.0;
            for (const auto& s : sites) {
                const double d = (s.y - r - 0.5) * (s.y - r - 0.5) + (s.x - c - 0.5) * (s.x - c - 0.5);
                if (d < best) {
                    best = d;
                    v = s.value;
                }
            }
            values[PixelLocation{r, c}.linear(dims)] = v;
        }
    }
    return finish(dims, std::move(values));
}

GroundTruthImage waves(Dims dims, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x57415645u));
    struct Grating {
        double ky, kx, phase, amp;
    };
    std::vector<Grating> gratings;
    const int count = 2 + static_cast<int>(rng.index(2));
    for (int i = 0; i < count; ++i) {
        const double theta = rng.uniform(0.0, std::numbers::pi);
        const double period = rng.uniform(6.0, 24.0);
        const double k = 2.0 * std::numbers::pi / period;
        gratings.push_back({k * std::sin(theta), k * std::cos(theta), rng.uniform(0.0, 2.0 * std::numbers::pi),
                            rng.uniform(0.5, 1.0)});
    }
    double total = 0.0;
    for (const auto& g : gratings) total += g.amp;
    std::vector<double> values(dims.size());
    for (int r = 0; r < dims.height; ++r) {
        for (int c = 0; c < dims.width; ++c) {
            double s = 0.0;
            for (const auto& g : gratings) s += g.amp * std::sin(g.ky * r + g.kx * c + g.phase);
            values[PixelLocation{r, c}.linear(dims)] = 127.5 + 110.0 * s / total;
        }
    }
    return finish(dims, std::move(values));
}

GroundTruthImage generic(Dims dims, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x47454e45u));
    const auto grain = grains(dims, derive_seed(seed, 1));
    const auto wave = waves(dims, derive_seed(seed, 2));
    const auto shapes = scatter_ellipses(rng, dims, 5 + static_cast<int>(dims.size() / 4096), 0.0, 255.0);
    const double split_c = dims.width * rng.uniform(0.45, 0.6);
    const double split_r = dims.height * rng.uniform(0.5, 0.7);
    std::vector<double> values(dims.size());
    for (int r = 0; r < dims.height; ++r) {
        for (int c = 0; c < dims.width; ++c) {
            const std::size_t i = PixelLocation{r, c}.linear(dims);
            double v;
            if (r < split_r)
                v = 60.0 + 150.0 * (r + 0.5) / dims.height;  // sky-like ramp
            else if (c < split_c)
                v = wave[i];
            else
                v = grain[i];
            bool covered = false;
            for (const auto& e : shapes) {
                if (e.contains(r + 0.5, c + 0.5)) {
                    v = e.value;
                    covered = true;
                }
            }
            if (!covered && r < split_r && c > split_c) v = 0.6 * v + 0.4 * grain[i];
            values[i] = v;
        }
    }
    return finish(dims, std::move(values));
}

std::vector<std::string> family_names() { return {"blobs", "grains", "waves", "generic"}; }

GroundTruthImage generate(const std::string& family, Dims dims, std::uint64_t seed) {
    if (dims.width <= 0 || dims.height <= 0) throw DimensionError("image dimensions must be positive");
    if (family == "blobs") return blobs(dims, seed);
    if (family == "grains") return grains(dims, seed);
    if (family == "waves") return waves(dims, seed);
    if (family == "generic") return generic(dims, seed);
    throw ContractError("unknown image family '" + family + "' (valid: blobs, grains, waves, generic)");
}

}  // namespace slads::synth
