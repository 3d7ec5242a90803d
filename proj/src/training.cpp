#include "slads/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "slads/error.hpp"
#include "slads/metrics.hpp"
#include "slads/rng.hpp"

namespace slads {

std::vector<FeatureArray> TrainingDatabase::feature_rows() const {
    std::vector<FeatureArray> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.features.values);
    return out;
}

Eigen::MatrixXd TrainingDatabase::feature_matrix() const {
    Eigen::MatrixXd V(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < kFeatureCount; ++j) V(static_cast<Eigen::Index>(i), j) = rows[i].features.values[j];
    return V;
}

Eigen::VectorXd TrainingDatabase::targets() const {
    Eigen::VectorXd R(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) R[static_cast<Eigen::Index>(i)] = rows[i].rd;
    return R;
}

namespace {

void append_real(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string TrainingDatabase::to_csv() const {
    std::string out = "image_id,density,f1,f2,f3,f4,f5,f6,rd\n";
    for (const auto& r : rows) {
        const Provenance& p = provenance.at(r.block);
        out += p.image_id;
        out += ',';
        append_real(out, p.density);
        for (double f : r.features.values) {
            out += ',';
            append_real(out, f);
        }
        out += ',';
        append_real(out, r.rd);
        out += '\n';
    }
    return out;
}

FeatureStats fit_stats(const TrainingDatabase& db) {
    const auto rows = db.feature_rows();
    return fit_stats(std::span<const FeatureArray>(rows));
}

void TrainingSchedule::validate() const {
    if (densities.empty()) throw ContractError("training schedule needs at least one density");
    for (std::size_t i = 0; i < densities.size(); ++i) {
        if (!(densities[i] > 0.0 && densities[i] < 1.0))
            throw ContractError("training densities must lie strictly between 0 and 1");
        if (i > 0 && !(densities[i] > densities[i - 1]))
            throw ContractError("training densities must be strictly increasing");
    }
    if (samples_per_level < 1) throw ContractError("samples per level must be >= 1");
    if (rd_window < 1) throw ContractError("RD window half-width must be >= 1");
}

namespace {

void require_candidate(const GroundTruthImage& truth, const MeasurementSet& set, PixelLocation s) {
    if (truth.dims() != set.dims()) throw DimensionError("image and measurement set dimensions differ");
    if (set.empty()) throw ContractError("reduction in distortion needs at least one measurement");
    if (!set.dims().contains(s.row, s.col)) throw ContractError("candidate location outside the grid");
    if (set.is_measured(s))
        throw ContractError("candidate (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                            ") is already measured");
}

}  // namespace

double rd_exact(const GroundTruthImage& truth, const MeasurementSet& set, PixelLocation s, const IdwParams& params) {
    require_candidate(truth, set, s);
    const Reconstruction before = reconstruct(set, params);
    MeasurementSet extended = set;
    extended.add_measurement(s, truth.at(s));
    const Reconstruction after = reconstruct(extended, params);
    return distortion(truth, before) - distortion(truth, after);
}

double rd_windowed(const GroundTruthImage& truth, const MeasurementSet& set, PixelLocation s,
                   const IdwParams& params, int halfwidth) {
    require_candidate(truth, set, s);
    return rd_windowed(truth, set, reconstruct(set, params), s, params, halfwidth);
}

double rd_windowed(const GroundTruthImage& truth, const MeasurementSet& set, const Reconstruction& recon,
                   PixelLocation s, const IdwParams& params, int halfwidth) {
    require_candidate(truth, set, s);
    if (halfwidth < 1) throw ContractError("RD window half-width must be >= 1");
    if (recon.dims() != set.dims()) throw DimensionError("reconstruction and measurement set dimensions differ");
    const Dims& dims = set.dims();
    const int r0 = std::max(0, s.row - halfwidth);
    const int r1 = std::min(dims.height - 1, s.row + halfwidth);
    const int c0 = std::max(0, s.col - halfwidth);
    const int c1 = std::min(dims.width - 1, s.col + halfwidth);

    double before = 0.0;
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) before += std::abs(truth.at(r, c) - recon.at(r, c));

    MeasurementSet extended = set;
    extended.add_measurement(s, truth.at(s));
    std::vector<NeighborHit> hits(static_cast<std::size_t>(params.neighbors));
    double after = 0.0;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const std::size_t i = PixelLocation{r, c}.linear(dims);
            double v;
            if (extended.is_measured(i)) {
                v = extended.value_at(i);
            } else {
                const int n = find_nearest(extended, r, c, params.neighbors, hits.data());
                v = idw_from_hits(extended, hits.data(), n, params.power);
            }
            after += std::abs(truth[i] - v);
        }
    }
    return before - after;
}

std::size_t pixels_for_density(double density, std::size_t n) {
    const double exact = density * static_cast<double>(n);
    // Guard against products like 0.7 * 100 = 70.00000000000001.
    auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
    return std::clamp<std::size_t>(k, 1, n);
}

MeasurementSet random_measurements(const GroundTruthImage& image, double density, std::uint64_t seed) {
    Rng rng(seed);
    MeasurementSet set(image.dims());
    for (std::size_t i : sample_without_replacement(image.size(), pixels_for_density(density, image.size()), rng)) {
        const auto p = PixelLocation::from_linear(i, image.dims());
        set.add_measurement(p, image[i]);
    }
    return set;
}

TrainingDatabase generate_training_db(std::span<const GroundTruthImage> images, const TrainingSchedule& schedule,
                                      const IdwParams& idw, std::span<const std::string> ids) {
    schedule.validate();
    idw.validate();
    if (images.empty()) throw ContractError("training needs at least one image");
    if (!ids.empty() && ids.size() != images.size()) throw ContractError("one id per training image required");

    TrainingDatabase db;
    for (std::size_t img = 0; img < images.size(); ++img) {
        const GroundTruthImage& image = images[img];
        const std::size_t n = image.size();
        if (n < 2) throw ContractError("training image " + std::to_string(img) + " is degenerate (single pixel)");
        const std::string id = ids.empty() ? "img" + std::to_string(img) : ids[img];
        for (std::size_t level = 0; level < schedule.densities.size(); ++level) {
            const double density = schedule.densities[level];
            if (density * static_cast<double>(n) < 1.0)
                throw ContractError("density " + std::to_string(density) + " selects no pixels of training image " + id);
            const std::uint64_t seed = derive_seed(schedule.seed, img, level);
            const auto block = static_cast<std::uint32_t>(db.provenance.size());
            db.provenance.push_back({id, density, seed});

            Rng rng(seed);
            MeasurementSet set(image.dims());
            for (std::size_t i : sample_without_replacement(n, pixels_for_density(density, n), rng))
                set.add_measurement(PixelLocation::from_linear(i, image.dims()), image[i]);
            if (set.complete()) continue;

            std::vector<std::size_t> unmeasured;
            unmeasured.reserve(n - set.size());
            for (std::size_t i = 0; i < n; ++i)
                if (!set.is_measured(i)) unmeasured.push_back(i);

            const Reconstruction recon = reconstruct(set, idw);
            const WindowCounts counts(set, idw.window);
            const auto picks = sample_without_replacement(unmeasured.size(), schedule.samples_per_level, rng);
            for (std::size_t pick : picks) {
                const std::size_t i = unmeasured[pick];
                const auto s = PixelLocation::from_linear(i, image.dims());
                TrainingRow row;
                row.features = extract_features_fast(recon, set, s, idw, counts.count(i), nullptr);
                row.rd = rd_windowed(image, set, recon, s, idw, schedule.rd_window);
                row.block = block;
                db.rows.push_back(row);
            }
        }
    }
    if (db.rows.empty()) throw ContractError("training schedule produced no candidate rows");
    return db;
}

TrainedModel fit_erd_model(const TrainingDatabase& db, RegressorKind kind, const RegressorOptions& options,
                           const IdwParams& idw) {
    if (db.empty()) throw ContractError("training database is empty");
    idw.validate();
    TrainedModel out;
    out.rows = db.size();
    out.model.kind = kind;
    out.model.idw = idw;
    out.model.stats = fit_stats(db);

    Eigen::MatrixXd V = db.feature_matrix();
    for (Eigen::Index i = 0; i < V.rows(); ++i)
        for (int j = 0; j < kFeatureCount; ++j)
            V(i, j) = (V(i, j) - out.model.stats.means[j]) / out.model.stats.stddevs[j];
    const Eigen::VectorXd R = db.targets();

    switch (kind) {
        case RegressorKind::lsq: {
            LinearFit fit = fit_linear(V, R);
            out.final_loss = fit.residual_norm;
            out.loss_name = "residual_norm";
            out.model.payload = std::move(fit.model);
            break;
        }
        case RegressorKind::svr: {
            SvrFit fit = fit_svr(V, R, options.svr);
            out.final_loss = fit.dual_objective;
            out.loss_name = "dual_objective";
            out.model.payload = std::move(fit.model);
            break;
        }
        case RegressorKind::nn: {
            // Adam works on RD / rms(RD); the scale is folded back into the
            // output layer so the network still predicts raw RD.
            const double rms = std::sqrt(R.squaredNorm() / static_cast<double>(R.size()));
            const double scale = rms > 0.0 ? rms : 1.0;
            MlpFit fit = fit_mlp(V, R / scale, options.mlp);
            fit.model.weights.back() *= scale;
            fit.model.biases.back() *= scale;
            fit.final_loss *= scale * scale;
            out.final_loss = fit.final_loss;
            out.loss_name = "final_loss";
            out.model.payload = std::move(fit.model);
            break;
        }
    }
    out.model.validate();
    return out;
}

}  // namespace slads
