#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slads/features.hpp"
#include "slads/image.hpp"
#include "slads/measurement.hpp"
#include "slads/model.hpp"
#include "slads/recon.hpp"

namespace slads {

struct TrainingRow {
    FeatureVector features;   ///< raw, unstandardized
    double rd = 0.0;
    std::uint32_t block = 0;  ///< index into TrainingDatabase::provenance
};

struct Provenance {
    std::string image_id;
    double density = 0.0;
    std::uint64_t seed = 0;
};

struct TrainingDatabase {
    std::vector<TrainingRow> rows;
    std::vector<Provenance> provenance;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }

    std::vector<FeatureArray> feature_rows() const;
    Eigen::MatrixXd feature_matrix() const;
    Eigen::VectorXd targets() const;

    /// "image_id,density,f1,f2,f3,f4,f5,f6,rd", reals printed with 17 significant digits.
    std::string to_csv() const;
};

FeatureStats fit_stats(const TrainingDatabase& db);

struct TrainingSchedule {
    std::vector<double> densities{0.01, 0.05, 0.10, 0.20, 0.30, 0.40};
    std::size_t samples_per_level = 500;  ///< candidates per image per density
    int rd_window = 15;
    std::uint64_t seed = 0;

    /// Densities strictly increasing inside (0, 1); samples_per_level >= 1; rd_window >= 1.
    void validate() const;
};

/// Reduction in distortion from measuring s: full-image distortion of the
/// current reconstruction minus that after adding X_s and reconstructing again.
double rd_exact(const GroundTruthImage& truth, const MeasurementSet& set, PixelLocation s, const IdwParams& params);

/// The same quantity restricted to the (2w+1)^2 window around s, with the
/// reconstruction update confined to that window.
double rd_windowed(const GroundTruthImage& truth, const MeasurementSet& set, PixelLocation s,
                   const IdwParams& params, int halfwidth);
/// Variant reusing a reconstruction of `set` computed by the caller.
double rd_windowed(const GroundTruthImage& truth, const MeasurementSet& set, const Reconstruction& recon,
                   PixelLocation s, const IdwParams& params, int halfwidth);

/// For every image and density: seeded random mask, reconstruction, then
/// samples_per_level random unmeasured candidates with (features, windowed RD).
/// Rows are ordered by image, density, candidate. `ids` may be empty.
TrainingDatabase generate_training_db(std::span<const GroundTruthImage> images, const TrainingSchedule& schedule,
                                      const IdwParams& idw, std::span<const std::string> ids = {});

/// Number of pixels corresponding to a density: ceil(density * n), at least 1.
std::size_t pixels_for_density(double density, std::size_t n);

/// Seeded uniform random mask with pixels_for_density(density, N) entries.
MeasurementSet random_measurements(const GroundTruthImage& image, double density, std::uint64_t seed);

struct RegressorOptions {
    MlpConfig mlp;
    SvrConfig svr;
};

struct TrainedModel {
    ErdModel model;
    std::size_t rows = 0;
    double final_loss = 0.0;  ///< lsq: residual norm, svr: dual objective, nn: final training loss
    std::string loss_name;
};

/// Standardizes the database features, fits the chosen regressor on them and
/// packages the result with the statistics and interpolation settings.
TrainedModel fit_erd_model(const TrainingDatabase& db, RegressorKind kind, const RegressorOptions& options,
                           const IdwParams& idw);

}  // namespace slads
