#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slads/features.hpp"
#include "slads/image.hpp"
#include "slads/measurement.hpp"
#include "slads/model.hpp"
#include "slads/recon.hpp"

namespace slads {

/// The instrument: answers the value at a pixel.
class MeasurementSource {
public:
    virtual ~MeasurementSource() = default;
    virtual Dims dims() const = 0;
    virtual double value(PixelLocation s) = 0;
};

/// Reads X_s from a ground-truth image, optionally adding Gaussian noise
/// that is fixed per location for a given seed.
class SimulatedSource final : public MeasurementSource {
public:
    explicit SimulatedSource(GroundTruthImage truth, double noise_sigma = 0.0, std::uint64_t seed = 0);

    Dims dims() const override { return truth_.dims(); }
    double value(PixelLocation s) override;

private:
    GroundTruthImage truth_;
    double noise_sigma_;
    std::uint64_t seed_;
};

enum class ScoringMode {
    full,    ///< rescore every unmeasured pixel after each measurement
    cached,  ///< rescore only pixels whose descriptor can have changed
};

struct RunConfig {
    double initial_density = 0.01;
    double budget_density = 0.40;
    std::vector<double> checkpoint_densities{0.10, 0.20, 0.30, 0.40};
    std::uint64_t seed = 0;
    std::optional<IdwParams> idw;  ///< defaults to the model's settings (or IdwParams{} without a model)
    ScoringMode scoring = ScoringMode::cached;
    int threads = 1;

    /// Requires 0 < initial <= budget <= 1 and checkpoints inside (0, 1].
    void validate() const;
};

struct HistoryEntry {
    std::size_t step = 0;          ///< 1-based measurement count after this entry
    PixelLocation location;
    double value = 0.0;
    double predicted_erd = std::numeric_limits<double>::quiet_NaN();  ///< NaN for seed and random picks
};

struct Checkpoint {
    double density = 0.0;
    std::size_t measured = 0;
    Reconstruction recon;
    std::vector<std::uint8_t> mask;   ///< 255 measured, 0 unmeasured
    std::optional<double> psnr;
    std::optional<double> distortion;
};

struct SamplingRun {
    std::string method;
    std::vector<HistoryEntry> history;
    std::vector<Checkpoint> checkpoints;
    RunConfig config;
    Dims dims;
    double wall_time_s = 0.0;

    /// "step,row,col,value,predicted_erd", reals with 17 significant digits.
    std::string history_csv() const;
};

struct Selection {
    PixelLocation location;
    double predicted_erd = 0.0;
};

/// Incrementally maintained ERD scores for all unmeasured pixels.
class CandidateScorer {
public:
    CandidateScorer(const ErdModel& model, const IdwParams& idw, ScoringMode mode, int threads = 1);

    void reset(const Reconstruction& recon, const MeasurementSet& set);
    /// Call after `s_new` was added to `set` and `recon` was updated.
    void update(const Reconstruction& recon, const MeasurementSet& set, PixelLocation s_new);
    /// Highest score, ties to the lowest linear index. Requires an unmeasured pixel.
    Selection best(const MeasurementSet& set) const;

    std::span<const double> scores() const noexcept { return scores_; }
    std::size_t last_rescored() const noexcept { return last_rescored_; }

private:
    void rescore(const Reconstruction& recon, const MeasurementSet& set, std::span<const std::size_t> indices);
    void tighten_reach(const MeasurementSet& set);

    const ErdModel& model_;
    IdwParams idw_;
    ScoringMode mode_;
    int threads_;
    std::optional<WindowCounts> counts_;
    std::vector<double> scores_;
    std::vector<std::int64_t> reach_;
    std::int64_t reach_bound_ = 0;
    std::size_t updates_since_tighten_ = 0;
    std::size_t last_rescored_ = 0;
    std::vector<std::size_t> dirty_;
};

/// argmax of predicted ERD over the unmeasured pixels (full rescoring).
Selection select_next(const ErdModel& model, const Reconstruction& recon, const MeasurementSet& set,
                      int threads = 1);

/// Seeds ceil(initial * N) random measurements, then greedily measures the
/// argmax-ERD pixel until ceil(budget * N) pixels are measured.
SamplingRun run_sampling(MeasurementSource& source, const ErdModel& model, const RunConfig& config,
                         const GroundTruthImage* ground_truth = nullptr);

/// Same seeding, then uniform random picks without replacement.
SamplingRun run_random_baseline(MeasurementSource& source, const RunConfig& config,
                                const GroundTruthImage* ground_truth = nullptr);

}  // namespace slads
