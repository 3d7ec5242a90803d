#include "slads/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "slads/error.hpp"
#include "slads/metrics.hpp"
#include "slads/parallel.hpp"
#include "slads/rng.hpp"
#include "slads/training.hpp"

namespace slads {

SimulatedSource::SimulatedSource(GroundTruthImage truth, double noise_sigma, std::uint64_t seed)
    : truth_(std::move(truth)), noise_sigma_(noise_sigma), seed_(seed) {
    if (!(noise_sigma >= 0.0)) throw ContractError("noise sigma must be >= 0");
}

double SimulatedSource::value(PixelLocation s) {
    if (!truth_.dims().contains(s.row, s.col))
        throw ContractError("query (" + std::to_string(s.row) + ", " + std::to_string(s.col) + ") outside the image");
    const double x = truth_.at(s);
    if (noise_sigma_ == 0.0) return x;
    Rng rng(derive_seed(seed_, s.linear(truth_.dims()), 0x4e4f4953u));
    return x + noise_sigma_ * rng.normal();
}

void RunConfig::validate() const {
    if (!(initial_density > 0.0 && initial_density <= budget_density && budget_density <= 1.0))
        throw ContractError("densities must satisfy 0 < initial <= budget <= 1 (got initial " +
                            std::to_string(initial_density) + ", budget " + std::to_string(budget_density) + ")");
    for (double d : checkpoint_densities)
        if (!(d > 0.0 && d <= 1.0)) throw ContractError("checkpoint densities must lie in (0, 1]");
    if (idw) idw->validate();
}

std::string SamplingRun::history_csv() const {
    std::string out = "step,row,col,value,predicted_erd\n";
    char buf[160];
    for (const auto& h : history) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g,%.17g\n", h.step, h.location.row, h.location.col, h.value,
                      h.predicted_erd);
        out += buf;
    }
    return out;
}

namespace {

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();
constexpr std::size_t kPredictBatch = 128;
constexpr std::size_t kTightenEvery = 128;

double sanitize(double score) { return std::isnan(score) ? -std::numeric_limits<double>::infinity() : score; }

}  // namespace

CandidateScorer::CandidateScorer(const ErdModel& model, const IdwParams& idw, ScoringMode mode, int threads)
    : model_(model), idw_(idw), mode_(mode), threads_(std::max(1, threads)) {
    idw_.validate();
}

void CandidateScorer::reset(const Reconstruction& recon, const MeasurementSet& set) {
    if (set.empty()) throw ContractError("candidate scoring needs at least one measurement");
    if (recon.dims() != set.dims()) throw DimensionError("reconstruction and measurement set dimensions differ");
    counts_.emplace(set, idw_.window);
    scores_.assign(set.dims().size(), -std::numeric_limits<double>::infinity());
    reach_.assign(set.dims().size(), 0);
    dirty_.clear();
    for (std::size_t i = 0; i < set.dims().size(); ++i)
        if (!set.is_measured(i)) dirty_.push_back(i);
    rescore(recon, set, dirty_);
    tighten_reach(set);
}

void CandidateScorer::tighten_reach(const MeasurementSet& set) {
    reach_bound_ = 0;
    for (std::size_t i = 0; i < reach_.size(); ++i)
        if (!set.is_measured(i)) reach_bound_ = std::max(reach_bound_, reach_[i]);
    updates_since_tighten_ = 0;
}

void CandidateScorer::update(const Reconstruction& recon, const MeasurementSet& set, PixelLocation s_new) {
    if (!counts_) throw ContractError("CandidateScorer::update before reset");
    const Dims& dims = set.dims();
    const std::size_t new_index = s_new.linear(dims);
    counts_->add(s_new);
    scores_[new_index] = -std::numeric_limits<double>::infinity();
    dirty_.clear();

    const bool everything = mode_ == ScoringMode::full || reach_bound_ == kUnbounded;
    if (everything) {
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (!set.is_measured(i)) dirty_.push_back(i);
    } else {
        // Recon values change only inside the update window, so gradients and
        // window counts change inside window + 1. Neighbour-based descriptors
        // change only where s_new is no farther than the current L-th neighbour.
        const int near = idw_.window + 1;
        const int radius = std::max(near, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(reach_bound_)))));
        const int r0 = std::max(0, s_new.row - radius), r1 = std::min(dims.height - 1, s_new.row + radius);
        const int c0 = std::max(0, s_new.col - radius), c1 = std::min(dims.width - 1, s_new.col + radius);
        for (int r = r0; r <= r1; ++r) {
            const std::int64_t dr = r - s_new.row;
            for (int c = c0; c <= c1; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(dims.width) +
                                      static_cast<std::size_t>(c);
                if (set.is_measured(i)) continue;
                const std::int64_t dc = c - s_new.col;
                const bool in_window = std::abs(dr) <= near && std::abs(dc) <= near;
                if (in_window || dr * dr + dc * dc <= reach_[i]) dirty_.push_back(i);
            }
        }
    }
    rescore(recon, set, dirty_);
    if (everything || ++updates_since_tighten_ >= kTightenEvery) tighten_reach(set);
}

void CandidateScorer::rescore(const Reconstruction& recon, const MeasurementSet& set,
                              std::span<const std::size_t> indices) {
    last_rescored_ = indices.size();
    const std::size_t chunks = (indices.size() + kPredictBatch - 1) / kPredictBatch;
    parallel_for(chunks, threads_, [&](std::size_t begin, std::size_t end) {
        std::vector<FeatureArray> batch(kPredictBatch);
        std::vector<double> out(kPredictBatch);
        for (std::size_t chunk = begin; chunk < end; ++chunk) {
            const std::size_t lo = chunk * kPredictBatch;
            const std::size_t hi = std::min(indices.size(), lo + kPredictBatch);
            for (std::size_t k = lo; k < hi; ++k) {
                const std::size_t i = indices[k];
                const auto s = PixelLocation::from_linear(i, set.dims());
                batch[k - lo] = extract_features_fast(recon, set, s, idw_, counts_->count(i), &reach_[i]).values;
            }
            const std::size_t m = hi - lo;
            predict_batch(model_, std::span<const FeatureArray>(batch.data(), m), std::span<double>(out.data(), m));
            for (std::size_t k = lo; k < hi; ++k) scores_[indices[k]] = sanitize(out[k - lo]);
        }
    });
}

Selection CandidateScorer::best(const MeasurementSet& set) const {
    std::size_t best = scores_.size();
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t first_open = scores_.size();
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        if (set.is_measured(i)) continue;
        if (first_open == scores_.size()) first_open = i;
        if (scores_[i] > best_score) {
            best_score = scores_[i];
            best = i;
        }
    }
    if (first_open == scores_.size()) throw ContractError("no unmeasured pixel left to select");
    if (best == scores_.size()) best = first_open;
    return {PixelLocation::from_linear(best, set.dims()), scores_[best]};
}

Selection select_next(const ErdModel& model, const Reconstruction& recon, const MeasurementSet& set, int threads) {
    if (set.complete()) throw ContractError("every pixel is already measured");
    CandidateScorer scorer(model, model.idw, ScoringMode::full, threads);
    scorer.reset(recon, set);
    return scorer.best(set);
}

namespace {

using Clock = std::chrono::steady_clock;

class CheckpointRecorder {
public:
    CheckpointRecorder(SamplingRun& run, const RunConfig& config, const IdwParams& idw,
                       const GroundTruthImage* truth, std::size_t n)
        : run_(run), idw_(idw), truth_(truth) {
        for (double d : config.checkpoint_densities)
            if (d <= config.budget_density + 1e-12) targets_.push_back({d, pixels_for_density(d, n)});
        std::sort(targets_.begin(), targets_.end());
    }

    /// Records every checkpoint whose pixel count has been reached.
    void check(const MeasurementSet& set) {
        while (next_ < targets_.size() && set.size() >= targets_[next_].second) {
            Checkpoint cp;
            cp.density = targets_[next_].first;
            cp.measured = set.size();
            cp.recon = reconstruct(set, idw_);
            cp.mask = mask_pixels(set);
            if (truth_) {
                cp.psnr = psnr(*truth_, cp.recon);
                cp.distortion = distortion(*truth_, cp.recon);
            }
            run_.checkpoints.push_back(std::move(cp));
            ++next_;
        }
    }

private:
    SamplingRun& run_;
    IdwParams idw_;
    const GroundTruthImage* truth_;
    std::vector<std::pair<double, std::size_t>> targets_;
    std::size_t next_ = 0;
};

void measure(SamplingRun& run, MeasurementSet& set, MeasurementSource& source, PixelLocation p, double predicted) {
    const std::size_t step = set.size() + 1;
    double v;
    try {
        v = source.value(p);
    } catch (const std::exception& e) {
        throw IoError("measurement query failed at step " + std::to_string(step) + " (" + std::to_string(p.row) +
                      ", " + std::to_string(p.col) + "): " + e.what());
    }
    set.add_measurement(p, v);
    run.history.push_back({step, p, v, predicted});
}

void check_dims(const MeasurementSource& source, const GroundTruthImage* truth) {
    if (source.dims().size() == 0) throw DimensionError("measurement source has no pixels");
    if (truth && truth->dims() != source.dims()) throw DimensionError("ground truth and source dimensions differ");
}

/// Uniform random seed set shared by the greedy and random runs of one seed.
MeasurementSet seed_measurements(SamplingRun& run, MeasurementSource& source, const RunConfig& config) {
    const Dims dims = source.dims();
    MeasurementSet set(dims);
    Rng rng(derive_seed(config.seed, 0x494e4954u));
    const auto count = pixels_for_density(config.initial_density, dims.size());
    for (std::size_t i : sample_without_replacement(dims.size(), count, rng))
        measure(run, set, source, PixelLocation::from_linear(i, dims), std::numeric_limits<double>::quiet_NaN());
    return set;
}

SamplingRun start_run(const std::string& method, const RunConfig& config, const MeasurementSource& source) {
    SamplingRun run;
    run.method = method;
    run.config = config;
    run.dims = source.dims();
    return run;
}

}  // namespace

SamplingRun run_sampling(MeasurementSource& source, const ErdModel& model, const RunConfig& config,
                         const GroundTruthImage* ground_truth) {
    config.validate();
    model.validate();
    check_dims(source, ground_truth);
    const IdwParams idw = config.idw.value_or(model.idw);
    const std::size_t n = source.dims().size();
    const std::size_t budget = pixels_for_density(config.budget_density, n);

    SamplingRun run = start_run(to_string(model.kind), config, source);
    run.config.idw = idw;
    CheckpointRecorder checkpoints(run, config, idw, ground_truth, n);
    MeasurementSet set = seed_measurements(run, source, config);
    checkpoints.check(set);

    const auto started = Clock::now();
    if (set.size() < budget) {
        Reconstruction recon = reconstruct(set, idw);
        CandidateScorer scorer(model, idw, config.scoring, config.threads);
        scorer.reset(recon, set);
        while (set.size() < budget) {
            const Selection pick = scorer.best(set);
            measure(run, set, source, pick.location, pick.predicted_erd);
            recon = reconstruct_incremental(std::move(recon), set, pick.location, idw);
            checkpoints.check(set);
            if (set.size() < budget) scorer.update(recon, set, pick.location);
        }
    }
    run.wall_time_s = std::chrono::duration<double>(Clock::now() - started).count();
    return run;
}

SamplingRun run_random_baseline(MeasurementSource& source, const RunConfig& config,
                                const GroundTruthImage* ground_truth) {
    config.validate();
    check_dims(source, ground_truth);
    const IdwParams idw = config.idw.value_or(IdwParams{});
    const Dims dims = source.dims();
    const std::size_t budget = pixels_for_density(config.budget_density, dims.size());

    SamplingRun run = start_run("random", config, source);
    run.config.idw = idw;
    CheckpointRecorder checkpoints(run, config, idw, ground_truth, dims.size());
    MeasurementSet set = seed_measurements(run, source, config);
    checkpoints.check(set);

    const auto started = Clock::now();
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (!set.is_measured(i)) open.push_back(i);
    Rng rng(derive_seed(config.seed, 0x52414e44u));
    const std::size_t remaining = budget > set.size() ? budget - set.size() : 0;
    for (std::size_t pick : sample_without_replacement(open.size(), remaining, rng)) {
        measure(run, set, source, PixelLocation::from_linear(open[pick], dims),
                std::numeric_limits<double>::quiet_NaN());
        checkpoints.check(set);
    }
    run.wall_time_s = std::chrono::duration<double>(Clock::now() - started).count();
    return run;
}

}  // namespace slads
