#include "slads/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "slads/error.hpp"
#include "slads/parallel.hpp"
#include "slads/pgm.hpp"
#include "slads/rng.hpp"
#include "slads/synth.hpp"
#include "slads/training.hpp"

#ifndef SLADS_DATA_DIR
#define SLADS_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace slads::cli {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_density(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", d);
    return buf;
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// File name tag for a checkpoint density: whole percentages as two digits.
std::string density_tag(double d) {
    const double pct = d * 100.0;
    char buf[32];
    if (std::abs(pct - std::round(pct)) < 1e-9) std::snprintf(buf, sizeof buf, "%02lld", std::llround(pct));
    else std::snprintf(buf, sizeof buf, "%g", pct);
    return buf;
}

struct IdwFlags {
    int window = 15;
    int neighbors = 10;
    double power = 2.0;
};

void add_idw_flags(CLI::App* app, IdwFlags& f) {
    app->add_option("--window", f.window, "Half-width of local update windows")->check(CLI::PositiveNumber);
    app->add_option("--neighbors", f.neighbors, "Measured neighbours used by the interpolator")
        ->check(CLI::PositiveNumber);
    app->add_option("--power", f.power, "Inverse-distance weight exponent")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------- training

struct TrainFlags {
    std::vector<std::string> images;
    std::string out;
    std::string regressor = "nn";
    std::string activation = "relu";
    std::vector<double> densities{0.01, 0.05, 0.10, 0.20, 0.30, 0.40};
    std::size_t samples_per_level = 500;
    std::uint64_t seed = 0;
    IdwFlags idw;
    int rd_window = 0;
    int epochs = 500;
    int batch_size = 64;
    double learning_rate = 1e-3;
    std::vector<int> hidden{50, 50, 50, 50, 50};
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_gamma = 0.0;
    std::size_t svr_cap = 2000;
    std::string db_csv;
    std::string bundle_dir;
};

void add_train_flags(CLI::App* app, TrainFlags& f) {
    app->add_option("--out", f.out, "Model file to write")->required();
    app->add_option("--regressor", f.regressor, "ERD regressor")
        ->check(CLI::IsMember({"lsq", "svr", "nn"}))
        ->capture_default_str();
    app->add_option("--activation", f.activation, "Hidden-layer activation (nn)")
        ->check(CLI::IsMember({"relu", "identity"}))
        ->capture_default_str();
    app->add_option("--densities", f.densities, "Training mask densities")->delimiter(',')->capture_default_str();
    app->add_option("--samples-per-level", f.samples_per_level, "Candidates per image and density")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--seed", f.seed, "Seed")->capture_default_str();
    add_idw_flags(app, f.idw);
    app->add_option("--rd-window", f.rd_window, "Half-width of the RD target window (default: --window)");
    app->add_option("--epochs", f.epochs, "nn epochs")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--batch-size", f.batch_size, "nn mini-batch size")->check(CLI::PositiveNumber);
    app->add_option("--learning-rate", f.learning_rate, "nn Adam step size")->check(CLI::PositiveNumber);
    app->add_option("--hidden", f.hidden, "nn hidden layer widths")->delimiter(',');
    app->add_option("--svr-c", f.svr_c, "svr box constraint C")->check(CLI::PositiveNumber);
    app->add_option("--svr-epsilon", f.svr_epsilon, "svr insensitive-zone width")->check(CLI::NonNegativeNumber);
    app->add_option("--svr-gamma", f.svr_gamma, "svr RBF gamma (0: automatic)");
    app->add_option("--svr-cap", f.svr_cap, "svr training subsample cap")->check(CLI::PositiveNumber);
    app->add_option("--db-csv", f.db_csv, "Also write the training database as CSV");
}

IdwParams idw_from(const IdwFlags& f) {
    IdwParams p;
    p.window = f.window;
    p.neighbors = f.neighbors;
    p.power = f.power;
    p.validate();
    return p;
}

int do_train(const TrainFlags& f, bool pretrained, std::ostream& out) {
    std::vector<GroundTruthImage> images;
    std::vector<std::string> ids;
    nlohmann::json image_meta = nlohmann::json::array();
    for (const auto& path : f.images) {
        const auto bytes = read_file_bytes(path);
        const Graymap g = parse_pgm(bytes);
        images.emplace_back(g.dims, std::vector<double>(g.pixels.begin(), g.pixels.end()));
        ids.push_back(fs::path(path).stem().string());
        image_meta.push_back({{"id", ids.back()}, {"sha256", sha256_hex(bytes)}});
    }

    const IdwParams idw = idw_from(f.idw);
    TrainingSchedule schedule;
    schedule.densities = f.densities;
    schedule.samples_per_level = f.samples_per_level;
    schedule.rd_window = f.rd_window > 0 ? f.rd_window : idw.window;
    schedule.seed = f.seed;
    schedule.validate();

    RegressorOptions options;
    options.mlp.epochs = f.epochs;
    options.mlp.batch_size = f.batch_size;
    options.mlp.learning_rate = f.learning_rate;
    options.mlp.hidden = f.hidden;
    options.mlp.activation = activation_from_string(f.activation);
    options.mlp.seed = derive_seed(f.seed, 0x4d4c50);
    options.svr.C = f.svr_c;
    options.svr.epsilon = f.svr_epsilon;
    options.svr.gamma = f.svr_gamma;
    options.svr.subsample_cap = f.svr_cap;
    options.svr.seed = derive_seed(f.seed, 0x535652);
    const RegressorKind kind = regressor_from_string(f.regressor);

    const auto t0 = std::chrono::steady_clock::now();
    const TrainingDatabase db = generate_training_db(images, schedule, idw, ids);
    if (!f.db_csv.empty()) write_file_atomic(f.db_csv, db.to_csv());
    TrainedModel trained = fit_erd_model(db, kind, options, idw);
    const double elapsed = seconds_since(t0);

    auto& meta = trained.model.metadata;
    meta["pretrained"] = pretrained;
    meta["images"] = image_meta;
    meta["densities"] = f.densities;
    meta["samples_per_level"] = f.samples_per_level;
    meta["rd_window"] = schedule.rd_window;
    meta["seed"] = f.seed;
    meta["rows"] = trained.rows;
    meta[trained.loss_name] = trained.final_loss;
    if (kind == RegressorKind::nn) {
        meta["epochs"] = f.epochs;
        meta["batch_size"] = f.batch_size;
        meta["learning_rate"] = f.learning_rate;
        meta["hidden"] = f.hidden;
    }
    if (pretrained) meta["image_sha256"] = image_meta.front()["sha256"];
    save_model(trained.model, f.out);

    char buf[256];
    std::snprintf(buf, sizeof buf, "trained %s: n=%zu %s=%.6g elapsed=%.2fs -> %s\n", f.regressor.c_str(),
                  trained.rows, trained.loss_name.c_str(), trained.final_loss, elapsed, f.out.c_str());
    out << buf;
    return kExitOk;
}

fs::path bundled_image(const std::string& bundle_dir) {
    fs::path dir;
    if (!bundle_dir.empty()) dir = bundle_dir;
    else if (const char* env = std::getenv("SLADS_DATA_DIR"); env && *env) dir = env;
    else dir = SLADS_DATA_DIR;
    const fs::path p = dir / "generic.pgm";
    if (!fs::is_regular_file(p))
        throw IoError("no generic training image found at " + p.string() +
                      "; pass --image <file.pgm>, point --bundle-dir or SLADS_DATA_DIR at a directory "
                      "containing generic.pgm, or create one with `slads synth --family generic --out generic.pgm`");
    return p;
}

// ---------------------------------------------------------------- run / eval

struct RunFlags {
    std::string model;
    std::string image;
    std::string out;
    std::string method = "slads";
    double initial = 0.01;
    double budget = 0.40;
    std::vector<double> checkpoints{0.10, 0.20, 0.30, 0.40};
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;
    IdwFlags idw;
    std::string scoring = "cached";
    int threads = 1;
};

void add_sampling_flags(CLI::App* app, RunFlags& f) {
    app->add_option("--initial", f.initial, "Density of the random seed measurements")->capture_default_str();
    app->add_option("--budget", f.budget, "Stop at this measured density")->capture_default_str();
    app->add_option("--checkpoints", f.checkpoints, "Densities at which results are recorded")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--seed", f.seed, "Seed")->capture_default_str();
    app->add_option("--noise-sigma", f.noise_sigma, "Std of Gaussian measurement noise")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    add_idw_flags(app, f.idw);
    app->add_option("--scoring", f.scoring, "Candidate rescoring strategy")
        ->check(CLI::IsMember({"cached", "full"}))
        ->capture_default_str();
}

RunConfig run_config_from(const RunFlags& f, const CLI::App* app) {
    RunConfig c;
    c.initial_density = f.initial;
    c.budget_density = f.budget;
    c.checkpoint_densities = f.checkpoints;
    c.seed = f.seed;
    c.scoring = f.scoring == "full" ? ScoringMode::full : ScoringMode::cached;
    c.threads = f.threads;
    c.validate();
    // Interpolation flags override the model's settings only when given.
    const bool any_idw = app->count("--window") + app->count("--neighbors") + app->count("--power") > 0;
    if (any_idw) c.idw = idw_from(f.idw);
    c.checkpoint_densities = report_densities(c);
    return c;
}

SamplingRun execute(const GroundTruthImage& truth, const ErdModel* model, const RunConfig& config,
                    double noise_sigma) {
    SimulatedSource source(truth, noise_sigma, derive_seed(config.seed, 0x534f5552));
    return model ? run_sampling(source, *model, config, &truth) : run_random_baseline(source, config, &truth);
}

int do_run(const RunFlags& f, const CLI::App* app, std::ostream& out) {
    if (f.method != "random" && f.model.empty())
        throw ContractError("--model is required unless --method random");
    RunConfig config = run_config_from(f, app);
    const GroundTruthImage truth = load_image(f.image);
    std::optional<ErdModel> model;
    if (f.method != "random") model = load_model(f.model);

    const SamplingRun result = execute(truth, model ? &*model : nullptr, config, f.noise_sigma);

    const fs::path dir(f.out);
    fs::create_directories(dir);
    for (const auto& cp : result.checkpoints) {
        const std::string tag = density_tag(cp.density);
        write_pgm(dir / ("mask_" + tag + ".pgm"), truth.dims(), cp.mask);
        write_pgm(dir / ("recon_" + tag + ".pgm"), cp.recon);
    }
    write_file_atomic(dir / "history.csv", result.history_csv());
    write_file_atomic(dir / "run.cfg", app->config_to_str(true, false));

    const Checkpoint& last = result.checkpoints.back();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: psnr@%s=%.4f dB distortion=%.6g measured=%zu time=%.3fs\n",
                  result.method.c_str(), format_density(last.density).c_str(), last.psnr.value_or(NAN),
                  last.distortion.value_or(NAN), last.measured, result.wall_time_s);
    out << buf;
    return kExitOk;
}

struct EvalFlags {
    RunFlags run;
    std::vector<std::string> images;
    std::vector<std::string> models;
    std::vector<std::string> methods;
    std::size_t repeats = 10;
    std::string out;
    bool no_timing = false;
};

std::string label_for(const ErdModel& model, const std::string& path, const std::vector<EvalMethod>& taken) {
    std::string label = to_string(model.kind);
    const bool clash = std::any_of(taken.begin(), taken.end(), [&](const EvalMethod& m) { return m.label == label; });
    if (clash) label += "@" + fs::path(path).stem().string();
    return label;
}

int do_eval(const EvalFlags& f, const CLI::App* app, std::ostream& out, std::ostream& err) {
    std::vector<EvalMethod> methods;
    for (const auto& m : f.methods) {
        if (m != "random") throw ContractError("unknown --method '" + m + "' (use --model for trained models)");
        methods.push_back({"random", std::nullopt});
    }
    for (const auto& path : f.models) {
        ErdModel model = load_model(path);
        std::string label = label_for(model, path, methods);
        methods.push_back({std::move(label), std::move(model)});
    }
    if (methods.empty()) throw ContractError("nothing to evaluate: give --model files and/or --method random");

    std::vector<GroundTruthImage> images;
    for (const auto& p : f.images) images.push_back(load_image(p));

    EvalOptions options;
    options.config = run_config_from(f.run, app);
    options.repeats = f.repeats;
    options.noise_sigma = f.run.noise_sigma;
    options.threads = resolve_threads(0);
    options.timing = !f.no_timing;
    const EvalOutcome outcome = evaluate(images, methods, options);

    const std::string csv = outcome.report.to_csv();
    if (!f.out.empty()) write_file_atomic(f.out, csv);
    out << csv;
    for (const auto& msg : outcome.failures) err << "run aborted: " << msg << "\n";
    return outcome.failures.empty() ? kExitOk : kExitNumeric;
}

int do_synth(const std::string& family, int size, std::uint64_t seed, const std::string& path, std::ostream& out) {
    const GroundTruthImage img = synth::generate(family, Dims{size, size}, seed);
    write_pgm(path, img);
    out << "wrote " << family << " " << size << "x" << size << " -> " << path << "\n";
    return kExitOk;
}

/// Fills options that were not given on the command line from an INI-style
/// file ("key=value", optional [section] ignored). Explicit flags win.
void apply_config(CLI::App* sub, const std::string& path) {
    if (!fs::is_regular_file(path)) throw CLI::FileError::Missing(path);
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
        if (item.name == "++" || item.name == "--" || item.inputs.empty()) continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
        if (opt == nullptr) throw CLI::ConfigError::NotConfigurable(item.fullname());
        if (opt->count() > 0 || item.name == "config") continue;
        opt->clear();
        opt->add_result(item.inputs);
        opt->run_callback();
    }
}

}  // namespace

std::vector<double> report_densities(const RunConfig& config) {
    std::vector<double> d;
    for (double c : config.checkpoint_densities)
        if (c <= config.budget_density + 1e-12) d.push_back(c);
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), d.end());
    if (d.empty() || std::abs(d.back() - config.budget_density) > 1e-12) d.push_back(config.budget_density);
    return d;
}

std::string EvalReport::to_csv() const {
    std::string out = "method,density,psnr_mean,psnr_std,distortion_mean,wall_time_mean_s\n";
    for (const auto& r : rows) {
        out += r.method + "," + format_density(r.density) + "," + format_real(r.psnr_mean) + "," +
               format_real(r.psnr_std) + "," + format_real(r.distortion_mean) + "," + format_real(r.wall_time_mean_s) +
               "\n";
    }
    return out;
}

EvalOutcome evaluate(const std::vector<GroundTruthImage>& images, const std::vector<EvalMethod>& methods,
                     const EvalOptions& options) {
    if (images.empty()) throw ContractError("evaluation needs at least one image");
    if (options.repeats == 0) throw ContractError("repeats must be at least 1");
    RunConfig base = options.config;
    base.validate();
    base.checkpoint_densities = report_densities(base);
    const std::vector<double> densities = base.checkpoint_densities;

    struct Job {
        std::size_t method, image, repeat;
    };
    std::vector<Job> jobs;
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t i = 0; i < images.size(); ++i)
            for (std::size_t r = 0; r < options.repeats; ++r) jobs.push_back({m, i, r});

    struct Result {
        std::vector<Checkpoint> checkpoints;
        double wall = 0.0;
        std::string error;
    };
    std::vector<Result> results(jobs.size());
    parallel_for(jobs.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const Job& job = jobs[j];
            RunConfig cfg = base;
            cfg.seed = base.seed + job.repeat;
            cfg.threads = 1;
            const EvalMethod& method = methods[job.method];
            try {
                SamplingRun run = execute(images[job.image], method.model ? &*method.model : nullptr, cfg,
                                          options.noise_sigma);
                for (auto& cp : run.checkpoints) {
                    cp.recon = Reconstruction{};   // keep only the numbers
                    cp.mask.clear();
                }
                results[j].checkpoints = std::move(run.checkpoints);
                results[j].wall = options.timing ? run.wall_time_s : 0.0;
            } catch (const std::exception& e) {
                results[j].error = method.label + " image " + std::to_string(job.image) + " seed " +
                                   std::to_string(cfg.seed) + ": " + e.what();
            }
        }
    });

    EvalOutcome outcome;
    outcome.report.repeats = options.repeats;
    for (std::size_t r = 0; r < options.repeats; ++r) outcome.report.seeds.push_back(base.seed + r);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::vector<const Result*> mine;
        bool failed = false;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].method != m) continue;
            if (!results[j].error.empty()) {
                failed = true;
                outcome.failures.push_back(results[j].error);
            }
            mine.push_back(&results[j]);
        }
        for (std::size_t k = 0; k < densities.size(); ++k) {
            EvalRow row{methods[m].label, densities[k], nan, nan, nan, nan};
            if (!failed) {
                const double n = static_cast<double>(mine.size());
                double ps = 0.0, ds = 0.0, ws = 0.0;
                for (const Result* r : mine) {
                    ps += r->checkpoints[k].psnr.value();
                    ds += r->checkpoints[k].distortion.value();
                    ws += r->wall;
                }
                row.psnr_mean = ps / n;
                double var = 0.0;
                for (const Result* r : mine) {
                    const double d = r->checkpoints[k].psnr.value() - row.psnr_mean;
                    var += d * d;
                }
                row.psnr_std = std::sqrt(var / n);
                row.distortion_mean = ds / n;
                row.wall_time_mean_s = ws / n;
            }
            outcome.report.rows.push_back(row);
        }
    }
    return outcome;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::string config_path;
    CLI::App app{"Learned dynamic sparse sampling: train ERD models, run and evaluate sampling campaigns"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    TrainFlags train_flags;
    auto* train = app.add_subcommand("train", "Train an ERD model from ground-truth images");
    train->add_option("--images", train_flags.images, "Training images (binary PGM)")->required()->expected(1, -1);
    add_train_flags(train, train_flags);
    train->add_option("--config", config_path, "Read options from a key=value file");

    TrainFlags pre_flags;
    std::string pre_image;
    auto* pretrain = app.add_subcommand("pretrain", "Train the generic-image model used without sample-specific training");
    pretrain->add_option("--image", pre_image, "Generic training image (default: the bundled one)");
    pretrain->add_option("--bundle-dir", pre_flags.bundle_dir, "Directory holding generic.pgm");
    add_train_flags(pretrain, pre_flags);
    pretrain->add_option("--config", config_path, "Read options from a key=value file");

    RunFlags run_flags;
    auto* runc = app.add_subcommand("run", "Sample one image and write masks, reconstructions and history");
    runc->add_option("--model", run_flags.model, "Model file");
    runc->add_option("--image", run_flags.image, "Ground-truth image for the simulator")->required();
    runc->add_option("--out", run_flags.out, "Output directory")->required();
    runc->add_option("--method", run_flags.method, "Sampling method")
        ->check(CLI::IsMember({"slads", "random"}))
        ->capture_default_str();
    runc->add_option("--threads", run_flags.threads, "Threads for candidate scoring")->check(CLI::PositiveNumber);
    add_sampling_flags(runc, run_flags);
    runc->add_option("--config", config_path, "Read options from a key=value file");

    EvalFlags eval_flags;
    auto* evalc = app.add_subcommand("eval", "PSNR versus density over seeded repeats");
    evalc->add_option("--image,--images", eval_flags.images, "Test images")->required()->expected(1, -1);
    evalc->add_option("--model", eval_flags.models, "Model files to evaluate")->expected(1, -1);
    evalc->add_option("--method", eval_flags.methods, "Baseline methods (random)")->expected(1, -1);
    evalc->add_option("--repeats", eval_flags.repeats, "Repeats per image")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    evalc->add_option("--out", eval_flags.out, "Report CSV");
    evalc->add_flag("--no-timing", eval_flags.no_timing, "Write 0 wall times (byte-reproducible reports)");
    add_sampling_flags(evalc, eval_flags.run);
    evalc->add_option("--config", config_path, "Read options from a key=value file");

    std::string family = "blobs", synth_out;
    int synth_size = 64;
    std::uint64_t synth_seed = 0;
    auto* synthc = app.add_subcommand("synth", "Write a synthetic test image");
    synthc->add_option("--family", family, "Image family")
        ->check(CLI::IsMember(synth::family_names()))
        ->capture_default_str();
    synthc->add_option("--size", synth_size, "Width and height")->check(CLI::PositiveNumber)->capture_default_str();
    synthc->add_option("--seed", synth_seed, "Seed")->capture_default_str();
    synthc->add_option("--out", synth_out, "Output PGM")->required();

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (CLI::App* sub : {train, pretrain, runc, evalc})
            if (*sub && !config_path.empty()) apply_config(sub, config_path);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*train) return do_train(train_flags, false, out);
        if (*pretrain) {
            pre_flags.images = {pre_image.empty() ? bundled_image(pre_flags.bundle_dir).string() : pre_image};
            return do_train(pre_flags, true, out);
        }
        if (*runc) return do_run(run_flags, runc, out);
        if (*evalc) return do_eval(eval_flags, evalc, out, err);
        if (*synthc) return do_synth(family, synth_size, synth_seed, synth_out, out);
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace slads::cli
