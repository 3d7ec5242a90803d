#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slads/engine.hpp"
#include "slads/image.hpp"
#include "slads/model.hpp"

namespace slads::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitNumeric = 3 };

struct EvalRow {
    std::string method;
    double density = 0.0;
    double psnr_mean = 0.0;
    double psnr_std = 0.0;   ///< population standard deviation over runs
    double distortion_mean = 0.0;
    double wall_time_mean_s = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::size_t repeats = 0;
    std::vector<std::uint64_t> seeds;
    /// "method,density,psnr_mean,psnr_std,distortion_mean,wall_time_mean_s"
    std::string to_csv() const;
};

/// A sampling strategy under evaluation: greedy ERD with `model`, or uniform
/// random when no model is given.
struct EvalMethod {
    std::string label;
    std::optional<ErdModel> model;
};

struct EvalOptions {
    RunConfig config;            ///< config.seed is the base seed
    std::size_t repeats = 10;
    double noise_sigma = 0.0;
    int threads = 1;             ///< concurrent (method, image, seed) runs
    bool timing = true;          ///< false writes 0 wall times so reports are byte-reproducible
};

struct EvalOutcome {
    EvalReport report;
    std::vector<std::string> failures;   ///< one message per aborted run
};

/// Runs every method on every image with seeds base .. base + repeats - 1 and
/// averages the checkpoint results over images and repeats. A method with an
/// aborted run gets NaN in all of its rows.
EvalOutcome evaluate(const std::vector<GroundTruthImage>& images, const std::vector<EvalMethod>& methods,
                     const EvalOptions& options);

/// Checkpoint densities used by run and eval: the configured ones up to the
/// budget, plus the budget itself.
std::vector<double> report_densities(const RunConfig& config);

/// Parses and executes a command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace slads::cli
