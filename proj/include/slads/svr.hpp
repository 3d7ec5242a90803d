#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace slads {

/// Epsilon-insensitive support vector regression with a Gaussian RBF kernel.
/// Prediction: sum_i coeffs_i * exp(-gamma * ||v - sv_i||^2) + bias.
struct SvrModel {
    Eigen::MatrixXd support_vectors;  ///< one standardized feature row per support vector
    Eigen::VectorXd dual_coeffs;      ///< alpha_i - alpha_i^*
    double bias = 0.0;
    double gamma = 1.0;
    double C = 1.0;
    double epsilon = 0.1;
};

struct SvrConfig {
    double C = 1.0;
    double epsilon = 0.1;
    double gamma = 0.0;                 ///< <= 0 selects 1 / (t * variance of all feature entries)
    std::size_t subsample_cap = 2000;   ///< larger training sets are subsampled uniformly
    std::uint64_t seed = 0;
    double tolerance = 1e-3;            ///< stop when the maximal KKT violation drops below this
    int max_passes = 1000;              ///< iteration cap = max_passes * 2n
};

struct SvrFit {
    SvrModel model;
    bool converged = false;
    long iterations = 0;
    double dual_objective = 0.0;   ///< 1/2 b'Kb + eps*sum|b| - y'b at the returned iterate
    double kkt_gap = 0.0;
    Eigen::VectorXd coefficients;  ///< alpha - alpha^* for every training row used (after subsampling)
    std::size_t rows_used = 0;
};

double auto_gamma(const Eigen::MatrixXd& V);

/// Solves the dual by sequential pairwise (SMO) updates with second-order
/// working set selection. Non-convergence returns the last iterate with
/// converged == false.
SvrFit fit_svr(const Eigen::MatrixXd& V, const Eigen::VectorXd& R, const SvrConfig& config = {});

double predict_svr(const SvrModel& model, std::span<const double> standardized);

}  // namespace slads
