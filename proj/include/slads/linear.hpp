#pragma once

#include <Eigen/Dense>
#include <span>

namespace slads {

/// ERD model  R(s) = V_s . theta  on standardized features.
struct LinearModel {
    Eigen::VectorXd theta;
};

struct LinearFit {
    LinearModel model;
    Eigen::Index rank = 0;
    bool rank_deficient = false;   ///< minimum-norm solution was returned
    double residual_norm = 0.0;    ///< ||R - V theta||
};

/// Least-squares fit of theta minimising ||R - V theta||^2 through a
/// complete orthogonal decomposition. Rank-deficient V yields the
/// minimum-norm minimiser with rank_deficient set. Requires rows >= cols.
LinearFit fit_linear(const Eigen::MatrixXd& V, const Eigen::VectorXd& R);

double predict_linear(const LinearModel& model, std::span<const double> standardized);

}  // namespace slads
