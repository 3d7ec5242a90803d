#include "slads/linear.hpp"

#include <cmath>
#include <string>

#include "slads/error.hpp"

namespace slads {

LinearFit fit_linear(const Eigen::MatrixXd& V, const Eigen::VectorXd& R) {
    if (V.rows() != R.size())
        throw DimensionError("fit_linear: " + std::to_string(V.rows()) + " feature rows but " +
                             std::to_string(R.size()) + " targets");
    if (V.cols() == 0 || V.rows() < V.cols())
        throw ContractError("fit_linear needs at least as many rows (" + std::to_string(V.rows()) +
                            ") as features (" + std::to_string(V.cols()) + ")");
    if (!V.allFinite() || !R.allFinite()) throw NumericError("fit_linear: non-finite input");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(V);
    LinearFit fit;
    fit.model.theta = cod.solve(R);
    fit.rank = cod.rank();
    fit.rank_deficient = fit.rank < V.cols();
    fit.residual_norm = (R - V * fit.model.theta).norm();
    return fit;
}

double predict_linear(const LinearModel& model, std::span<const double> standardized) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < model.theta.size(); ++j) acc += standardized[static_cast<std::size_t>(j)] * model.theta[j];
    return acc;
}

}  // namespace slads
