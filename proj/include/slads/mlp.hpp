#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace slads {

enum class Activation { relu, identity };

std::string to_string(Activation a);
/// Throws ContractError on anything other than "relu" or "identity".
Activation activation_from_string(const std::string& name);

/// Fully connected regression network with linear output.
/// weights[l] has shape (outputs x inputs) of layer l.
struct MlpModel {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    Activation activation = Activation::relu;

    int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;
};

struct MlpConfig {
    int epochs = 500;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;
    Activation activation = Activation::relu;
    std::vector<int> hidden{50, 50, 50, 50, 50};
};

/// Glorot-uniform weights drawn from the seeded generator; zero biases.
MlpModel init_mlp(int inputs, const MlpConfig& config);

struct MlpGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    double loss = 0.0;   ///< 1/2 sum (R - g(V))^2 over the batch
};

/// Loss and its gradient over a batch (one sample per row of V).
MlpGradients mlp_loss_gradients(const MlpModel& model, const Eigen::MatrixXd& V, const Eigen::VectorXd& R);
double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& V, const Eigen::VectorXd& R);

/// Adam with bias-corrected first and second moments and a constant step size.
class AdamOptimizer {
public:
    AdamOptimizer(const MlpModel& shape, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8);

    void step(MlpModel& model, const MlpGradients& grads);
    long steps() const noexcept { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
};

struct MlpFit {
    MlpModel model;
    double initial_loss = 0.0;
    double final_loss = 0.0;   ///< full-data loss after the last epoch
    int epochs = 0;
};

/// Mini-batch Adam on 1/2 sum (R - g(V))^2. Throws NumericError with the
/// epoch, batch and loss if the loss becomes non-finite.
MlpFit fit_mlp(const Eigen::MatrixXd& V, const Eigen::VectorXd& R, const MlpConfig& config);

/// Forward pass for `count` samples stored row-major in `inputs`
/// (count x input_dim). Each sample is accumulated in a fixed order that
/// does not depend on how many samples are evaluated together.
void mlp_forward(const MlpModel& model, std::span<const double> inputs, std::size_t count, std::span<double> out);
double predict_mlp(const MlpModel& model, std::span<const double> standardized);

}  // namespace slads
