#include "slads/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "slads/error.hpp"
#include "slads/rng.hpp"

namespace slads {

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity") return Activation::identity;
    throw ContractError("unknown activation '" + name + "' (expected relu or identity)");
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

MlpModel init_mlp(int inputs, const MlpConfig& config) {
    if (inputs < 1) throw ContractError("network needs at least one input");
    for (int h : config.hidden)
        if (h < 1) throw ContractError("hidden layer widths must be positive");
    MlpModel model;
    model.activation = config.activation;
    Rng rng(derive_seed(config.seed, 0x4d4c50u));
    std::vector<int> sizes{inputs};
    sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
    sizes.push_back(1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l];
        const int fan_out = sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Eigen::MatrixXd W(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) W(i, j) = rng.uniform(-limit, limit);
        model.weights.push_back(std::move(W));
        model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return model;
}

namespace {

void activate(Eigen::MatrixXd& z, Activation a) {
    if (a == Activation::relu) z = z.cwiseMax(0.0);
}

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;    // pre-activations per layer, (units x batch)
    std::vector<Eigen::MatrixXd> post;   // post[0] is the input (inputs x batch)
};

ForwardCache forward_batch(const MlpModel& model, const Eigen::MatrixXd& V) {
    ForwardCache cache;
    cache.post.push_back(V.transpose());
    const std::size_t L = model.layer_count();
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd z = model.weights[l] * cache.post.back();
        z.colwise() += model.biases[l];
        cache.pre.push_back(z);
        if (l + 1 < L) activate(z, model.activation);
        cache.post.push_back(std::move(z));
    }
    return cache;
}

void require_batch(const MlpModel& model, const Eigen::MatrixXd& V, const Eigen::VectorXd& R) {
    if (V.rows() != R.size()) throw DimensionError("network batch: feature rows and targets differ in count");
    if (V.cols() != model.input_dim())
        throw DimensionError("network expects " + std::to_string(model.input_dim()) + " inputs, got " +
                             std::to_string(V.cols()));
}

}  // namespace

double mlp_loss(const MlpModel& model, const Eigen::MatrixXd& V, const Eigen::VectorXd& R) {
    require_batch(model, V, R);
    const ForwardCache cache = forward_batch(model, V);
    const Eigen::VectorXd residual = cache.post.back().row(0).transpose() - R;
    return 0.5 * residual.squaredNorm();
}

MlpGradients mlp_loss_gradients(const MlpModel& model, const Eigen::MatrixXd& V, const Eigen::VectorXd& R) {
    require_batch(model, V, R);
    const ForwardCache cache = forward_batch(model, V);
    const std::size_t L = model.layer_count();
    MlpGradients g;
    g.weights.resize(L);
    g.biases.resize(L);

    Eigen::MatrixXd delta = cache.post.back() - R.transpose();  // (1 x batch)
    g.loss = 0.5 * delta.squaredNorm();
    for (std::size_t l = L; l-- > 0;) {
        g.weights[l] = delta * cache.post[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd back = model.weights[l].transpose() * delta;
        if (model.activation == Activation::relu)
            back = back.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
        delta = std::move(back);
    }
    return g;
}

AdamOptimizer::AdamOptimizer(const MlpModel& shape, double learning_rate, double beta1, double beta2,
                             double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
    for (std::size_t l = 0; l < shape.layer_count(); ++l) {
        mw_.push_back(Eigen::MatrixXd::Zero(shape.weights[l].rows(), shape.weights[l].cols()));
        vw_.push_back(mw_.back());
        mb_.push_back(Eigen::VectorXd::Zero(shape.biases[l].size()));
        vb_.push_back(mb_.back());
    }
}

void AdamOptimizer::step(MlpModel& model, const MlpGradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
        m = beta1_ * m + (1.0 - beta1_) * grad;
        v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
        param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    };
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        update(model.weights[l], mw_[l], vw_[l], grads.weights[l]);
        update(model.biases[l], mb_[l], vb_[l], grads.biases[l]);
    }
}

MlpFit fit_mlp(const Eigen::MatrixXd& V, const Eigen::VectorXd& R, const MlpConfig& config) {
    if (V.rows() < 1) throw ContractError("fit_mlp needs at least one row");
    if (V.rows() != R.size()) throw DimensionError("fit_mlp: feature rows and targets differ in count");
    if (config.epochs < 0 || config.batch_size < 1) throw ContractError("fit_mlp: bad epochs or batch size");
    if (!V.allFinite() || !R.allFinite()) throw NumericError("fit_mlp: non-finite input");

    MlpFit fit;
    fit.model = init_mlp(static_cast<int>(V.cols()), config);
    fit.initial_loss = mlp_loss(fit.model, V, R);
    AdamOptimizer adam(fit.model, config.learning_rate, config.beta1, config.beta2, config.adam_epsilon);

    const auto n = static_cast<std::size_t>(V.rows());
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(derive_seed(config.seed, 0x5348u));
    Eigen::MatrixXd xb;
    Eigen::VectorXd yb;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(std::span<Eigen::Index>(order));
        int batch_no = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size), ++batch_no) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
            const auto b = static_cast<Eigen::Index>(stop - start);
            xb.resize(b, V.cols());
            yb.resize(b);
            for (Eigen::Index k = 0; k < b; ++k) {
                xb.row(k) = V.row(order[start + static_cast<std::size_t>(k)]);
                yb[k] = R[order[start + static_cast<std::size_t>(k)]];
            }
            const MlpGradients g = mlp_loss_gradients(fit.model, xb, yb);
            if (!std::isfinite(g.loss)) {
                std::ostringstream msg;
                msg << "network training diverged at epoch " << epoch << ", batch " << batch_no << ": loss "
                    << g.loss;
                throw NumericError(msg.str());
            }
            adam.step(fit.model, g);
        }
        fit.epochs = epoch + 1;
    }
    fit.final_loss = mlp_loss(fit.model, V, R);
    if (!std::isfinite(fit.final_loss))
        throw NumericError("network training diverged: final loss " + std::to_string(fit.final_loss));
    return fit;
}

namespace {

constexpr std::size_t kTile = 32;

}  // namespace

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__linux__)
#define SLADS_KERNEL_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define SLADS_KERNEL_CLONES
#endif

namespace detail {

// One dense unit over a full tile: acc[s] = bias + sum_i w[i * stride] * x[i][s],
// summed in input order. No FMA contraction, so every clone gives the same bits.
SLADS_KERNEL_CLONES void dense_unit(const double* w, std::size_t stride, std::size_t fan_in, const double* x,
                                    double bias, bool relu, double* acc) {
    double t[kTile];
    for (std::size_t s = 0; s < kTile; ++s) t[s] = bias;
    for (std::size_t i = 0; i < fan_in; ++i) {
        const double wi = w[i * stride];
        const double* xi = x + i * kTile;
        for (std::size_t s = 0; s < kTile; ++s) t[s] += wi * xi[s];
    }
    if (relu)
        for (std::size_t s = 0; s < kTile; ++s) t[s] = t[s] > 0.0 ? t[s] : 0.0;
    for (std::size_t s = 0; s < kTile; ++s) acc[s] = t[s];
}

}  // namespace detail

void mlp_forward(const MlpModel& model, std::span<const double> inputs, std::size_t count, std::span<double> out) {
    const auto in_dim = static_cast<std::size_t>(model.input_dim());
    if (inputs.size() < count * in_dim || out.size() < count)
        throw DimensionError("mlp_forward: buffer sizes do not match sample count");
    std::size_t widest = in_dim;
    for (const auto& W : model.weights) widest = std::max(widest, static_cast<std::size_t>(W.rows()));
    // Activations are stored unit-major: buf[unit * kTile + sample].
    std::vector<double> a(widest * kTile, 0.0), b(widest * kTile, 0.0);
    const bool relu = model.activation == Activation::relu;

    for (std::size_t start = 0; start < count; start += kTile) {
        const std::size_t m = std::min(kTile, count - start);
        for (std::size_t s = 0; s < m; ++s)
            for (std::size_t i = 0; i < in_dim; ++i) a[i * kTile + s] = inputs[(start + s) * in_dim + i];
        for (std::size_t l = 0; l < model.layer_count(); ++l) {
            const Eigen::MatrixXd& W = model.weights[l];
            const auto units = static_cast<std::size_t>(W.rows());
            const auto fan_in = static_cast<std::size_t>(W.cols());
            const bool hidden = l + 1 < model.layer_count();
            for (std::size_t u = 0; u < units; ++u)
                detail::dense_unit(W.data() + u, units, fan_in, a.data(), model.biases[l][static_cast<Eigen::Index>(u)],
                                   hidden && relu, b.data() + u * kTile);
            std::swap(a, b);
        }
        for (std::size_t s = 0; s < m; ++s) out[start + s] = a[s];
    }
}

double predict_mlp(const MlpModel& model, std::span<const double> standardized) {
    double out = 0.0;
    mlp_forward(model, standardized, 1, std::span<double>(&out, 1));
    return out;
}

}  // namespace slads
