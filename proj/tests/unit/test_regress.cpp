#include <algorithm>
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "slads/error.hpp"
#include "slads/linear.hpp"
#include "slads/mlp.hpp"
#include "slads/model.hpp"
#include "slads/rng.hpp"
#include "slads/svr.hpp"
#include "support/oracles.hpp"
#include "support/tmpdir.hpp"

using namespace slads;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& V, double gamma) {
    Eigen::MatrixXd K(V.rows(), V.rows());
    for (Eigen::Index i = 0; i < V.rows(); ++i)
        for (Eigen::Index j = 0; j < V.rows(); ++j) K(i, j) = std::exp(-gamma * (V.row(i) - V.row(j)).squaredNorm());
    return K;
}

FeatureStats unit_stats() {
    FeatureStats s;
    s.stddevs.fill(1.0);
    return s;
}

ErdModel small_nn_model(std::uint64_t seed) {
    MlpConfig cfg;
    cfg.seed = seed;
    cfg.hidden = {7, 5};
    ErdModel m;
    m.kind = RegressorKind::nn;
    m.payload = init_mlp(kFeatureCount, cfg);
    Rng rng(seed);
    for (int j = 0; j < kFeatureCount; ++j) {
        m.stats.means[j] = rng.normal();
        m.stats.stddevs[j] = 0.5 + rng.uniform();
    }
    return m;
}

}  // namespace

// ------------------------------------------------------------------ linear

TEST_CASE("fit_linear: consistent system recovers the generator") {
    Rng rng(1);
    const auto V = random_matrix(rng, 80, 6);
    const auto theta = random_vector(rng, 6);
    const auto fit = fit_linear(V, V * theta);
    CHECK((fit.model.theta - theta).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK_FALSE(fit.rank_deficient);
    CHECK(fit.residual_norm <= 1e-9);
}

TEST_CASE("fit_linear: identity design returns the targets") {
    Rng rng(2);
    const auto R = random_vector(rng, 6);
    const auto fit = fit_linear(Eigen::MatrixXd::Identity(6, 6), R);
    CHECK((fit.model.theta - R).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("fit_linear: random 200x6 systems match the normal-equation oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto V = random_matrix(rng, 200, 6);
        const auto R = random_vector(rng, 200);
        const auto theta = fit_linear(V, R).model.theta;
        const auto want = oracle::normal_equations(V, R);
        CHECK((theta - want).norm() <= 1e-8 * want.norm());
        // residual orthogonal to the column space
        CHECK((V.transpose() * (R - V * theta)).norm() <= 1e-6 * R.norm());
    }
}

TEST_CASE("fit_linear: rank deficiency yields the minimum-norm solution") {
    Rng rng(4);
    Eigen::MatrixXd V = random_matrix(rng, 50, 6);
    V.col(3) = V.col(1);
    V.col(5).setZero();
    Eigen::VectorXd gen(6);
    gen << 1.0, 2.0, 0.0, -1.0, 0.5, 0.0;
    const auto fit = fit_linear(V, V * gen);
    CHECK(fit.rank_deficient);
    CHECK(fit.rank == 4);
    // minimum norm splits the duplicated column equally and ignores the zero one
    CHECK(fit.model.theta[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.model.theta[3] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(fit.model.theta[5]) <= 1e-12);
    CHECK(fit.residual_norm <= 1e-9);

    const auto zero = fit_linear(Eigen::MatrixXd::Zero(20, 6), Eigen::VectorXd::Zero(20));
    CHECK(zero.rank_deficient);
    CHECK(zero.model.theta.norm() == 0.0);
}

TEST_CASE("fit_linear: contract errors") {
    CHECK_THROWS_AS(fit_linear(Eigen::MatrixXd::Ones(3, 6), Eigen::VectorXd::Ones(3)), ContractError);
    CHECK_THROWS_AS(fit_linear(Eigen::MatrixXd::Ones(10, 6), Eigen::VectorXd::Ones(9)), DimensionError);
}

// ------------------------------------------------------------------ svr

TEST_CASE("fit_svr: data inside the epsilon tube") {
    Rng rng(5);
    const auto V = random_matrix(rng, 40, 3);
    Eigen::VectorXd R(40);
    for (Eigen::Index i = 0; i < 40; ++i) R[i] = 12.0 + rng.uniform(-0.04, 0.04);
    const auto fit = fit_svr(V, R);
    CHECK(fit.converged);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() <= 1e-9);
    for (Eigen::Index i = 0; i < 40; ++i) {
        Eigen::RowVectorXd r = V.row(i);
        CHECK(std::abs(predict_svr(fit.model, std::span<const double>(r.data(), 3)) - 12.0) <= 0.1);
    }
}

TEST_CASE("fit_svr: dual objective matches a dense QP oracle; box constraint holds") {
    Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd V(30, 1);
        Eigen::VectorXd R(30);
        for (Eigen::Index i = 0; i < 30; ++i) {
            V(i, 0) = rng.uniform(-2.0, 2.0);
            R[i] = std::sin(2.0 * V(i, 0)) + 0.3 * rng.normal();
        }
        SvrConfig cfg;
        cfg.gamma = 0.7;
        const auto fit = fit_svr(V, R, cfg);
        CHECK(fit.converged);
        const double best = oracle::svr_dual_qp(rbf_gram(V, cfg.gamma), R, cfg.C, cfg.epsilon, 20000);
        CHECK(std::abs(fit.dual_objective - best) <= 1e-3);
        CHECK(fit.coefficients.cwiseAbs().maxCoeff() <= cfg.C + 1e-9);
        CHECK(std::abs(fit.coefficients.sum()) <= 1e-9);
    }
}

TEST_CASE("fit_svr: auto gamma, subsampling, determinism and permutation invariance") {
    Rng rng(7);
    const auto V = random_matrix(rng, 300, 6);
    Eigen::VectorXd R(300);
    for (Eigen::Index i = 0; i < 300; ++i) R[i] = V(i, 0) * V(i, 1) + std::abs(V(i, 2));

    CHECK(auto_gamma(V) == doctest::Approx(1.0 / (6.0 * ((V.array() - V.mean()).square().sum() / V.size()))));

    SvrConfig cfg;
    cfg.subsample_cap = 100;
    const auto sub = fit_svr(V, R, cfg);
    CHECK(sub.rows_used == 100);
    const auto again = fit_svr(V, R, cfg);
    CHECK(sub.model.dual_coeffs == again.model.dual_coeffs);
    CHECK(sub.model.bias == again.model.bias);

    const Eigen::MatrixXd V2 = V.topRows(120);
    const Eigen::VectorXd R2 = R.head(120);
    cfg.subsample_cap = 2000;
    cfg.gamma = auto_gamma(V2);
    const auto a = fit_svr(V2, R2, cfg);
    std::vector<Eigen::Index> perm(120);
    for (Eigen::Index i = 0; i < 120; ++i) perm[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span<Eigen::Index>(perm));
    Eigen::MatrixXd V3(120, 6);
    Eigen::VectorXd R3(120);
    for (Eigen::Index i = 0; i < 120; ++i) {
        V3.row(i) = V2.row(perm[static_cast<std::size_t>(i)]);
        R3[i] = R2[perm[static_cast<std::size_t>(i)]];
    }
    const auto b = fit_svr(V3, R3, cfg);
    const auto grid = random_matrix(rng, 50, 6);
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        Eigen::RowVectorXd g = grid.row(i);
        const std::span<const double> x(g.data(), 6);
        CHECK(std::abs(predict_svr(a.model, x) - predict_svr(b.model, x)) <= 1e-3);
    }
}

TEST_CASE("fit_svr: contract errors") {
    CHECK_THROWS_AS(fit_svr(Eigen::MatrixXd::Ones(1, 6), Eigen::VectorXd::Ones(1)), ContractError);
    CHECK_THROWS_AS(fit_svr(Eigen::MatrixXd::Ones(4, 6), Eigen::VectorXd::Ones(3)), DimensionError);
}

// ------------------------------------------------------------------ mlp

TEST_CASE("mlp: initialization shapes and scale") {
    MlpConfig cfg;
    cfg.seed = 3;
    const auto m = init_mlp(6, cfg);
    REQUIRE(m.layer_count() == 6);
    CHECK(m.weights[0].rows() == 50);
    CHECK(m.weights[0].cols() == 6);
    for (int l = 1; l < 5; ++l) CHECK(m.weights[static_cast<std::size_t>(l)].rows() == 50);
    CHECK(m.weights[5].rows() == 1);
    CHECK(m.weights[5].cols() == 50);
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(m.weights[l].rows() + m.weights[l].cols()));
        CHECK(m.weights[l].cwiseAbs().maxCoeff() <= limit);
        CHECK(m.biases[l].isZero());
    }
    CHECK(m.parameter_count() == 6 * 50 + 50 + 4 * (50 * 50 + 50) + 50 + 1);
    const auto same = init_mlp(6, cfg);
    for (std::size_t l = 0; l < m.layer_count(); ++l) CHECK(m.weights[l] == same.weights[l]);
}

TEST_CASE("adam: zero gradient leaves every weight unchanged") {
    MlpConfig cfg;
    cfg.hidden = {4};
    auto m = init_mlp(3, cfg);
    const auto before = m;
    MlpGradients g;
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        g.weights.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
    }
    AdamOptimizer adam(m, 1e-3);
    adam.step(m, g);
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        CHECK(m.weights[l] == before.weights[l]);
        CHECK(m.biases[l] == before.biases[l]);
    }

    // targets matched exactly: the batch gradient itself is zero
    Eigen::MatrixXd V(2, 3);
    V << 1, 2, 3, -1, 0, 2;
    Eigen::VectorXd R(2);
    for (int i = 0; i < 2; ++i) {
        Eigen::RowVectorXd row = V.row(i);
        double out;
        mlp_forward(m, std::span<const double>(row.data(), 3), 1, std::span<double>(&out, 1));
        R[i] = out;
    }
    const auto grads = mlp_loss_gradients(m, V, R);
    CHECK(grads.loss == 0.0);
    const auto kept = m;
    adam.step(m, grads);
    for (std::size_t l = 0; l < m.layer_count(); ++l) CHECK(m.weights[l] == kept.weights[l]);
}

TEST_CASE("adam: single weight hand case moves w from 0 to lr") {
    MlpModel m;
    m.activation = Activation::identity;
    m.weights.push_back(Eigen::MatrixXd::Zero(1, 1));
    m.biases.push_back(Eigen::VectorXd::Zero(1));
    Eigen::MatrixXd V(1, 1);
    V << 1.0;
    Eigen::VectorXd R(1);
    R << 1.0;
    const auto g = mlp_loss_gradients(m, V, R);
    CHECK(g.weights[0](0, 0) == -1.0);
    AdamOptimizer adam(m, 0.001);
    adam.step(m, g);
    // m_hat = -1, v_hat = 1: w = 0 - lr * (-1) / (1 + eps)
    const double expected = 0.0 - (0.001 * -1.0) / (1.0 + 1e-8);
    CHECK(m.weights[0](0, 0) == expected);
    CHECK(std::abs(m.weights[0](0, 0) - 0.001) <= 1e-10);
}

TEST_CASE("mlp: analytic gradients match central finite differences") {
    Rng rng(8);
    for (int trial = 0; trial < 6; ++trial) {
        MlpConfig cfg;
        cfg.seed = rng.next();
        cfg.activation = trial % 2 ? Activation::identity : Activation::relu;
        cfg.hidden.clear();
        const int layers = 1 + static_cast<int>(rng.index(4));
        for (int l = 0; l < layers; ++l) cfg.hidden.push_back(2 + static_cast<int>(rng.index(9)));
        auto m = init_mlp(6, cfg);
        for (auto& b : m.biases)
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.1 * rng.normal();
        const auto V = random_matrix(rng, 3, 6);
        const auto R = random_vector(rng, 3);
        const auto g = mlp_loss_gradients(m, V, R);
        const auto fd = oracle::finite_difference(m, V, R, 1e-5);
        double worst = 0.0;
        auto compare = [&](double a, double n) {
            const double scale = std::max(std::abs(a), std::abs(n));
            if (scale < 1e-7) return;
            worst = std::max(worst, std::abs(a - n) / scale);
        };
        for (std::size_t l = 0; l < m.layer_count(); ++l) {
            for (Eigen::Index k = 0; k < g.weights[l].size(); ++k) compare(g.weights[l].data()[k], fd.weights[l].data()[k]);
            for (Eigen::Index k = 0; k < g.biases[l].size(); ++k) compare(g.biases[l][k], fd.biases[l][k]);
        }
        CHECK(worst <= 1e-4);
        CHECK(g.loss == doctest::Approx(mlp_loss(m, V, R)).epsilon(1e-14));
    }
}

TEST_CASE("mlp: identity activation collapses to one affine map") {
    MlpConfig cfg;
    cfg.activation = Activation::identity;
    cfg.seed = 9;
    auto m = init_mlp(6, cfg);
    Rng rng(10);
    for (auto& b : m.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.normal();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(6, 6);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        c = m.weights[l] * c + m.biases[l];
        A = m.weights[l] * A;
    }
    for (int t = 0; t < 200; ++t) {
        const auto x = random_vector(rng, 6);
        const double collapsed = (A * x)[0] + c[0];
        CHECK(std::abs(predict_mlp(m, std::span<const double>(x.data(), 6)) - collapsed) <= 1e-8);
        CHECK(std::abs(oracle::network_value(m, x) - collapsed) <= 1e-8);
    }
}

TEST_CASE("mlp: batched forward equals single-sample forward bit-exactly") {
    MlpConfig cfg;
    cfg.seed = 11;
    const auto m = init_mlp(6, cfg);
    Rng rng(12);
    const std::size_t n = 203;
    std::vector<double> in(n * 6);
    for (auto& v : in) v = rng.normal();
    std::vector<double> batch(n);
    mlp_forward(m, in, n, batch);
    for (std::size_t i = 0; i < n; ++i) {
        const double single = predict_mlp(m, std::span<const double>(in.data() + i * 6, 6));
        CHECK(single == batch[i]);
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(in.data() + i * 6, 6);
        CHECK(single == doctest::Approx(oracle::network_value(m, x)).epsilon(1e-12));
    }
}

TEST_CASE("fit_mlp: linearly realizable data with identity activation") {
    Rng rng(13);
    const auto V = random_matrix(rng, 256, 6);
    const auto w = random_vector(rng, 6);
    const Eigen::VectorXd R = V * w + Eigen::VectorXd::Constant(256, 0.5);
    MlpConfig cfg;
    cfg.activation = Activation::identity;
    cfg.epochs = 200;
    cfg.seed = 14;
    const auto fit = fit_mlp(V, R, cfg);
    CHECK(fit.epochs == 200);
    CHECK(fit.final_loss < 1e-4 * fit.initial_loss);

    const auto again = fit_mlp(V, R, cfg);
    for (std::size_t l = 0; l < fit.model.layer_count(); ++l) CHECK(fit.model.weights[l] == again.model.weights[l]);
}

TEST_CASE("fit_mlp: divergence aborts with diagnostics") {
    Eigen::MatrixXd V = Eigen::MatrixXd::Ones(10, 6);
    Eigen::VectorXd R = Eigen::VectorXd::Constant(10, 1e200);
    MlpConfig cfg;
    cfg.epochs = 3;
    try {
        fit_mlp(V, R, cfg);
        FAIL("expected divergence");
    } catch (const NumericError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epoch") != std::string::npos);
        CHECK(msg.find("batch") != std::string::npos);
        CHECK(msg.find("loss") != std::string::npos);
    }
}

// ------------------------------------------------------------------ model

TEST_CASE("predict: lsq with a unit theta returns the standardized feature") {
    ErdModel m;
    m.kind = RegressorKind::lsq;
    LinearModel lin;
    lin.theta = Eigen::VectorXd::Zero(6);
    lin.theta[0] = 1.0;
    m.payload = lin;
    m.stats.means = {2, 0, 0, 0, 0, 0};
    m.stats.stddevs = {4, 1, 1, 1, 1, 1};
    FeatureVector v;
    v.values = {10, 3, 3, 3, 3, 3};
    CHECK(predict(m, v) == 2.0);
    CHECK_THROWS_AS(predict(m, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST_CASE("predict: nn with a zero output layer returns its bias") {
    auto m = small_nn_model(3);
    auto& net = std::get<MlpModel>(m.payload);
    net.weights.back().setZero();
    net.biases.back()[0] = -4.25;
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        FeatureVector v;
        for (auto& x : v.values) x = rng.normal() * 100;
        CHECK(predict(m, v) == -4.25);
    }
}

TEST_CASE("predict_batch equals looped single predictions for every kind") {
    Rng rng(5);
    std::vector<FeatureArray> rows(1000);
    for (auto& r : rows)
        for (auto& x : r) x = rng.normal() * 3;

    std::vector<ErdModel> models;
    models.push_back(small_nn_model(6));
    {
        ErdModel m;
        m.kind = RegressorKind::lsq;
        m.payload = LinearModel{random_vector(rng, 6)};
        m.stats = unit_stats();
        models.push_back(m);
    }
    {
        const auto V = random_matrix(rng, 60, 6);
        const auto R = random_vector(rng, 60);
        ErdModel m;
        m.kind = RegressorKind::svr;
        m.payload = fit_svr(V, R).model;
        m.stats = unit_stats();
        models.push_back(m);
    }
    for (const auto& m : models) {
        const auto batch = predict_batch(m, rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            FeatureVector v;
            v.values = rows[i];
            CHECK(batch[i] == predict(m, v));
        }
    }
}

TEST_CASE("model files: round trip and error reporting") {
    Rng rng(7);
    std::vector<ErdModel> models;
    models.push_back(small_nn_model(8));
    {
        ErdModel m;
        m.kind = RegressorKind::lsq;
        m.payload = LinearModel{random_vector(rng, 6)};
        m.stats = small_nn_model(9).stats;
        m.idw.neighbors = 7;
        m.metadata["note"] = "x";
        models.push_back(m);
    }
    {
        ErdModel m;
        m.kind = RegressorKind::svr;
        m.payload = fit_svr(random_matrix(rng, 40, 6), random_vector(rng, 40)).model;
        m.stats = unit_stats();
        models.push_back(m);
    }
    const auto dir = testing::scratch_dir("model_files");
    for (const auto& m : models) {
        const auto bytes = serialize_model(m);
        save_model(m, dir / "m.slnm");
        const auto loaded = load_model(dir / "m.slnm");
        CHECK(serialize_model(loaded) == bytes);
        CHECK(loaded.kind == m.kind);
        CHECK(loaded.stats == m.stats);
        CHECK(loaded.idw == m.idw);
        CHECK(loaded.metadata == m.metadata);
        FeatureVector v;
        for (auto& x : v.values) x = rng.normal();
        CHECK(predict(loaded, v) == predict(m, v));

        CHECK(std::memcmp(bytes.data(), "SLNM", 4) == 0);
        CHECK(bytes[4] == 1);
        CHECK(bytes[8] == static_cast<std::uint8_t>(m.kind));

        auto corrupt = bytes;
        corrupt[corrupt.size() - 12] ^= 0x40;
        try {
            deserialize_model(corrupt);
            FAIL("expected checksum error");
        } catch (const ModelFileError& e) {
            CHECK(e.kind() == ModelFileError::Kind::checksum);
        }

        auto restamp = [](std::vector<std::uint8_t> b) {
            b.resize(b.size() - 4);
            const std::uint32_t c = crc32(b);
            for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(c >> (8 * i)));
            return b;
        };
        auto newer = bytes;
        newer[4] = 2;
        try {
            deserialize_model(restamp(newer));
            FAIL("expected version error");
        } catch (const ModelFileError& e) {
            CHECK(e.kind() == ModelFileError::Kind::version_mismatch);
            const std::string msg = e.what();
            CHECK(msg.find('1') != std::string::npos);
            CHECK(msg.find('2') != std::string::npos);
        }

        auto other = bytes;
        other[8] = static_cast<std::uint8_t>(m.kind == RegressorKind::nn ? 1 : 3);
        try {
            deserialize_model(restamp(other));
            FAIL("expected kind error");
        } catch (const ModelFileError& e) {
            CHECK(e.kind() == ModelFileError::Kind::kind_mismatch);
        }

        auto magic = bytes;
        magic[0] = 'X';
        try {
            deserialize_model(magic);
            FAIL("expected magic error");
        } catch (const ModelFileError& e) {
            CHECK(e.kind() == ModelFileError::Kind::bad_magic);
        }
    }
    CHECK_THROWS_AS(load_model(dir / "missing.slnm"), IoError);
}

TEST_CASE("model: kind names and payload validation") {
    CHECK(regressor_from_string("svr") == RegressorKind::svr);
    try {
        regressor_from_string("bogus");
        FAIL("expected error");
    } catch (const ContractError& e) {
        const std::string msg = e.what();
        for (const char* k : {"lsq", "svr", "nn"}) CHECK(msg.find(k) != std::string::npos);
    }
    ErdModel m;
    m.kind = RegressorKind::svr;
    m.payload = LinearModel{Eigen::VectorXd::Zero(6)};
    CHECK_THROWS_AS(m.validate(), ContractError);
}
