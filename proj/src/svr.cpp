#include "slads/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "slads/error.hpp"
#include "slads/rng.hpp"

namespace slads {

double auto_gamma(const Eigen::MatrixXd& V) {
    const double count = static_cast<double>(V.size());
    const double mean = V.sum() / count;
    const double var = (V.array() - mean).square().sum() / count;
    const double t = static_cast<double>(V.cols());
    return var > 0.0 ? 1.0 / (t * var) : 1.0 / t;
}

namespace {

constexpr double kTau = 1e-12;

// Variables 0..n-1 are alpha (y = +1), n..2n-1 are alpha^* (y = -1).
class SmoSolver {
public:
    SmoSolver(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, double C, double eps)
        : K_(K), n_(K.rows()), C_(C), alpha_(2 * n_, 0.0), grad_(2 * n_), p_(2 * n_) {
        for (Eigen::Index i = 0; i < n_; ++i) {
            p_[i] = eps - z[i];
            p_[i + n_] = eps + z[i];
        }
        grad_ = p_;
    }

    bool solve(double tol, long max_iter, long& iterations, double& gap) {
        iterations = 0;
        while (iterations < max_iter) {
            Eigen::Index i = -1, j = -1;
            gap = select_working_set(i, j);
            if (gap < tol || j < 0) return true;
            update_pair(i, j);
            ++iterations;
        }
        Eigen::Index i = -1, j = -1;
        gap = select_working_set(i, j);
        return gap < tol;
    }

    double coefficient(Eigen::Index i) const { return alpha_[i] - alpha_[i + n_]; }

    double objective() const {
        double v = 0.0;
        for (Eigen::Index t = 0; t < 2 * n_; ++t) v += alpha_[t] * (grad_[t] + p_[t]);
        return 0.5 * v;
    }

    double bias() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -ub;
        double sum_free = 0.0;
        int free_count = 0;
        for (Eigen::Index t = 0; t < 2 * n_; ++t) {
            const double y = sign(t);
            const double yg = y * grad_[t];
            if (at_upper(t)) {
                if (y < 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (at_lower(t)) {
                if (y > 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++free_count;
                sum_free += yg;
            }
        }
        const double rho = free_count > 0 ? sum_free / free_count : (ub + lb) / 2.0;
        return -rho;
    }

private:
    double sign(Eigen::Index t) const { return t < n_ ? 1.0 : -1.0; }
    bool at_upper(Eigen::Index t) const { return alpha_[t] >= C_; }
    bool at_lower(Eigen::Index t) const { return alpha_[t] <= 0.0; }
    double q(Eigen::Index a, Eigen::Index b) const {
        return sign(a) * sign(b) * K_(a % n_, b % n_);
    }
    double qd(Eigen::Index a) const { return K_(a % n_, a % n_); }

    double select_working_set(Eigen::Index& out_i, Eigen::Index& out_j) const {
        const double inf = std::numeric_limits<double>::infinity();
        double gmax = -inf;
        double gmax2 = -inf;
        Eigen::Index gi = -1;
        for (Eigen::Index t = 0; t < 2 * n_; ++t) {
            if (sign(t) > 0) {
                if (!at_upper(t) && -grad_[t] >= gmax) {
                    gmax = -grad_[t];
                    gi = t;
                }
            } else if (!at_lower(t) && grad_[t] >= gmax) {
                gmax = grad_[t];
                gi = t;
            }
        }
        Eigen::Index gj = -1;
        double best = inf;
        if (gi >= 0) {
            for (Eigen::Index t = 0; t < 2 * n_; ++t) {
                if (sign(t) > 0) {
                    if (at_lower(t)) continue;
                    gmax2 = std::max(gmax2, grad_[t]);
                    const double diff = gmax + grad_[t];
                    if (diff > 0.0) {
                        double quad = qd(gi) + qd(t) - 2.0 * sign(gi) * q(gi, t);
                        if (quad <= 0.0) quad = kTau;
                        const double obj = -(diff * diff) / quad;
                        if (obj <= best) {
                            best = obj;
                            gj = t;
                        }
                    }
                } else {
                    if (at_upper(t)) continue;
                    gmax2 = std::max(gmax2, -grad_[t]);
                    const double diff = gmax - grad_[t];
                    if (diff > 0.0) {
                        double quad = qd(gi) + qd(t) + 2.0 * sign(gi) * q(gi, t);
                        if (quad <= 0.0) quad = kTau;
                        const double obj = -(diff * diff) / quad;
                        if (obj <= best) {
                            best = obj;
                            gj = t;
                        }
                    }
                }
            }
        }
        out_i = gi;
        out_j = gj;
        return gmax + gmax2;
    }

    void update_pair(Eigen::Index i, Eigen::Index j) {
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        const double qij = q(i, j);
        double& ai = alpha_[i];
        double& aj = alpha_[j];
        if (sign(i) != sign(j)) {
            double quad = qd(i) + qd(j) + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > C_) {
                    ai = C_;
                    aj = C_ - diff;
                }
            } else if (aj > C_) {
                aj = C_;
                ai = C_ + diff;
            }
        } else {
            double quad = qd(i) + qd(j) - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C_) {
                if (ai > C_) {
                    ai = C_;
                    aj = sum - C_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > C_) {
                if (aj > C_) {
                    aj = C_;
                    ai = sum - C_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        const double si = sign(i);
        const double sj = sign(j);
        const Eigen::Index ri = i % n_;
        const Eigen::Index rj = j % n_;
        for (Eigen::Index t = 0; t < n_; ++t) {
            // q(t, i) = y_t y_i K(t, i); y_t = +1 for t < n, -1 for the mirrored half.
            const double g = si * K_(t, ri) * di + sj * K_(t, rj) * dj;
            grad_[t] += g;
            grad_[t + n_] -= g;
        }
    }

    const Eigen::MatrixXd& K_;
    Eigen::Index n_;
    double C_;
    std::vector<double> alpha_;
    Eigen::VectorXd grad_;
    Eigen::VectorXd p_;
};

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& V, double gamma) {
    const Eigen::Index n = V.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        K(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double d2 = (V.row(a) - V.row(b)).squaredNorm();
            K(a, b) = K(b, a) = std::exp(-gamma * d2);
        }
    }
    return K;
}

}  // namespace

SvrFit fit_svr(const Eigen::MatrixXd& V_in, const Eigen::VectorXd& R_in, const SvrConfig& config) {
    if (V_in.rows() != R_in.size()) throw DimensionError("fit_svr: feature rows and targets differ in count");
    if (V_in.rows() < 2) throw ContractError("fit_svr needs at least 2 rows");
    if (!(config.C > 0.0) || !(config.epsilon >= 0.0)) throw ContractError("fit_svr: need C > 0 and epsilon >= 0");
    if (!V_in.allFinite() || !R_in.allFinite()) throw NumericError("fit_svr: non-finite input");

    Eigen::MatrixXd V;
    Eigen::VectorXd R;
    const auto n_in = static_cast<std::size_t>(V_in.rows());
    if (config.subsample_cap > 0 && n_in > config.subsample_cap) {
        Rng rng(derive_seed(config.seed, 0x5356u));
        auto rows = sample_without_replacement(n_in, config.subsample_cap, rng);
        std::sort(rows.begin(), rows.end());
        V.resize(static_cast<Eigen::Index>(rows.size()), V_in.cols());
        R.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            V.row(static_cast<Eigen::Index>(k)) = V_in.row(static_cast<Eigen::Index>(rows[k]));
            R[static_cast<Eigen::Index>(k)] = R_in[static_cast<Eigen::Index>(rows[k])];
        }
    } else {
        V = V_in;
        R = R_in;
    }

    SvrFit fit;
    fit.rows_used = static_cast<std::size_t>(V.rows());
    const double gamma = config.gamma > 0.0 ? config.gamma : auto_gamma(V);
    const Eigen::MatrixXd K = rbf_gram(V, gamma);
    SmoSolver solver(K, R, config.C, config.epsilon);
    const long max_iter = static_cast<long>(config.max_passes) * 2 * static_cast<long>(V.rows());
    fit.converged = solver.solve(config.tolerance, max_iter, fit.iterations, fit.kkt_gap);
    fit.dual_objective = solver.objective();

    const Eigen::Index n = V.rows();
    fit.coefficients.resize(n);
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
        fit.coefficients[i] = solver.coefficient(i);
        if (fit.coefficients[i] != 0.0) support.push_back(i);
    }
    if (support.empty()) support.push_back(0);

    SvrModel& m = fit.model;
    m.support_vectors.resize(static_cast<Eigen::Index>(support.size()), V.cols());
    m.dual_coeffs.resize(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        m.support_vectors.row(static_cast<Eigen::Index>(k)) = V.row(support[k]);
        m.dual_coeffs[static_cast<Eigen::Index>(k)] = fit.coefficients[support[k]];
    }
    m.bias = solver.bias();
    m.gamma = gamma;
    m.C = config.C;
    m.epsilon = config.epsilon;
    return fit;
}

double predict_svr(const SvrModel& model, std::span<const double> v) {
    const Eigen::Index t = model.support_vectors.cols();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
        double d2 = 0.0;
        for (Eigen::Index j = 0; j < t; ++j) {
            const double d = v[static_cast<std::size_t>(j)] - model.support_vectors(i, j);
            d2 += d * d;
        }
        acc += model.dual_coeffs[i] * std::exp(-model.gamma * d2);
    }
    return acc + model.bias;
}

}  // namespace slads
