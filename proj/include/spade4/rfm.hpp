#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "spade4/errors.hpp"
#include "spade4/random.hpp"

namespace spade4 {

enum class Activation { relu };

// Frozen first layer of the random feature model: column j of `weights` holds
// omega_j ~ N(0, I_p), bias_j ~ U[0, 2*pi).
struct RandomFeatureBasis {
    Eigen::MatrixXd weights;  // p x N
    Eigen::VectorXd biases;   // N
    Activation activation = Activation::relu;
    std::uint64_t seed = 0;

    int input_dim() const { return static_cast<int>(weights.rows()); }
    int feature_count() const { return static_cast<int>(weights.cols()); }
};

inline RandomFeatureBasis sample_basis(int p, int N, std::uint64_t seed) {
    if (p < 1 || N < 1) throw ValidationError("sample_basis requires p >= 1 and N >= 1");
    RandomFeatureBasis basis;
    basis.weights.resize(p, N);
    basis.biases.resize(N);
    basis.seed = seed;
    auto eng = make_engine(seed);
    std::normal_distribution<double> weight(0.0, 1.0);
    std::uniform_real_distribution<double> bias(0.0, 2.0 * std::numbers::pi);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < p; ++i) basis.weights(i, j) = weight(eng);
        basis.biases(j) = bias(eng);
    }
    return basis;
}

// Feature matrix A with entries phi(<h_k, omega_j> + b_j), phi = ReLU.
inline Eigen::MatrixXd feature_matrix(const RandomFeatureBasis& basis,
                                      const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != basis.weights.rows())
        throw ValidationError("feature_matrix: input dimension does not match the basis");
    Eigen::MatrixXd a = inputs * basis.weights;
    a.rowwise() += basis.biases.transpose();
    return a.cwiseMax(0.0);
}

// f(h) = sum_j c_j phi(<h, omega_j> + b_j); used by the forecast rollout.
inline double evaluate_features_dot(const RandomFeatureBasis& basis,
                                    std::span<const double> h, const Eigen::VectorXd& c) {
    if (static_cast<long>(h.size()) != basis.weights.rows() || c.size() != basis.weights.cols())
        throw ValidationError("evaluate_features_dot: dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> hv(h.data(), static_cast<long>(h.size()));
    Eigen::VectorXd pre = basis.weights.transpose() * hv + basis.biases;
    return pre.cwiseMax(0.0).dot(c);
}

struct SparseCoefficients {
    Eigen::VectorXd c;
    double lambda = 0.0;
    int nnz = 0;               // entries with |c_j| > 1e-12
    bool converged = true;
    long sweeps = 0;
    double kkt_residual = 0.0;  // max KKT violation, normalized by column norms
    std::vector<double> objective_trace;  // filled when LassoOptions::track_objective
};

struct LassoOptions {
    double tol = 1e-10;            // max coordinate update per sweep
    long max_iter = 100000;        // sweep budget
    bool half_n_scaling = false;   // fit term becomes ||Ac-z||^2 / (2n)
    bool track_objective = false;
};

inline int count_nonzero(const Eigen::VectorXd& c) {
    int n = 0;
    for (long j = 0; j < c.size(); ++j)
        if (std::abs(c(j)) > 1e-12) ++n;
    return n;
}

// Cyclic coordinate descent with soft thresholding for
//   min ||Ac - z||^2 + lambda ||c||_1            (default)
//   min ||Ac - z||^2 / (2n) + lambda ||c||_1     (half_n_scaling)
// After a full pass, iterates on the current support until it stabilizes,
// then verifies with another full pass.
inline SparseCoefficients lasso_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& z,
                                      double lambda, const LassoOptions& opt = {},
                                      const Eigen::VectorXd* warm_start = nullptr) {
    if (A.rows() != z.size())
        throw ValidationError("lasso_solve: row count of A must match z");
    if (lambda < 0.0) throw ValidationError("lasso_solve: lambda must be >= 0");
    if (!A.allFinite() || !z.allFinite())
        throw ValidationError("lasso_solve: non-finite entries in A or z");

    const long n = A.rows();
    const long N = A.cols();
    const double thresh = opt.half_n_scaling ? static_cast<double>(n) * lambda : 0.5 * lambda;

    SparseCoefficients out;
    out.lambda = lambda;
    Eigen::VectorXd c;
    Eigen::VectorXd r;  // residual z - Ac
    if (warm_start && warm_start->size() == N) {
        c = *warm_start;
        r = z - A * c;
    } else {
        c = Eigen::VectorXd::Zero(N);
        r = z;
    }
    const Eigen::VectorXd colnorm2 = A.colwise().squaredNorm();

    auto soft = [](double u, double t) {
        if (u > t) return u - t;
        if (u < -t) return u + t;
        return 0.0;
    };
    auto objective = [&]() {
        const double fit = r.squaredNorm();
        return (opt.half_n_scaling ? fit / (2.0 * static_cast<double>(n)) : fit) +
               lambda * c.lpNorm<1>();
    };
    auto pass = [&](const std::vector<long>& idx) {
        double max_delta = 0.0;
        for (long j : idx) {
            const double cn = colnorm2(j);
            if (cn <= 0.0) continue;  // zero column: c_j = 0 stays optimal
            const double u = A.col(j).dot(r) + cn * c(j);
            const double cj = soft(u, thresh) / cn;
            const double delta = cj - c(j);
            if (delta != 0.0) {
                r.noalias() -= A.col(j) * delta;
                c(j) = cj;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        return max_delta;
    };

    std::vector<long> all(static_cast<std::size_t>(N));
    std::iota(all.begin(), all.end(), 0L);
    std::vector<long> active;

    long sweeps = 0;
    bool converged = false;
    while (sweeps < opt.max_iter) {
        const double full_delta = pass(all);
        ++sweeps;
        if (opt.track_objective) out.objective_trace.push_back(objective());
        if (full_delta < opt.tol) {
            converged = true;
            break;
        }
        active.clear();
        for (long j = 0; j < N; ++j)
            if (c(j) != 0.0) active.push_back(j);
        while (sweeps < opt.max_iter) {
            const double d = pass(active);
            ++sweeps;
            if (opt.track_objective) out.objective_trace.push_back(objective());
            if (d < opt.tol) break;
        }
    }

    out.c = std::move(c);
    out.nnz = count_nonzero(out.c);
    out.converged = converged;
    out.sweeps = sweeps;

    // KKT residual of the final iterate. grad_j is the fit-term derivative;
    // the bound for active coordinates is |grad_j + lambda sign(c_j)| ~ 0 and
    // for inactive ones |grad_j| <= lambda.
    double worst = 0.0;
    for (long j = 0; j < N; ++j) {
        const double cn = colnorm2(j);
        if (cn <= 0.0) continue;
        double grad = -2.0 * A.col(j).dot(r);  // 2 <A_j, Ac - z>
        if (opt.half_n_scaling) grad /= 2.0 * static_cast<double>(n);
        double excess;
        if (out.c(j) != 0.0) {
            excess = std::abs(grad + lambda * (out.c(j) > 0.0 ? 1.0 : -1.0));
        } else {
            excess = std::max(0.0, std::abs(grad) - lambda);
        }
        worst = std::max(worst, excess / cn);
    }
    out.kkt_residual = worst;
    return out;
}

// BIC = n ln(RSS/n) + nnz ln(n), RSS floored at 1e-30.
inline double bic_score(const Eigen::MatrixXd& A, const Eigen::VectorXd& z,
                        const SparseCoefficients& coeffs) {
    if (A.rows() != z.size() || A.cols() != coeffs.c.size())
        throw ValidationError("bic_score: dimension mismatch");
    const double n = static_cast<double>(A.rows());
    const double rss = std::max((A * coeffs.c - z).squaredNorm(), 1e-30);
    return n * std::log(rss / n) + static_cast<double>(coeffs.nnz) * std::log(n);
}

inline std::vector<double> default_lambda_grid() {
    return {1e-6, 5e-6, 1e-7, 5e-7, 1e-8, 5e-8, 1e-9, 5e-9};
}

// Solves the grid warm-started from large to small lambda and returns the fit
// with the lowest BIC; ties go to the larger (sparser) lambda.
inline SparseCoefficients select_lambda(const Eigen::MatrixXd& A, const Eigen::VectorXd& z,
                                        std::span<const double> grid,
                                        const LassoOptions& opt = {}) {
    if (grid.empty()) throw ValidationError("select_lambda: empty lambda grid");
    std::vector<double> order(grid.begin(), grid.end());
    std::sort(order.begin(), order.end(), std::greater<>());

    SparseCoefficients best;
    double best_bic = std::numeric_limits<double>::infinity();
    Eigen::VectorXd warm;
    for (double lambda : order) {
        SparseCoefficients fit =
            lasso_solve(A, z, lambda, opt, warm.size() == A.cols() ? &warm : nullptr);
        warm = fit.c;
        const double score = bic_score(A, z, fit);
        if (score < best_bic) {
            best_bic = score;
            best = std::move(fit);
        }
    }
    return best;
}

}  // namespace spade4
