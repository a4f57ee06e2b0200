#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "spade4/errors.hpp"

namespace spade4 {

struct NelderMeadOptions {
    int max_iter = 2000;
    double tol = 1e-10;        // simplex spread tolerance
    double initial_step = 0.5;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fmin = std::numeric_limits<double>::infinity();
    int iterations = 0;
    long evals = 0;
    bool converged = false;
};

// Derivative-free simplex search (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). The objective may return +inf for infeasible points.
template <typename F>
NelderMeadResult nelder_mead(F&& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opt = {}) {
    const long n = x0.size();
    if (n < 1) throw ValidationError("nelder_mead: empty start point");

    NelderMeadResult res;
    std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(n) + 1, x0);
    std::vector<double> fs(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i < n; ++i) xs[static_cast<std::size_t>(i) + 1](i) += opt.initial_step;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fs[i] = f(xs[i]);
        ++res.evals;
    }

    std::vector<std::size_t> order(xs.size());
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };

    for (int it = 0; it < opt.max_iter; ++it) {
        sort_simplex();
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];
        res.iterations = it;

        if (!std::isfinite(fs[best])) break;  // nowhere feasible to go

        // spread over function values and vertex coordinates
        double fspread = fs[worst] - fs[best];
        if (!std::isfinite(fspread)) fspread = std::numeric_limits<double>::infinity();
        double xspread = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            xspread = std::max(xspread, (xs[i] - xs[best]).cwiseAbs().maxCoeff());
        if (fspread <= opt.tol * (1.0 + std::abs(fs[best])) && xspread <= opt.tol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (i != worst) centroid += xs[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
        const double fr = f(reflected);
        ++res.evals;
        if (fr < fs[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(expanded);
            ++res.evals;
            if (fe < fr) {
                xs[worst] = expanded;
                fs[worst] = fe;
            } else {
                xs[worst] = reflected;
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[second_worst]) {
            xs[worst] = reflected;
            fs[worst] = fr;
            continue;
        }
        // contraction, outside when the reflected point improved on the worst
        Eigen::VectorXd contracted;
        if (fr < fs[worst]) {
            contracted = centroid + 0.5 * (reflected - centroid);
        } else {
            contracted = centroid + 0.5 * (xs[worst] - centroid);
        }
        const double fc = f(contracted);
        ++res.evals;
        if (fc < std::min(fr, fs[worst])) {
            xs[worst] = contracted;
            fs[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i == best) continue;
            xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
            fs[i] = f(xs[i]);
            ++res.evals;
        }
    }

    sort_simplex();
    res.x = xs[order.front()];
    res.fmin = fs[order.front()];
    return res;
}

}  // namespace spade4
