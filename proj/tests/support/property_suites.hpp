#pragma once

// Randomized invariant suites shared by the unit tests and the acceptance
// harness. Every suite runs at least `cases` randomized instances and
// reports the first failure in `detail`.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spade4/embedding.hpp"
#include "spade4/ode.hpp"
#include "spade4/rfm.hpp"
#include "spade4/spade4.hpp"

namespace spade4_test {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    std::string detail;

    bool passed() const { return failures == 0; }
};

// Conservation: SEIR component sums vanish to rounding; SuEIR sums equal
// (mu - 1) * sigma * E.
inline SuiteResult suite_conservation(int cases = 200) {
    SuiteResult res{"conservation", cases, 0, ""};
    std::mt19937_64 eng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> rate(0.0, 2.0);
    for (int i = 0; i < cases; ++i) {
        const double P = 1.0 + unit(eng) * 1e6;
        spade4::CompartmentState x{unit(eng) * P, unit(eng) * P, unit(eng) * P, unit(eng) * P,
                                   unit(eng) * 100.0};
        spade4::SeirParams sp{rate(eng), rate(eng) + 1e-3, rate(eng) + 1e-3, P};
        const auto rs = spade4::seir_rhs(x, sp);
        const double flux = std::abs(rs.dS) + std::abs(rs.dE) + std::abs(rs.dI) + std::abs(rs.dR);
        const double sum = rs.dS + rs.dE + rs.dI + rs.dR;
        if (std::abs(sum) > 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, flux)) {
            ++res.failures;
            if (res.detail.empty()) res.detail = "seir sum " + std::to_string(sum);
            continue;
        }
        spade4::SueirParams up{rate(eng), rate(eng) + 1e-3, rate(eng) + 1e-3, unit(eng), P};
        const auto ru = spade4::sueir_rhs(x, up);
        const double usum = ru.dS + ru.dE + ru.dI + ru.dR;
        const double expected = (up.mu - 1.0) * up.sigma * x.E;
        const double uflux = std::abs(ru.dS) + std::abs(ru.dE) + std::abs(ru.dI) + std::abs(ru.dR);
        if (std::abs(usum - expected) >
            64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, uflux)) {
            ++res.failures;
            if (res.detail.empty())
                res.detail = "sueir sum " + std::to_string(usum) + " vs " + std::to_string(expected);
        }
    }
    return res;
}

// Legendre: Bonnet recurrence residual vanishes and |P_k| <= 1 on [-1, 1]
// for k <= 10.
inline SuiteResult suite_legendre(int cases = 200) {
    SuiteResult res{"legendre_recurrence", cases, 0, ""};
    std::mt19937_64 eng(102);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_int_distribution<int> uk(1, 9);
    for (int i = 0; i < cases; ++i) {
        const double x = ux(eng);
        const int k = uk(eng);
        const double pk = spade4::legendre_eval(k, x);
        const double pkm1 = spade4::legendre_eval(k - 1, x);
        const double pkp1 = spade4::legendre_eval(k + 1, x);
        const double residual = (k + 1.0) * pkp1 - ((2.0 * k + 1.0) * x * pk - k * pkm1);
        bool ok = std::abs(residual) < 1e-12;
        for (int kk = 0; kk <= 10; ++kk)
            ok = ok && std::abs(spade4::legendre_eval(kk, x)) <= 1.0 + 1e-12;
        if (!ok) {
            ++res.failures;
            if (res.detail.empty())
                res.detail = "k=" + std::to_string(k) + " x=" + std::to_string(x);
        }
    }
    return res;
}

// Smoothing filter linearity in both window variants.
inline SuiteResult suite_smoothing_linearity(int cases = 200) {
    SuiteResult res{"smoothing_linearity", cases, 0, ""};
    std::mt19937_64 eng(103);
    std::uniform_real_distribution<double> uv(-5.0, 5.0);
    std::uniform_int_distribution<int> ulen(1, 60);
    std::uniform_int_distribution<int> us(1, 20);
    std::uniform_int_distribution<int> uw(0, 1);
    for (int i = 0; i < cases; ++i) {
        const int len = ulen(eng);
        const int s = us(eng);
        const auto window = uw(eng) ? spade4::SmoothWindow::centered : spade4::SmoothWindow::shifted;
        std::vector<double> a(len), b(len);
        for (double& v : a) v = uv(eng);
        for (double& v : b) v = uv(eng);
        const double alpha = uv(eng);
        const double beta = uv(eng);
        std::vector<double> combo(len);
        for (int k = 0; k < len; ++k) combo[k] = alpha * a[k] + beta * b[k];
        const auto sa = spade4::smooth_derivative(a, s, window);
        const auto sb = spade4::smooth_derivative(b, s, window);
        const auto sc = spade4::smooth_derivative(combo, s, window);
        bool ok = true;
        for (int k = 0; k < len; ++k) {
            const double expected = alpha * sa[k] + beta * sb[k];
            if (std::abs(sc[k] - expected) > 1e-11 * std::max(1.0, std::abs(expected))) ok = false;
        }
        if (!ok) {
            ++res.failures;
            if (res.detail.empty())
                res.detail = "len=" + std::to_string(len) + " s=" + std::to_string(s);
        }
    }
    return res;
}

// Delay dataset shape and per-row reversal identity.
inline SuiteResult suite_delay_shapes(int cases = 200) {
    SuiteResult res{"delay_dataset_shapes", cases, 0, ""};
    std::mt19937_64 eng(104);
    std::uniform_real_distribution<double> uv(0.0, 1.0);
    std::uniform_int_distribution<int> up(1, 12);
    std::uniform_int_distribution<int> utau(1, 3);
    for (int i = 0; i < cases; ++i) {
        const int p = up(eng);
        const int tau = utau(eng);
        std::uniform_int_distribution<int> um(p * tau, p * tau + 60);
        const int m = um(eng);
        spade4::TimeSeries s;
        s.values.resize(m);
        for (double& v : s.values) v = uv(eng);
        std::vector<double> targets(m);
        for (double& v : targets) v = uv(eng);
        spade4::EmbeddingConfig cfg;
        cfg.p = p;
        cfg.tau = tau;
        const auto ds = spade4::build_delay_dataset(s, cfg, targets);
        const long expected_rows = m - static_cast<long>(p - 1) * tau;
        bool ok = ds.rows() == expected_rows && ds.inputs.cols() == p;
        if (ok && tau == 1) ok = ds.rows() == m - p + 1;
        for (long r = 0; ok && r < ds.rows(); ++r) {
            const long k = static_cast<long>(p - 1) * tau + r;
            for (int j = 0; j < p; ++j)
                if (ds.inputs(r, p - 1 - j) != s.values[k - static_cast<long>(p - 1 - j) * tau])
                    ok = false;
            if (ds.targets(r) != targets[k]) ok = false;
        }
        if (!ok) {
            ++res.failures;
            if (res.detail.empty())
                res.detail = "m=" + std::to_string(m) + " p=" + std::to_string(p) +
                             " tau=" + std::to_string(tau);
        }
    }
    return res;
}

// KKT certificate of the coordinate-descent solution on random instances.
// lambda stays above 1e-3 of the zero-solution threshold: far below that the
// problem degenerates toward underdetermined least squares, where cyclic
// descent converges too slowly to certify.
inline SuiteResult suite_kkt(int cases = 200) {
    SuiteResult res{"lasso_kkt", cases, 0, ""};
    std::mt19937_64 eng(105);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> un(4, 14);
    std::uniform_int_distribution<int> uN(4, 28);
    std::uniform_real_distribution<double> ulog(-3.0, -0.3);
    for (int i = 0; i < cases; ++i) {
        const int n = un(eng);
        const int N = uN(eng);
        Eigen::MatrixXd A(n, N);
        Eigen::VectorXd z(n);
        for (long r = 0; r < n; ++r) {
            z(r) = gauss(eng);
            for (long c = 0; c < N; ++c) A(r, c) = gauss(eng);
        }
        const double lambda_max = 2.0 * (A.transpose() * z).cwiseAbs().maxCoeff();
        const double lambda = lambda_max * std::pow(10.0, ulog(eng));
        const auto fit = spade4::lasso_solve(A, z, lambda);
        if (!(fit.kkt_residual <= 10.0 * 1e-10) || !fit.converged) {
            ++res.failures;
            if (res.detail.empty()) {
                std::ostringstream os;
                os << "n=" << n << " N=" << N << " kkt=" << fit.kkt_residual
                   << " converged=" << fit.converged;
                res.detail = os.str();
            }
        }
    }
    return res;
}

// predict(model, T1) is a prefix of predict(model, T2) for T1 < T2.
inline SuiteResult suite_rollout_prefix(int cases = 200) {
    SuiteResult res{"rollout_prefix", cases, 0, ""};
    std::mt19937_64 eng(106);
    std::uniform_real_distribution<double> uv(0.0, 0.5);
    std::uniform_int_distribution<int> up(2, 6);
    std::uniform_int_distribution<int> uT(2, 12);
    std::uniform_int_distribution<int> uN(3, 20);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < cases; ++i) {
        const int p = up(eng);
        const int N = uN(eng);
        spade4::Spade4Model model;
        model.cfg.p = p;
        model.basis = spade4::sample_basis(p, N, eng());
        model.coeffs.c = Eigen::VectorXd::Zero(N);
        for (long j = 0; j < N; ++j)
            if (uv(eng) < 0.2) model.coeffs.c(j) = 0.02 * gauss(eng);
        model.coeffs.nnz = spade4::count_nonzero(model.coeffs.c);
        model.train_tail.resize(static_cast<std::size_t>(p));
        for (double& v : model.train_tail) v = uv(eng);
        model.dt = 1.0;
        model.last_train_day = 10.0;

        const int t2 = uT(eng);
        std::uniform_int_distribution<int> ut1(1, t2 - 1);
        const int t1 = ut1(eng);
        const auto f1 = spade4::predict(model, t1);
        const auto f2 = spade4::predict(model, t2);
        bool ok = f1.values.size() == static_cast<std::size_t>(t1) &&
                  f2.values.size() == static_cast<std::size_t>(t2);
        for (int k = 0; ok && k < t1; ++k)
            if (f1.values[static_cast<std::size_t>(k)] != f2.values[static_cast<std::size_t>(k)])
                ok = false;
        if (!ok) {
            ++res.failures;
            if (res.detail.empty())
                res.detail = "p=" + std::to_string(p) + " T1=" + std::to_string(t1) +
                             " T2=" + std::to_string(t2);
        }
    }
    return res;
}

inline std::vector<SuiteResult> run_all_property_suites(int cases = 200) {
    return {suite_conservation(cases),      suite_legendre(cases),
            suite_smoothing_linearity(cases), suite_delay_shapes(cases),
            suite_kkt(cases),               suite_rollout_prefix(cases)};
}

}  // namespace spade4_test
