#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <variant>
#include <vector>

#include "spade4/errors.hpp"
#include "spade4/nelder_mead.hpp"
#include "spade4/ode.hpp"
#include "spade4/random.hpp"
#include "spade4/spade4.hpp"
#include "spade4/timeseries.hpp"

namespace spade4 {

enum class ModelKind { seir, sueir, seir_beta_t };
enum class TargetKind { active, cumulative };  // fit against I(t) or I(t) + R(t)

struct FitSpec {
    ModelKind model_kind = ModelKind::seir;
    TargetKind target_kind = TargetKind::active;
    int restarts = 100;
    std::vector<double> e0_multipliers = {0, 1, 5, 10, 15, 20, 25, 50, 80};
    std::vector<int> q_grid = {1, 2, 3, 4, 5, 6};  // SEIR_beta_t only
    std::uint64_t seed = 0;
    NelderMeadOptions nm{};
    double fit_step = 0.2;      // RK4 step while evaluating the training loss
    double predict_step = 0.01; // RK4 step for reported trajectories

    void check() const {
        if (restarts < 1) throw ValidationError("fit spec requires restarts >= 1");
        for (double k : e0_multipliers)
            if (k < 0.0) throw ValidationError("E(0) multipliers must be >= 0");
        if (!(fit_step > 0.0) || !(predict_step > 0.0))
            throw ValidationError("fit spec requires positive integration steps");
    }
};

struct E0Candidate {
    double e0 = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

struct BenchmarkFit {
    ModelKind model_kind = ModelKind::seir;
    TargetKind target_kind = TargetKind::active;
    std::variant<double, TransmissionBasis> beta = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    double mu = 1.0;  // meaningful for SuEIR only
    double e0 = 0.0;
    double i0 = 0.0;
    double population = 0.0;
    double train_sse = std::numeric_limits<double>::infinity();
    int q = -1;  // chosen Legendre order, SEIR_beta_t only
    long train_len = 0;
    long t0 = 0;
    double dt = 1.0;
    std::vector<E0Candidate> e0_grid_sse;  // best SSE per E(0) candidate

    CompartmentState initial_state() const {
        return {population - e0 - i0, e0, i0, 0.0, static_cast<double>(t0)};
    }
    SeirParams seir_params() const { return {beta, sigma, gamma, population}; }
    SueirParams sueir_params() const {
        return {std::get<double>(beta), sigma, gamma, mu, population};
    }
};

namespace detail {

inline double target_value(const CompartmentState& x, TargetKind kind) {
    return kind == TargetKind::active ? x.I : x.I + x.R;
}

// Sum of squared deviations between the integrated model and the observed
// series, sampled at the observation days. Divergence scores +inf.
template <typename Rhs>
double training_sse(Rhs&& rhs, const CompartmentState& init, const TimeSeries& train,
                    TargetKind target, double step) {
    const long m = static_cast<long>(train.size());
    const long per = steps_for(train.dt, step);
    double sse = 0.0;
    long idx = 0;
    try {
        integrate_observe(rhs, init, step, (m - 1) * per, per, [&](const CompartmentState& x) {
            const double d = target_value(x, target) - train.values[static_cast<std::size_t>(idx++)];
            sse += d * d;
        });
    } catch (const DivergenceError&) {
        return std::numeric_limits<double>::infinity();
    }
    return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
}

constexpr double kLogRateLo = -6.907755278982137;  // ln 1e-3
constexpr double kLogRateHi = 2.302585092994046;   // ln 10
constexpr double kMaxLogRate = 6.907755278982137;  // ln 1e3, reject beyond

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double u) {
    const double v = std::clamp(u, 1e-9, 1.0 - 1e-9);
    return std::log(v / (1.0 - v));
}

struct SeirPack {
    // theta = [ln beta, ln sigma, ln gamma]
    static SeirParams unpack(const Eigen::VectorXd& th, double population) {
        return {std::exp(th(0)), std::exp(th(1)), std::exp(th(2)), population};
    }
};

struct SueirPack {
    // theta = [ln beta, ln sigma, ln gamma, logit mu]
    static SueirParams unpack(const Eigen::VectorXd& th, double population) {
        return {std::exp(th(0)), std::exp(th(1)), std::exp(th(2)), logistic(th(3)), population};
    }
};

inline bool rates_sane(const Eigen::VectorXd& th, long n_rates) {
    if (!th.allFinite()) return false;
    for (long i = 0; i < n_rates; ++i)
        if (th(i) > kMaxLogRate) return false;
    return true;
}

// Initial prevalence for the fitted model. Noisy observations can start at or
// below zero, but a compartmental model seeded with I(0) <= 0 and E(0) <= 0
// can never leave the non-positive cone, so the seed is floored at a tiny
// positive fraction of the data scale.
inline double initial_prevalence(const TimeSeries& train) {
    const double first = train.values.front();
    if (first > 0.0) return first;
    double scale = 0.0;
    for (double v : train.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        throw ValidationError("fit_benchmark: series carries no signal");
    return 1e-6 * scale;
}

struct RestartBest {
    double sse = std::numeric_limits<double>::infinity();
    Eigen::VectorXd theta;
};

// Runs `restarts` simplex searches with seeds keyed by (seed, stream, restart
// index) so a longer restart sequence extends a shorter one.
template <typename LossFn, typename InitFn>
RestartBest best_of_restarts(LossFn&& loss, InitFn&& random_start, int restarts,
                             const NelderMeadOptions& nm) {
    RestartBest best;
    for (int r = 0; r < restarts; ++r) {
        const Eigen::VectorXd x0 = random_start(r);
        const NelderMeadResult res = nelder_mead(loss, x0, nm);
        if (res.fmin < best.sse) {
            best.sse = res.fmin;
            best.theta = res.x;
        }
    }
    return best;
}

}  // namespace detail

// Least-squares fit of a fixed-rate compartmental model: for every E(0)
// candidate k*I0 and every random initialization, minimizes the squared
// training error of the integrated target with a simplex search. Rates are
// optimized in log space; mu goes through a logistic.
inline BenchmarkFit fit_benchmark(const TimeSeries& train, const FitSpec& spec, double population);

inline BenchmarkFit fit_seir_beta_t(const TimeSeries& train, const FitSpec& spec, double population);

namespace detail {

template <typename Pack, typename MakeRhs>
BenchmarkFit fit_fixed_rate_model(const TimeSeries& train, const FitSpec& spec,
                                  double population, long dim, MakeRhs&& make_rhs,
                                  std::uint64_t stream_tag) {
    train.check();
    spec.check();
    if (!(population > 0.0))
        throw ValidationError("fit_benchmark: population must be positive");
    if (static_cast<long>(train.size()) < dim + 1)
        throw InsufficientDataError("fit_benchmark: series shorter than free parameters + 1");

    const double i0 = detail::initial_prevalence(train);
    BenchmarkFit best;
    best.model_kind = spec.model_kind;
    best.target_kind = spec.target_kind;
    best.population = population;
    best.i0 = i0;
    best.train_len = static_cast<long>(train.size());
    best.t0 = train.t0;
    best.dt = train.dt;

    for (std::size_t gi = 0; gi < spec.e0_multipliers.size(); ++gi) {
        const double e0 = spec.e0_multipliers[gi] * i0;
        E0Candidate cand{e0, std::numeric_limits<double>::infinity()};
        if (population - e0 - i0 > 0.0) {
            const CompartmentState init{population - e0 - i0, e0, i0, 0.0,
                                        static_cast<double>(train.t0)};
            auto loss = [&](const Eigen::VectorXd& th) -> double {
                if (!rates_sane(th, 3)) return std::numeric_limits<double>::infinity();
                const auto params = Pack::unpack(th, population);
                return training_sse(make_rhs(params), init, train, spec.target_kind, spec.fit_step);
            };
            auto start = [&](int r) {
                auto eng = make_engine(derive_seed(spec.seed, {stream_tag, gi, static_cast<std::uint64_t>(r)}));
                std::uniform_real_distribution<double> lograte(kLogRateLo, kLogRateHi);
                std::uniform_real_distribution<double> unit(0.0, 1.0);
                Eigen::VectorXd th(dim);
                for (long i = 0; i < 3; ++i) th(i) = lograte(eng);
                if (dim == 4) th(3) = logit(unit(eng));
                return th;
            };
            const RestartBest rb = best_of_restarts(loss, start, spec.restarts, spec.nm);
            cand.sse = rb.sse;
            if (rb.sse < best.train_sse) {
                const auto params = Pack::unpack(rb.theta, population);
                best.train_sse = rb.sse;
                best.e0 = e0;
                best.beta = params.beta;
                best.sigma = params.sigma;
                best.gamma = params.gamma;
                if constexpr (std::is_same_v<std::decay_t<decltype(params)>, SueirParams>)
                    best.mu = params.mu;
            }
        }
        best.e0_grid_sse.push_back(cand);
    }
    if (!std::isfinite(best.train_sse))
        throw FitError("fit_benchmark: every restart diverged");
    return best;
}

}  // namespace detail

inline BenchmarkFit fit_benchmark(const TimeSeries& train, const FitSpec& spec,
                                  double population) {
    switch (spec.model_kind) {
        case ModelKind::seir:
            return detail::fit_fixed_rate_model<detail::SeirPack>(
                train, spec, population, 3,
                [](const SeirParams& p) { return SeirRhs{p}; }, 0x73656972ULL);
        case ModelKind::sueir:
            return detail::fit_fixed_rate_model<detail::SueirPack>(
                train, spec, population, 4,
                [](const SueirParams& p) { return SueirRhs{p}; }, 0x75656972ULL);
        case ModelKind::seir_beta_t:
            return fit_seir_beta_t(train, spec, population);
    }
    throw ValidationError("fit_benchmark: unknown model kind");
}

// SEIR with beta(t) in a Legendre basis over the training span. The order q
// is chosen from q_grid by BIC with q + 3 free parameters.
inline BenchmarkFit fit_seir_beta_t(const TimeSeries& train, const FitSpec& spec,
                                    double population) {
    train.check();
    spec.check();
    if (!(population > 0.0))
        throw ValidationError("fit_benchmark: population must be positive");
    if (spec.q_grid.empty())
        throw ValidationError("fit_seir_beta_t: empty q grid");
    int q_max = 0;
    for (int q : spec.q_grid) {
        if (q < 0) throw ValidationError("fit_seir_beta_t: q must be >= 0");
        q_max = std::max(q_max, q);
    }
    const long m = static_cast<long>(train.size());
    if (m < q_max + 3 + 1)
        throw InsufficientDataError("fit_seir_beta_t: series shorter than free parameters + 1");

    const double i0 = detail::initial_prevalence(train);
    const double a = static_cast<double>(train.t0);
    const double b = train.day(train.size() - 1);
    const double n = static_cast<double>(m);

    BenchmarkFit best;
    best.model_kind = ModelKind::seir_beta_t;
    best.target_kind = spec.target_kind;
    best.population = population;
    best.i0 = i0;
    best.train_len = m;
    best.t0 = train.t0;
    best.dt = train.dt;
    double best_bic = std::numeric_limits<double>::infinity();

    for (int q : spec.q_grid) {
        const long dim = q + 3;  // xi_0..xi_q, ln sigma, ln gamma
        BenchmarkFit fit_q = best;  // metadata copy
        fit_q.q = q;
        for (std::size_t gi = 0; gi < spec.e0_multipliers.size(); ++gi) {
            const double e0 = spec.e0_multipliers[gi] * i0;
            E0Candidate cand{e0, std::numeric_limits<double>::infinity()};
            if (population - e0 - i0 > 0.0) {
                const CompartmentState init{population - e0 - i0, e0, i0, 0.0, a};
                auto unpack = [&](const Eigen::VectorXd& th) {
                    TransmissionBasis basis;
                    basis.coeffs.assign(th.data(), th.data() + q + 1);
                    basis.t_min = a;
                    basis.t_max = b;
                    return SeirParams{std::move(basis), std::exp(th(q + 1)), std::exp(th(q + 2)),
                                      population};
                };
                auto loss = [&](const Eigen::VectorXd& th) -> double {
                    if (!std::isfinite(th.sum()) || th(q + 1) > detail::kMaxLogRate ||
                        th(q + 2) > detail::kMaxLogRate)
                        return std::numeric_limits<double>::infinity();
                    return detail::training_sse(SeirRhs{unpack(th)}, init, train,
                                                spec.target_kind, spec.fit_step);
                };
                auto start = [&](int r) {
                    auto eng = make_engine(derive_seed(
                        spec.seed, {0x62657461ULL, static_cast<std::uint64_t>(q), gi,
                                    static_cast<std::uint64_t>(r)}));
                    std::uniform_real_distribution<double> lograte(detail::kLogRateLo,
                                                                   detail::kLogRateHi);
                    Eigen::VectorXd th(dim);
                    const double xi0 = std::exp(lograte(eng));
                    th(0) = xi0;
                    std::uniform_real_distribution<double> spreadxi(-0.5 * xi0, 0.5 * xi0);
                    for (int k = 1; k <= q; ++k) th(k) = spreadxi(eng);
                    th(q + 1) = lograte(eng);
                    th(q + 2) = lograte(eng);
                    return th;
                };
                const detail::RestartBest rb =
                    detail::best_of_restarts(loss, start, spec.restarts, spec.nm);
                cand.sse = rb.sse;
                if (rb.sse < fit_q.train_sse) {
                    const SeirParams params = unpack(rb.theta);
                    fit_q.train_sse = rb.sse;
                    fit_q.e0 = e0;
                    fit_q.beta = params.beta;
                    fit_q.sigma = params.sigma;
                    fit_q.gamma = params.gamma;
                }
            }
            fit_q.e0_grid_sse.push_back(cand);
        }
        if (!std::isfinite(fit_q.train_sse)) continue;
        const double bic = n * std::log(std::max(fit_q.train_sse, 1e-30) / n) +
                           static_cast<double>(q + 3) * std::log(n);
        if (bic < best_bic) {
            best_bic = bic;
            best = std::move(fit_q);
        }
    }
    if (!std::isfinite(best.train_sse))
        throw FitError("fit_seir_beta_t: every restart diverged");
    return best;
}

// Integrates the fitted model from its fitted initial state through the
// training span plus T further days; returns the last T daily target values.
inline ForecastResult predict_benchmark(const BenchmarkFit& fit, const TimeSeries& train,
                                        double population, int horizon, double step = 0.01) {
    train.check();
    if (horizon < 1) throw ValidationError("predict_benchmark: horizon must be >= 1");
    if (!(population > 0.0))
        throw ValidationError("predict_benchmark: population must be positive");

    const long m = static_cast<long>(train.size());
    const long per_sample = detail::steps_for(train.dt, step);
    const long total_steps = (m - 1 + static_cast<long>(horizon)) * per_sample;

    CompartmentState init = fit.initial_state();
    init.S = population - fit.e0 - fit.i0;

    std::vector<double> daily;
    daily.reserve(static_cast<std::size_t>(m + horizon));
    auto collect = [&](const CompartmentState& x) {
        daily.push_back(detail::target_value(x, fit.target_kind));
    };
    if (fit.model_kind == ModelKind::sueir) {
        integrate_observe(SueirRhs{fit.sueir_params()}, init, step, total_steps, per_sample,
                          collect);
    } else {
        integrate_observe(SeirRhs{fit.seir_params()}, init, step, total_steps, per_sample,
                          collect);
    }

    ForecastResult out;
    out.dt = train.dt;
    out.first_day = train.last_day() + train.dt;
    out.values.assign(daily.end() - horizon, daily.end());
    return out;
}

}  // namespace spade4
