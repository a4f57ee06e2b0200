#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "spade4/benchmarks.hpp"
#include "spade4/presets.hpp"

using namespace spade4;

namespace {

const TimeSeries& synthetic_series() {
    static const TimeSeries s =
        simulate_sueir_observable(synthetic_sueir_params(), synthetic_initial_state(), 180);
    return s;
}

FitSpec quick_spec(ModelKind kind, int restarts, std::uint64_t seed) {
    FitSpec spec;
    spec.model_kind = kind;
    spec.target_kind = TargetKind::active;
    spec.restarts = restarts;
    spec.e0_multipliers = {0};
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("planted SuEIR data is recovered by its own model class", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 125);
    const FitSpec spec = quick_spec(ModelKind::sueir, 60, 7);
    const BenchmarkFit fit = fit_benchmark(train, spec, 1.0);

    const double rmse = std::sqrt(fit.train_sse / static_cast<double>(train.size()));
    CHECK(rmse < 1e-4);

    // the fitted trajectory reproduces the held-out week as well
    const ForecastResult fc = predict_benchmark(fit, train, 1.0, 7);
    const std::span<const double> truth(synthetic_series().values.data() + 125, 7);
    CHECK(relative_error(truth, fc.values) < 1e-3);
}

TEST_CASE("fit is deterministic for a fixed seed", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 60);
    const FitSpec spec = quick_spec(ModelKind::seir, 1, 99);
    const BenchmarkFit a = fit_benchmark(train, spec, 1.0);
    const BenchmarkFit b = fit_benchmark(train, spec, 1.0);
    CHECK(a.train_sse == b.train_sse);
    CHECK(std::get<double>(a.beta) == std::get<double>(b.beta));
    CHECK(a.sigma == b.sigma);
}

TEST_CASE("best-of-restarts error is non-increasing in the restart count", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 60);
    double prev = std::numeric_limits<double>::infinity();
    for (int restarts : {1, 2, 4, 8}) {
        FitSpec spec = quick_spec(ModelKind::seir, restarts, 5);
        const BenchmarkFit fit = fit_benchmark(train, spec, 1.0);
        CHECK(fit.train_sse <= prev * (1.0 + 1e-12));
        prev = fit.train_sse;
    }
}

TEST_CASE("the E(0) choice is the grid argmin", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 70);
    FitSpec spec = quick_spec(ModelKind::seir, 8, 3);
    spec.e0_multipliers = {0, 1, 5, 10};
    const BenchmarkFit fit = fit_benchmark(train, spec, 1.0);
    REQUIRE(fit.e0_grid_sse.size() == 4);
    double best = std::numeric_limits<double>::infinity();
    double best_e0 = -1.0;
    for (const auto& cand : fit.e0_grid_sse) {
        if (cand.sse < best) {
            best = cand.sse;
            best_e0 = cand.e0;
        }
    }
    CHECK(fit.e0 == best_e0);
    CHECK(fit.train_sse == best);
}

TEST_CASE("fitted parameters stay positive and the trajectory conserves mass", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 60);
    const FitSpec spec = quick_spec(ModelKind::seir, 10, 21);
    const BenchmarkFit fit = fit_benchmark(train, spec, 1.0);
    CHECK(fit.sigma > 0.0);
    CHECK(fit.gamma > 0.0);
    CHECK(std::get<double>(fit.beta) >= 0.0);

    const auto traj = integrate(SeirRhs{fit.seir_params()}, fit.initial_state(), 0.1,
                                static_cast<double>(train.size() - 1));
    const double total0 = traj.front().total();
    for (const auto& x : traj)
        CHECK_THAT(x.total(), Catch::Matchers::WithinRel(total0, 1e-9));
}

TEST_CASE("fit_benchmark validates its inputs", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 60);
    FitSpec spec = quick_spec(ModelKind::seir, 1, 1);
    CHECK_THROWS_AS(fit_benchmark(train, spec, 0.0), ValidationError);
    CHECK_THROWS_AS(fit_benchmark(head(synthetic_series(), 3), spec, 1.0),
                    InsufficientDataError);
    spec.restarts = 0;
    CHECK_THROWS_AS(fit_benchmark(train, spec, 1.0), ValidationError);
}

TEST_CASE("constant-rate data keeps the fitted beta(t) nearly flat", "[benchmarks]") {
    // generate from a fixed-beta SEIR and fit the time-varying variant
    SeirParams gen{0.25, 0.2, 0.1, 1.0};
    CompartmentState init{1.0 - 2e-4, 1e-4, 1e-4, 0.0, 0.0};
    TimeSeries data;
    data.t0 = 0;
    data.dt = 1.0;
    integrate_observe(SeirRhs{gen}, init, 0.01, 60 * 100, 100,
                      [&](const CompartmentState& x) { data.values.push_back(x.I); });

    FitSpec spec = quick_spec(ModelKind::seir_beta_t, 30, 17);
    spec.q_grid = {1, 2, 3};
    const BenchmarkFit fit = fit_seir_beta_t(data, spec, 1.0);
    REQUIRE(std::holds_alternative<TransmissionBasis>(fit.beta));
    const auto& basis = std::get<TransmissionBasis>(fit.beta);
    CHECK(fit.q >= 1);

    double mean = 0.0;
    const int samples = 61;
    for (int t = 0; t < samples; ++t) mean += beta_of_t(basis, static_cast<double>(t));
    mean /= samples;
    double var = 0.0;
    for (int t = 0; t < samples; ++t) {
        const double d = beta_of_t(basis, static_cast<double>(t)) - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / samples);
    CHECK(sd < 0.1 * std::abs(mean));
}

TEST_CASE("q_grid with a single entry skips selection", "[benchmarks]") {
    const TimeSeries train = head(synthetic_series(), 40);
    FitSpec spec = quick_spec(ModelKind::seir_beta_t, 5, 2);
    spec.q_grid = {1};
    const BenchmarkFit fit = fit_benchmark(train, spec, 1.0);
    CHECK(fit.q == 1);
    CHECK(std::get<TransmissionBasis>(fit.beta).order() == 1);
}

TEST_CASE("predict_benchmark propagates a zero-infection initial state", "[benchmarks]") {
    BenchmarkFit fit;
    fit.model_kind = ModelKind::seir;
    fit.target_kind = TargetKind::active;
    fit.beta = 0.3;
    fit.sigma = 0.2;
    fit.gamma = 0.1;
    fit.e0 = 0.0;
    fit.i0 = 0.0;
    fit.population = 1.0;

    TimeSeries train;
    train.values.assign(10, 0.0);
    const ForecastResult fc = predict_benchmark(fit, train, 1.0, 7);
    REQUIRE(fc.values.size() == 7);
    for (double v : fc.values) CHECK(v == 0.0);

    CHECK_THROWS_AS(predict_benchmark(fit, train, 1.0, 0), ValidationError);
}

TEST_CASE("cumulative targets fit I + R", "[benchmarks]") {
    // cumulative counterpart of the planted test: fit the running total
    TimeSeries cumulative;
    cumulative.t0 = 0;
    cumulative.dt = 1.0;
    const SueirParams p = synthetic_sueir_params();
    integrate_observe(SueirRhs{p}, synthetic_initial_state(), 0.01, 80 * 100, 100,
                      [&](const CompartmentState& x) {
                          cumulative.values.push_back((x.I + x.R) / p.population);
                      });
    FitSpec spec = quick_spec(ModelKind::sueir, 40, 13);
    spec.target_kind = TargetKind::cumulative;
    const BenchmarkFit fit = fit_benchmark(cumulative, spec, 1.0);
    const double rmse = std::sqrt(fit.train_sse / static_cast<double>(cumulative.size()));
    CHECK(rmse < 1e-4);
}
