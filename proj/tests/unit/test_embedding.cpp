#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "spade4/embedding.hpp"

using namespace spade4;

TEST_CASE("estimate_derivative uses forward, central, backward stencils", "[embedding]") {
    TimeSeries s;
    s.values = {0, 1, 4};
    const auto d = estimate_derivative(s);
    CHECK(d == std::vector<double>{1, 2, 3});

    TimeSeries constant;
    constant.values = std::vector<double>(10, 0.7);
    for (double v : estimate_derivative(constant)) CHECK(v == 0.0);

    TimeSeries tiny;
    tiny.values = {1.0};
    CHECK_THROWS_AS(estimate_derivative(tiny), InsufficientDataError);
}

TEST_CASE("central differences are exact on quadratics", "[embedding]") {
    TimeSeries s;
    for (int t = 0; t <= 20; ++t) s.values.push_back(static_cast<double>(t) * t);
    const auto d = estimate_derivative(s);
    for (std::size_t k = 1; k + 1 < s.size(); ++k)
        CHECK_THAT(d[k], Catch::Matchers::WithinAbs(2.0 * static_cast<double>(k), 1e-12));
}

TEST_CASE("estimate_derivative respects the sampling step", "[embedding]") {
    TimeSeries s;
    s.dt = 0.5;
    s.values = {0, 1, 2};
    const auto d = estimate_derivative(s);
    CHECK(d == std::vector<double>{2, 2, 2});
}

TEST_CASE("smooth_derivative follows the shifted window recipe", "[embedding]") {
    // s = 1 reduces to a left shift with zero fill
    const std::vector<double> d{2, 4, 6};
    const auto s1 = smooth_derivative(d, 1);
    CHECK(s1 == std::vector<double>{4, 6, 0});

    const auto s2 = smooth_derivative(d, 2);
    CHECK(s2 == std::vector<double>{3, 5, 3});

    // interior entries of a constant vector with a full window stay put
    const std::vector<double> c(20, 1.5);
    const auto sc = smooth_derivative(c, 5);
    for (std::size_t k = 4; k + 1 < c.size(); ++k)
        CHECK_THAT(sc[k], Catch::Matchers::WithinRel(1.5, 1e-14));

    CHECK_THROWS_AS(smooth_derivative(d, 0), ValidationError);
}

TEST_CASE("centered smoothing keeps a constant vector fixed at the interior", "[embedding]") {
    const std::vector<double> c(15, 2.0);
    const auto sc = smooth_derivative(c, 5, SmoothWindow::centered);
    for (std::size_t k = 2; k + 2 < c.size(); ++k)
        CHECK_THAT(sc[k], Catch::Matchers::WithinRel(2.0, 1e-14));
    // no forward shift: a linear ramp stays centered
    std::vector<double> ramp(9);
    for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = static_cast<double>(k);
    const auto sr = smooth_derivative(ramp, 3, SmoothWindow::centered);
    CHECK_THAT(sr[4], Catch::Matchers::WithinRel(4.0, 1e-14));
}

TEST_CASE("build_delay_dataset lays out newest-first rows", "[embedding]") {
    TimeSeries s;
    s.values = {1, 2, 3, 4, 5};
    std::vector<double> targets{10, 20, 30, 40, 50};
    EmbeddingConfig cfg;
    cfg.p = 3;
    const auto ds = build_delay_dataset(s, cfg, targets);
    REQUIRE(ds.rows() == 3);  // m - p + 1
    CHECK(ds.first_k == 3);
    CHECK(ds.inputs(0, 0) == 3.0);
    CHECK(ds.inputs(0, 1) == 2.0);
    CHECK(ds.inputs(0, 2) == 1.0);
    CHECK(ds.inputs(2, 0) == 5.0);
    CHECK(ds.inputs(2, 2) == 3.0);
    CHECK(ds.targets(0) == 30.0);
    CHECK(ds.targets(2) == 50.0);
}

TEST_CASE("build_delay_dataset boundary shapes", "[embedding]") {
    TimeSeries s;
    s.values = {1, 2, 3, 4};
    std::vector<double> targets{1, 2, 3, 4};

    EmbeddingConfig scalar;
    scalar.p = 1;
    const auto ds1 = build_delay_dataset(s, scalar, targets);
    CHECK(ds1.rows() == 4);
    CHECK(ds1.inputs(2, 0) == 3.0);

    EmbeddingConfig whole;
    whole.p = 4;
    const auto ds4 = build_delay_dataset(s, whole, targets);
    CHECK(ds4.rows() == 1);
    CHECK(ds4.targets(0) == 4.0);

    EmbeddingConfig too_big;
    too_big.p = 5;
    CHECK_THROWS_AS(build_delay_dataset(s, too_big, targets), InsufficientDataError);

    std::vector<double> short_targets{1, 2};
    CHECK_THROWS_AS(build_delay_dataset(s, scalar, short_targets), ValidationError);
}

TEST_CASE("build_delay_dataset supports wider delays", "[embedding]") {
    TimeSeries s;
    for (int k = 1; k <= 8; ++k) s.values.push_back(k);
    std::vector<double> targets(8, 0.0);
    EmbeddingConfig cfg;
    cfg.p = 3;
    cfg.tau = 2;
    const auto ds = build_delay_dataset(s, cfg, targets);
    REQUIRE(ds.rows() == 4);  // m - (p-1)*tau
    CHECK(ds.inputs(0, 0) == 5.0);
    CHECK(ds.inputs(0, 1) == 3.0);
    CHECK(ds.inputs(0, 2) == 1.0);
}
