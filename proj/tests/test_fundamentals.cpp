#include "agora/fundamentals.hpp"

#include <doctest.h>

#include <cmath>

using namespace agora;

namespace {

double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

double sample_var(const std::vector<double>& xs) {
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(xs.size() - 1);
}

FundamentalSeries flat_series(std::size_t n, double value) {
    FundamentalSeries f;
    f.values.assign(n, value);
    f.jumps.assign(n, false);
    return f;
}

}  // namespace

TEST_CASE("degenerate parameters give a constant series at the initial price") {
    SimConfig c;
    c.fundamental_vol = 0.0;
    c.jump_prob = 0.0;
    const auto f = generate_fundamental(c, 0, 500);
    REQUIRE(f.size() == 500);
    for (double v : f.values) {
        REQUIRE(v == 100.0);
    }
}

TEST_CASE("series is determined by seed and stock") {
    SimConfig c;
    const auto a = generate_fundamental(c, 0, 300);
    CHECK(a.values == generate_fundamental(c, 0, 300).values);
    CHECK(a.values != generate_fundamental(c, 1, 300).values);
    c.master_seed += 1;
    CHECK(a.values != generate_fundamental(c, 0, 300).values);
    CHECK(a.values.front() == c.init_price);
}

TEST_CASE("log-increment volatility matches the generator outside jump steps") {
    SimConfig c;
    const auto f = generate_fundamental(c, 0, 2875);
    std::vector<double> increments;
    int jumps = 0;
    for (std::size_t t = 1; t < f.size(); ++t) {
        if (f.jumps[t]) {
            ++jumps;
            continue;
        }
        increments.push_back(std::log(f.values[t] / f.values[t - 1]));
    }
    const double sd = std::sqrt(sample_var(increments));
    CHECK(std::abs(sd - 0.005) < 0.1 * 0.005);
    // 1% jump rate over 2874 increments: expected 28.7, sd ~5.3
    CHECK(jumps > 8);
    CHECK(jumps < 50);
}

TEST_CASE("property: fundamentals and valuations stay positive") {
    SimConfig c;
    c.jump_prob = 0.2;
    c.jump_scale = 0.5;
    for (int stock = 0; stock < 3; ++stock) {
        const auto f = generate_fundamental(c, stock, 3000);
        for (double v : f.values) {
            REQUIRE(v > 0.0);
        }
        auto rng = rng_stream(c.master_seed, StreamDomain::AgentInit, static_cast<std::uint64_t>(stock));
        const auto b = Valuation::build(f, draw_cointegration_rule(c, rng), rng);
        for (double v : b.values()) {
            REQUIRE(v > 0.0);
        }
    }
}

TEST_CASE("cointegrate: identity and bias") {
    const auto f = flat_series(10, 100.0);
    CHECK(cointegrate(f, {0.0, 0, 0.9, 0.0}, 5, 0.0) == 100.0);
    CHECK(cointegrate(f, {0.05, 0, 0.9, 0.0}, 5, 0.0) == doctest::Approx(105.0).epsilon(1e-14));

    SimConfig c;
    const auto g = generate_fundamental(c, 0, 50);
    auto rng = rng_stream(1, StreamDomain::AgentInit, 0);
    const auto v = Valuation::build(g, {0.0, 0, 0.9, 0.0}, rng);
    for (std::size_t t = 0; t < g.size(); ++t) {
        REQUIRE(v.at(t) == g.at(t));
    }
}

TEST_CASE("cointegrate: lag reads the earlier fundamental") {
    FundamentalSeries f;
    for (int t = 0; t < 10; ++t) {
        f.values.push_back(100.0 + t);
        f.jumps.push_back(false);
    }
    const CointegrationRule lagged{0.0, 3, 0.9, 0.0};
    CHECK(cointegrate(f, lagged, 7, 0.0) == 104.0);
    CHECK(cointegrate(f, lagged, 1, 0.0) == 100.0);
}

TEST_CASE("drawn rules respect their ranges") {
    SimConfig c;
    auto rng = rng_stream(3, StreamDomain::AgentInit, 0);
    bool saw_zero_lag = false;
    bool saw_week_lag = false;
    for (int i = 0; i < 2000; ++i) {
        const auto r = draw_cointegration_rule(c, rng);
        REQUIRE(r.bias >= -0.05);
        REQUIRE(r.bias <= 0.05);
        REQUIRE(r.lag >= 0);
        REQUIRE(r.lag <= c.week_len);
        saw_zero_lag = saw_zero_lag || r.lag == 0;
        saw_week_lag = saw_week_lag || r.lag == c.week_len;
        CHECK(r.phi == 0.9);
        CHECK(r.noise_scale == 0.01);
    }
    CHECK(saw_zero_lag);
    CHECK(saw_week_lag);
}

TEST_CASE("long-run log spread is stationary around log(1 + b)") {
    SimConfig c;
    const std::size_t n = 5000;
    const auto f = generate_fundamental(c, 0, n);
    const CointegrationRule rule{0.03, 2, 0.9, 0.01};
    auto rng = rng_stream(11, StreamDomain::AgentInit, 4);
    const auto b = Valuation::build(f, rule, rng);
    std::vector<double> spread;
    for (std::size_t t = static_cast<std::size_t>(rule.lag); t < n; ++t) {
        spread.push_back(std::log(b.at(t)) - std::log(f.at(t - static_cast<std::size_t>(rule.lag))));
    }
    // AR(1) with phi 0.9: stationary variance s^2/(1-phi^2); the mean's
    // standard error inflates by sqrt((1+phi)/(1-phi)).
    const double stat_var = rule.noise_scale * rule.noise_scale / (1.0 - rule.phi * rule.phi);
    const double se = std::sqrt(stat_var / static_cast<double>(spread.size()) * (1.0 + rule.phi) / (1.0 - rule.phi));
    CHECK(std::abs(sample_mean(spread) - std::log1p(rule.bias)) < 3.0 * se);
    CHECK(std::abs(sample_var(spread) / stat_var - 1.0) < 0.25);
}
