#include "agora/rl_forecast.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace agora;
using namespace agora::forecast;

namespace {

History history_of(const std::vector<double>& xs) {
    History h(xs.size());
    for (double x : xs) {
        h.push(x);
    }
    return h;
}

std::vector<double> ramp(int n, double start, double slope) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = start + slope * i;
    }
    return xs;
}

}  // namespace

TEST_CASE("state and action encodings") {
    for (int i = 0; i < 27; ++i) {
        REQUIRE(State::from_index(i).index() == i);
        REQUIRE(Action::from_index(i).index() == i);
    }
    CHECK(State{2, 1, 0}.index() == 21);
    CHECK(Action{Tool::TrendFollow, 0, 1}.index() == 19);
}

TEST_CASE("lag menu") {
    const SimConfig c;
    CHECK(lag_days(0, c) == 5);
    CHECK(lag_days(1, c) == 21);
    CHECK(lag_days(2, c) == 63);
}

TEST_CASE("technical forecasts") {
    const std::vector<double> flat(70, 100.0);
    for (auto tool : {Tool::MeanRevert, Tool::Average, Tool::TrendFollow}) {
        for (int lag : {5, 21, 63}) {
            CHECK(technical_forecast(tool, lag, flat, 17) == doctest::Approx(100.0).epsilon(1e-14));
        }
    }

    const auto line = ramp(30, 80.0, 1.0);
    CHECK(technical_forecast(Tool::TrendFollow, 21, line, 5) == doctest::Approx(line.back() + 5.0).epsilon(1e-12));

    const std::vector<double> w{90, 100, 110, 100, 100};
    CHECK(technical_forecast(Tool::Average, 5, w, 3) == doctest::Approx(100.0));

    // mean reversion covers tau / lag of the gap to the window mean
    const std::vector<double> m{100, 100, 100, 100, 110};
    CHECK(technical_forecast(Tool::MeanRevert, 5, m, 2) == doctest::Approx(110.0 + (102.0 - 110.0) * 0.4));
    CHECK(technical_forecast(Tool::MeanRevert, 5, m, 50) == doctest::Approx(102.0));

    // look-back capped at the available history
    CHECK(technical_forecast(Tool::Average, 63, std::vector<double>{4.0, 6.0}, 5) == 5.0);
    // a steep decline is floored
    CHECK(technical_forecast(Tool::TrendFollow, 5, ramp(5, 10.0, -2.0), 100) == 0.01);
}

TEST_CASE("blend") {
    for (int level = 0; level < 3; ++level) {
        CHECK(blend(97.0, 130.0, 0.0, level) == 97.0);
    }
    CHECK(blend(97.0, 130.0, 1.0, 1) == 130.0);
    CHECK(blend(97.0, 130.0, 1.0, 2) == 130.0);
    CHECK(blend(100.0, 110.0, 0.5, 0) == doctest::Approx(102.5));
    CHECK(blend(100.0, 110.0, 0.5, 2) == doctest::Approx(107.5));
    CHECK(blend(100.0, 110.0, 0.8, 2) == doctest::Approx(110.0));
}

TEST_CASE("relative volatility") {
    const std::vector<double> p{1, 2, 3, 4, 5, 100};
    CHECK(relative_volatility(p, 3) == doctest::Approx(sample_std(std::vector<double>{4, 5, 100}) / 100.0));
    CHECK(relative_volatility(std::vector<double>(10, 50.0), 5) == 0.0);
}

TEST_CASE("observe_state") {
    const std::vector<double> zeros(30, 0.0);
    const History flat = history_of(zeros);
    CHECK(observe_state(0.0, zeros, 0.0, flat, 0.0, flat) == State{1, 1, 1});

    std::vector<double> long_hist;
    for (int i = 0; i < 30; ++i) {
        long_hist.push_back(0.01 + 0.001 * i);
    }
    // above 90% of its trailing values
    const double high = long_hist[27] + 1e-6;
    CHECK(observe_state(high, long_hist, 0.0, flat, 0.0, flat).long_vol == 2);

    std::vector<double> gaps;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 0.005);
    for (int i = 0; i < 60; ++i) {
        gaps.push_back(z(rng));
    }
    CHECK(observe_state(0.0, zeros, 0.0, flat, 0.10, history_of(gaps)).gap == 2);
    CHECK(observe_state(0.0, zeros, 0.0, flat, -0.10, history_of(gaps)).gap == 0);
}

TEST_CASE("candidates enumerate every tool, lag and weight") {
    SimConfig c;
    AgentParams params;
    params.reflexivity = 0.4;
    params.horizon = 7;
    const auto prices = ramp(80, 90.0, 0.25);
    const double valuation = 104.0;
    const auto cands = candidate_forecasts(prices, valuation, params, c);
    for (int a = 0; a < kActionCount; ++a) {
        const auto act = Action::from_index(a);
        const double tech = technical_forecast(act.tool, lag_days(act.lag, c), prices, params.horizon);
        const double weights[3] = {0.2, 0.4, 0.6};
        const double want = weights[act.weight] * valuation + (1.0 - weights[act.weight]) * tech;
        REQUIRE(cands[static_cast<std::size_t>(a)] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("property: forecasts stay positive") {
    SimConfig c;
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 0.2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> prices{100.0};
        for (int t = 0; t < 80; ++t) {
            prices.push_back(prices.back() * std::exp(z(rng)));
        }
        AgentParams params;
        params.reflexivity = u(rng);
        params.horizon = 5 + static_cast<int>(u(rng) * 121);
        const auto cands = candidate_forecasts(prices, prices.back() * (0.5 + u(rng)), params, c);
        for (double f : cands) {
            REQUIRE(f > 0.0);
        }
    }
}

TEST_CASE("property: hindsight_best is the exhaustive argmin") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> tick(90, 110);
    for (int trial = 0; trial < 2000; ++trial) {
        Candidates cands{};
        for (auto& x : cands) {
            x = tick(rng);
        }
        const double realized = tick(rng) + 0.5 * (trial % 2);
        const int best = hindsight_best(cands, realized);
        for (int a = 0; a < kActionCount; ++a) {
            const double e = std::abs(cands[static_cast<std::size_t>(a)] - realized);
            const double eb = std::abs(cands[static_cast<std::size_t>(best)] - realized);
            REQUIRE(eb <= e);
            if (a < best) {
                REQUIRE(e > eb);
            }
        }
    }
}

TEST_CASE("forecast reward") {
    const auto h = history_of({1, 2, 3, 4, 5, 6});
    CHECK(reward(0.5, h) == 4);
    CHECK(reward(7.0, h) == -4);
    CHECK(reward(3.5, h) == -1);
}

TEST_CASE("learner resolution") {
    AgentParams params;
    params.memory = 10;
    Learner learner(params);
    Pending p;
    p.state = 5;
    p.action = 3;
    p.forecast = 101.0;
    for (int a = 0; a < kActionCount; ++a) {
        p.candidates[static_cast<std::size_t>(a)] = 90.0 + a;
    }

    // first resolution only seeds the error history
    const auto first = learner.resolve(p, 100.0, 0.1);
    CHECK_FALSE(first.updated);
    CHECK(first.best == 10);
    CHECK(first.abs_error == 1.0);
    CHECK(learner.policy == PolicyTable(kStateCount, kActionCount));

    // error 1 sits above half of {1, 0.5}: reward -1 penalises the taken action
    learner.errors.push(0.5);
    const auto second = learner.resolve(p, 100.0, 0.1);
    CHECK(second.updated);
    CHECK(second.reward == -1);
    CHECK(learner.policy.at(5, 3) < 1.0 / 27);
    CHECK(learner.policy.max_row_error() < 1e-12);

    // the smallest error so far earns +4 and reinforces the hindsight best
    p.forecast = 100.1;
    const auto third = learner.resolve(p, 100.0, 0.1);
    CHECK(third.reward == 4);
    CHECK(learner.policy.at(5, 10) > 1.0 / 27);

    Learner frozen(params);
    frozen.errors.push(2.0);
    frozen.resolve(p, 100.0, 0.0);
    CHECK(frozen.policy == PolicyTable(kStateCount, kActionCount));
}
