#include "agora/config.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace agora;

namespace {

std::vector<std::uint64_t> draws(RngStream rng, int n) {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(rng.next_u64());
    }
    return out;
}

std::string rejection(SimConfig c) {
    try {
        validate(c);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("defaults carry the published constants") {
    const SimConfig c;
    CHECK(c.year_len == 286);
    CHECK(c.month_len == 21);
    CHECK(c.week_len == 5);
    CHECK(c.init_price == 100.0);
    CHECK(c.broker_fee == 0.001);
    CHECK(c.riskfree_annual == 0.01);
    CHECK(c.dividend_annual == 0.02);
    CHECK(c.learning_phase == 1000);
    CHECK(c.crash_threshold == 0.20);
}

TEST_CASE("scale presets") {
    const auto paper = preset_config(Scale::Paper);
    CHECK(paper.n_agents == 500);
    CHECK(paper.n_stocks == 1);
    CHECK(paper.n_steps == 2875);
    CHECK(paper.n_runs == 20);
    CHECK(paper.learning_phase == 1000);
    CHECK_NOTHROW(validate(paper));

    const auto desk = preset_config(Scale::Desk);
    CHECK(desk.n_agents == 100);
    CHECK(desk.n_stocks == 1);
    CHECK(desk.n_steps == 500);
    CHECK(desk.n_runs == 5);
    CHECK(desk.learning_phase == 300);
    CHECK_NOTHROW(validate(desk));

    CHECK(scale_from_string("paper") == Scale::Paper);
    CHECK_THROWS_AS(scale_from_string("huge"), ConfigError);
}

TEST_CASE("validate names the violated invariant") {
    SimConfig one;
    one.n_agents = 1;
    CHECK(rejection(one).find("n_agents") != std::string::npos);

    SimConfig short_run;
    short_run.n_steps = 100;  // 100 < 2*5 + 6*21
    CHECK(rejection(short_run).find("n_steps") != std::string::npos);

    SimConfig edge;
    edge.n_steps = 2 * 5 + 6 * 21;
    CHECK(rejection(edge).empty());
    edge.n_steps -= 1;
    CHECK_FALSE(rejection(edge).empty());

    SimConfig fee;
    fee.broker_fee = 1.0;
    CHECK(rejection(fee).find("broker_fee") != std::string::npos);

    SimConfig price;
    price.init_price = 0.0;
    CHECK(rejection(price).find("init_price") != std::string::npos);

    SimConfig stocks;
    stocks.n_stocks = 0;
    CHECK_FALSE(rejection(stocks).empty());

    SimConfig p;
    p.scenario.fraction = 1.5;
    CHECK(rejection(p).find("scenario_p") != std::string::npos);

    SimConfig zeta;
    zeta.scenario.zeta = 0.0;
    CHECK(rejection(zeta).find("scenario_zeta") != std::string::npos);
}

TEST_CASE("rng streams are keyed by (seed, domain, index)") {
    const auto a = draws(rng_stream(42, StreamDomain::AgentDecision, 7), 64);
    CHECK(a == draws(rng_stream(42, StreamDomain::AgentDecision, 7), 64));
    CHECK(a != draws(rng_stream(42, StreamDomain::AgentDecision, 8), 64));
    CHECK(draws(rng_stream(42, StreamDomain::Fundamental, 0), 64) !=
          draws(rng_stream(43, StreamDomain::Fundamental, 0), 64));
    CHECK(a != draws(rng_stream(42, StreamDomain::AgentInit, 7), 64));
}

TEST_CASE("rng helpers stay in range") {
    auto rng = rng_stream(1, StreamDomain::Analytics, 0);
    std::vector<int> hits(6, 0);
    for (int i = 0; i < 60000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const long k = rng.uniform_int(2, 7);
        REQUIRE(k >= 2);
        REQUIRE(k <= 7);
        ++hits[static_cast<std::size_t>(k - 2)];
    }
    for (int h : hits) {
        CHECK(std::abs(h - 10000) < 500);
    }
    CHECK(rng.uniform_int(3, 3) == 3);

    double s = 0.0;
    double ss = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(1.0, 2.0);
        s += x;
        ss += x * x;
    }
    const double m = s / n;
    CHECK(m == doctest::Approx(1.0).epsilon(0.03));
    CHECK(std::sqrt(ss / n - m * m) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("configuration file: keys, comments, errors") {
    const auto path = std::filesystem::temp_directory_path() / "agora_test_config.cfg";
    {
        std::ofstream out(path);
        out << "# desk tweaks\n"
               "n_agents = 40   # inline comment\n"
               "\n"
               "broker_fee=0.002\n"
               "scenario = herd-worst\n"
               "scenario_p = 0.4\n"
               "master_seed = 9\n";
    }
    const auto c = load_config_file(path);
    CHECK(c.n_agents == 40);
    CHECK(c.broker_fee == 0.002);
    CHECK(c.scenario.kind == ScenarioKind::HerdWorst);
    CHECK(c.scenario.fraction == 0.4);
    CHECK(c.master_seed == 9);

    {
        std::ofstream out(path);
        out << "no_such_key = 1\n";
    }
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
    {
        std::ofstream out(path);
        out << "n_agents = many\n";
    }
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
    {
        std::ofstream out(path);
        out << "n_agents 5\n";
    }
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
}

TEST_CASE("config_to_map covers every field and round-trips") {
    SimConfig c = preset_config(Scale::Desk);
    c.master_seed = 123456789012345ULL;
    c.scenario = {ScenarioKind::NoiseTraders, 0.6, 1.5};
    c.coint_noise = 0.0123456789;
    const auto map = config_to_map(c);
    SimConfig back;
    for (const auto& [k, v] : map) {
        apply_setting(back, k, v);
    }
    CHECK(back == c);
    CHECK(map.count("year_len") == 1);
    CHECK(map.count("scenario") == 1);
    CHECK(map.count("scenario_zeta") == 1);
}

TEST_CASE("scenario names") {
    for (auto kind : {ScenarioKind::Baseline, ScenarioKind::LearnRateFraction, ScenarioKind::LearnRateGlobal,
                      ScenarioKind::HerdBest, ScenarioKind::HerdWorst, ScenarioKind::NoiseTraders}) {
        CHECK(scenario_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(scenario_kind_from_string("panic"), ConfigError);
}
