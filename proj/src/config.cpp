#include "agora/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace agora {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) {
        throw ConfigError("invalid configuration: " + what);
    }
}

bool is_rate(double x) { return x >= 0.0 && x < 1.0; }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("malformed value for '" + std::string(key) + "': '" + std::string(text) + "'");
    }
    return value;
}

template <typename T>
std::string format_number(T value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Baseline: return "baseline";
        case ScenarioKind::LearnRateFraction: return "lr-frac";
        case ScenarioKind::LearnRateGlobal: return "lr-global";
        case ScenarioKind::HerdBest: return "herd-best";
        case ScenarioKind::HerdWorst: return "herd-worst";
        case ScenarioKind::NoiseTraders: return "noise";
    }
    return "baseline";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
    for (auto kind : {ScenarioKind::Baseline, ScenarioKind::LearnRateFraction, ScenarioKind::LearnRateGlobal,
                      ScenarioKind::HerdBest, ScenarioKind::HerdWorst, ScenarioKind::NoiseTraders}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

int min_steps(const SimConfig& config) { return 2 * config.week_len + 6 * config.month_len; }

const SimConfig& validate(const SimConfig& c) {
    require(c.n_agents >= 2, "n_agents must be >= 2 (trading needs counterparties)");
    require(c.n_stocks >= 1, "n_stocks must be >= 1");
    require(c.n_runs >= 1, "n_runs must be >= 1");
    require(c.week_len >= 1 && c.month_len >= c.week_len && c.year_len >= c.month_len,
            "calendar must satisfy 1 <= week_len <= month_len <= year_len");
    require(c.n_steps >= min_steps(c),
            "n_steps must be >= 2*week_len + 6*month_len = " + std::to_string(min_steps(c)) +
                " so the memory draw interval is nonempty");
    require(c.learning_phase >= 0, "learning_phase must be >= 0");
    require(std::isfinite(c.init_price) && c.init_price > 0.0, "init_price must be > 0");
    require(is_rate(c.broker_fee), "broker_fee must lie in [0,1)");
    require(is_rate(c.riskfree_annual), "riskfree_annual must lie in [0,1)");
    require(is_rate(c.dividend_annual), "dividend_annual must lie in [0,1)");
    require(is_rate(c.crash_threshold), "crash_threshold must lie in [0,1)");
    require(c.fundamental_vol >= 0.0, "fundamental_vol must be >= 0");
    require(c.jump_prob >= 0.0 && c.jump_prob <= 1.0, "jump_prob must lie in [0,1]");
    require(is_rate(c.jump_scale), "jump_scale must lie in [0,1)");
    require(is_rate(c.coint_bias), "coint_bias must lie in [0,1)");
    require(is_rate(c.coint_phi), "coint_phi must lie in [0,1)");
    require(c.coint_noise >= 0.0, "coint_noise must be >= 0");
    require(c.init_bonds >= 0.0, "init_bonds must be >= 0");
    require(c.init_shares >= 0, "init_shares must be >= 0");
    require(c.direction_threshold >= 0.0, "direction_threshold must be >= 0");
    require(c.trade_fraction > 0.0 && c.trade_fraction <= 1.0, "trade_fraction must lie in (0,1]");
    require(c.fallback_spread >= 0.0, "fallback_spread must be >= 0");
    require(is_rate(c.noise_band), "noise_band must lie in [0,1)");
    require(c.snapshot_interval >= 0, "snapshot_interval must be >= 0");
    require(c.scenario.fraction >= 0.0 && c.scenario.fraction <= 1.0, "scenario_p must lie in [0,1]");
    require(c.scenario.zeta > 0.0, "scenario_zeta must be > 0");
    return c;
}

Scale scale_from_string(std::string_view name) {
    if (name == "paper") {
        return Scale::Paper;
    }
    if (name == "desk") {
        return Scale::Desk;
    }
    throw ConfigError("unknown scale '" + std::string(name) + "'");
}

SimConfig preset_config(Scale scale) {
    SimConfig c;
    if (scale == Scale::Paper) {
        c.n_agents = 500;
        c.n_stocks = 1;
        c.n_steps = 2875;
        c.n_runs = 20;
        c.learning_phase = 1000;
    } else {
        c.n_agents = 100;
        c.n_stocks = 1;
        c.n_steps = 500;
        c.n_runs = 5;
        c.learning_phase = 300;
    }
    return c;
}

namespace {

struct Field {
    std::function<void(SimConfig&, std::string_view key, std::string_view)> set;
    std::function<std::string(const SimConfig&)> get;
};

template <typename T>
Field numeric(T SimConfig::*member) {
    return {[member](SimConfig& c, std::string_view key, std::string_view v) { c.*member = parse_number<T>(key, v); },
            [member](const SimConfig& c) { return format_number(c.*member); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> table = {
        {"n_agents", numeric(&SimConfig::n_agents)},
        {"n_stocks", numeric(&SimConfig::n_stocks)},
        {"n_steps", numeric(&SimConfig::n_steps)},
        {"n_runs", numeric(&SimConfig::n_runs)},
        {"year_len", numeric(&SimConfig::year_len)},
        {"month_len", numeric(&SimConfig::month_len)},
        {"week_len", numeric(&SimConfig::week_len)},
        {"init_price", numeric(&SimConfig::init_price)},
        {"broker_fee", numeric(&SimConfig::broker_fee)},
        {"riskfree_annual", numeric(&SimConfig::riskfree_annual)},
        {"dividend_annual", numeric(&SimConfig::dividend_annual)},
        {"learning_phase", numeric(&SimConfig::learning_phase)},
        {"crash_threshold", numeric(&SimConfig::crash_threshold)},
        {"master_seed", numeric(&SimConfig::master_seed)},
        {"fundamental_vol", numeric(&SimConfig::fundamental_vol)},
        {"jump_prob", numeric(&SimConfig::jump_prob)},
        {"jump_scale", numeric(&SimConfig::jump_scale)},
        {"coint_bias", numeric(&SimConfig::coint_bias)},
        {"coint_phi", numeric(&SimConfig::coint_phi)},
        {"coint_noise", numeric(&SimConfig::coint_noise)},
        {"init_bonds", numeric(&SimConfig::init_bonds)},
        {"init_shares", numeric(&SimConfig::init_shares)},
        {"direction_threshold", numeric(&SimConfig::direction_threshold)},
        {"trade_fraction", numeric(&SimConfig::trade_fraction)},
        {"fallback_spread", numeric(&SimConfig::fallback_spread)},
        {"noise_band", numeric(&SimConfig::noise_band)},
        {"snapshot_interval", numeric(&SimConfig::snapshot_interval)},
        {"scenario",
         {[](SimConfig& c, std::string_view, std::string_view v) { c.scenario.kind = scenario_kind_from_string(v); },
          [](const SimConfig& c) { return std::string(to_string(c.scenario.kind)); }}},
        {"scenario_p",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.scenario.fraction = parse_number<double>(k, v); },
          [](const SimConfig& c) { return format_number(c.scenario.fraction); }}},
        {"scenario_zeta",
         {[](SimConfig& c, std::string_view k, std::string_view v) { c.scenario.zeta = parse_number<double>(k, v); },
          [](const SimConfig& c) { return format_number(c.scenario.zeta); }}},
    };
    return table;
}

}  // namespace

void apply_setting(SimConfig& config, std::string_view key, std::string_view value) {
    const auto& table = fields();
    auto it = table.find(key);
    if (it == table.end()) {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
    it->second.set(config, key, trim(value));
}

SimConfig load_config_file(const std::filesystem::path& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read configuration file '" + path.string() + "'");
    }
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        apply_setting(base, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    }
    return base;
}

std::map<std::string, std::string> config_to_map(const SimConfig& config) {
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : fields()) {
        out.emplace(key, field.get(config));
    }
    return out;
}

// ---------------------------------------------------------------------------

RngStream::RngStream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(domain), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
}

long RngStream::uniform_int(long lo, long hi) {
    if (hi <= lo) {
        return lo;
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return lo + static_cast<long>(x % span);
}

double RngStream::normal(double mean, double stddev) {
    // Box-Muller, one variate per call
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace agora
