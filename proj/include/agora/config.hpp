#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agora {

enum class ScenarioKind {
    Baseline,
    LearnRateFraction,
    LearnRateGlobal,
    HerdBest,
    HerdWorst,
    NoiseTraders,
};

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

/// Population-level behaviour override for one experiment point.
///
/// `fraction` is the share of agents affected (unused for LearnRateGlobal),
/// `zeta` scales learning rates (unused for the herding and noise kinds).
struct Scenario {
    ScenarioKind kind = ScenarioKind::Baseline;
    double fraction = 0.0;
    double zeta = 1.0;

    bool operator==(const Scenario&) const = default;
};

struct SimConfig {
    // population and horizon
    int n_agents = 100;
    int n_stocks = 1;
    int n_steps = 500;
    int n_runs = 5;

    // calendar
    int year_len = 286;
    int month_len = 21;
    int week_len = 5;

    // market
    double init_price = 100.0;
    double broker_fee = 0.001;
    double riskfree_annual = 0.01;
    double dividend_annual = 0.02;
    int learning_phase = 1000;
    double crash_threshold = 0.20;
    std::uint64_t master_seed = 42;
    Scenario scenario{};

    // fundamental process
    double fundamental_vol = 0.005;
    double jump_prob = 0.01;
    double jump_scale = 0.05;

    // cointegration rule
    double coint_bias = 0.05;
    double coint_phi = 0.9;
    double coint_noise = 0.01;

    // endowment
    double init_bonds = 15000.0;
    long init_shares = 100;

    // trading
    double direction_threshold = 0.005;
    double trade_fraction = 0.5;
    double fallback_spread = 0.01;
    double noise_band = 0.05;

    // output
    int snapshot_interval = 286;

    bool operator==(const SimConfig&) const = default;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Returns `config` unchanged when every invariant holds, throws ConfigError
/// naming the first violated invariant otherwise.
const SimConfig& validate(const SimConfig& config);

/// Shortest admissible recorded horizon: the memory draw U{T_w, T - tau - 2 T_w}
/// must be nonempty for tau up to 6 T_m.
int min_steps(const SimConfig& config);

enum class Scale { Paper, Desk };

Scale scale_from_string(std::string_view name);

/// I=500, J=1, T=2875, S=20, learning 1000 (paper) or I=100, T=500, S=5,
/// learning 300 (desk).
SimConfig preset_config(Scale scale);

/// `key = value` lines, `#` comments. Unknown keys and malformed values throw.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value);
SimConfig load_config_file(const std::filesystem::path& path, SimConfig base = {});
std::map<std::string, std::string> config_to_map(const SimConfig& config);

// ---------------------------------------------------------------------------
// RNG streams

enum class StreamDomain : std::uint32_t {
    Fundamental = 1,
    AgentInit = 2,
    AgentDecision = 3,
    Analytics = 4,
};

/// Independent random stream keyed by (seed, domain, index).
class RngStream {
public:
    RngStream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on the closed range [lo, hi].
    long uniform_int(long lo, long hi);
    double normal(double mean, double stddev);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

inline RngStream rng_stream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index) {
    return RngStream(master_seed, domain, index);
}

}  // namespace agora
