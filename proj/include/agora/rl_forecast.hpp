#pragma once

#include "agora/agents.hpp"
#include "agora/config.hpp"
#include "agora/policy.hpp"
#include "agora/stats.hpp"

#include <array>
#include <deque>
#include <span>

/// Price forecasting learner: states are volatility and valuation-gap
/// terciles, actions pick a technical tool, its look-back and the weight
/// given to the agent's fundamental valuation.
namespace agora::forecast {

inline constexpr int kStateCount = 27;
inline constexpr int kActionCount = 27;

struct State {
    int long_vol = 1;
    int short_vol = 1;
    int gap = 1;

    int index() const { return long_vol * 9 + short_vol * 3 + gap; }
    static State from_index(int index) { return {index / 9, (index / 3) % 3, index % 3}; }
    bool operator==(const State&) const = default;
};

enum class Tool { MeanRevert = 0, Average = 1, TrendFollow = 2 };

struct Action {
    Tool tool = Tool::Average;
    int lag = 0;     // 0 short, 1 mid, 2 long
    int weight = 0;  // fundamental-weight level 0..2

    int index() const { return static_cast<int>(tool) * 9 + lag * 3 + weight; }
    static Action from_index(int index) { return {static_cast<Tool>(index / 9), (index / 3) % 3, index % 3}; }
    bool operator==(const Action&) const = default;
};

using Candidates = std::array<double, kActionCount>;

/// Look-back for lag choice 0, 1, 2: one week, one month, three months.
int lag_days(int lag_choice, const SimConfig& config);

/// Forecast of the price `horizon` steps ahead from the last `lag_days` prices
/// (capped to what is available). Floored at 0.01.
double technical_forecast(Tool tool, int lag_days, std::span<const double> prices, int horizon);

/// c = clip(rho * {0.5, 1, min(1/rho, 1.5)}[level], 0, 1); returns c B + (1 - c) technical.
double blend(double technical, double valuation, double reflexivity, int weight_level);

/// Sample standard deviation of the last `window` prices over the latest price.
double relative_volatility(std::span<const double> prices, int window);

/// Terciles of each statistic against its own trailing distribution.
State observe_state(double long_vol, std::span<const double> long_vol_history, double short_vol,
                    const History& short_vol_history, double gap, const History& gap_history);

/// All 27 forecasts from the price history as of issue time.
Candidates candidate_forecasts(std::span<const double> prices, double valuation, const AgentParams& params,
                               const SimConfig& config);

/// Action with the smallest absolute error against `realized`; ties go to the smaller index.
int hindsight_best(const Candidates& candidates, double realized);

/// Sextile reward: smaller errors than the agent's past mismatches score higher.
int reward(double abs_error, const History& error_history);

struct Pending {
    long issue_step = 0;
    int state = 0;
    int action = 0;
    double forecast = 0.0;
    Candidates candidates{};
};

struct Resolution {
    int state = 0;
    int taken = 0;
    int best = 0;
    int reward = 0;
    double abs_error = 0.0;
    bool updated = false;
};

/// One agent's forecasting learner for one stock.
struct Learner {
    Learner() = default;
    explicit Learner(const AgentParams& params);

    PolicyTable policy{kStateCount, kActionCount};
    std::deque<Pending> pending;
    History errors;
    History short_vol;
    History gap;

    /// Scores `p` against the realised price and updates the policy row it was issued from.
    Resolution resolve(const Pending& p, double realized, double learn_rate);
};

}  // namespace agora::forecast
