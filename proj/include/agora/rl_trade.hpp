#pragma once

#include "agora/agents.hpp"
#include "agora/orderbook.hpp"
#include "agora/policy.hpp"
#include "agora/stats.hpp"

#include <array>
#include <deque>
#include <optional>

/// Order placement learner: states combine the forecast direction, volatility,
/// portfolio levels and recent volume; actions choose hold/buy/sell and how
/// far from the agent's own valuation to price the limit order.
namespace agora::trade {

inline constexpr int kStateCount = 108;
inline constexpr int kActionCount = 9;

enum class Direction { Down = 0, Flat = 1, Up = 2 };
enum class Intent { Hold = 0, Buy = 1, Sell = 2 };
enum class Pricing { Passive = 0, Neutral = 1, Aggressive = 2 };

struct State {
    Direction direction = Direction::Flat;
    int volatility = 1;
    bool bonds_high = false;
    bool holdings_high = false;
    int volume = 1;

    int index() const {
        return static_cast<int>(direction) * 36 + volatility * 12 + (bonds_high ? 6 : 0) + (holdings_high ? 3 : 0) +
               volume;
    }
    static State from_index(int index);
    bool operator==(const State&) const = default;
};

struct Action {
    Intent intent = Intent::Hold;
    Pricing pricing = Pricing::Neutral;

    int index() const { return static_cast<int>(intent) * 3 + static_cast<int>(pricing); }
    static Action from_index(int index) { return {static_cast<Intent>(index / 3), static_cast<Pricing>(index % 3)}; }
    bool operator==(const Action&) const = default;
};

/// Up/Down when the forecast leaves the band P (1 -+ threshold), Flat inside it.
Direction direction(double forecast, double price, double threshold);

struct Observation {
    double forecast = 0.0;
    double price = 0.0;
    int volatility_tercile = 1;
    double bonds = 0.0;
    double holdings_value = 0.0;
    double last_volume = 0.0;
};

State observe_state(const Observation& obs, double direction_threshold, const History& bonds_history,
                    const History& holdings_history, std::span<const double> volume_history);

/// Resources and quoting inputs for one order decision.
struct OrderContext {
    double forecast = 0.0;
    double price = 0.0;
    /// spread left in the book after the previous clearing
    std::optional<double> last_spread;
    double fallback_spread = 0.01;
    double gesture = 0.5;
    double bonds = 0.0;
    Quantity holdings = 0;
    double trade_fraction = 0.5;
    int n_stocks = 1;
    bool bankrupt = false;
};

/// Spread relative to the current price; the fallback applies when no spread was quoted.
double relative_spread(const OrderContext& ctx);

/// Forecast shifted by gesture * relative spread; passive quotes move away from
/// the other side of the book, aggressive ones towards it.
double limit_price(Intent intent, Pricing pricing, double forecast, double gesture, double rel_spread);

/// floor(chi * bonds / (J * limit)) to buy, floor(chi * holdings) to sell.
Quantity order_size(Intent intent, double limit, double bonds, Quantity holdings, double trade_fraction,
                    int n_stocks);

std::optional<Order> make_order(AgentId agent, StockId stock, Action action, const OrderContext& ctx);

struct Pending {
    long issue_step = 0;
    int state = 0;
    int action = 0;
    double forecast = 0.0;
    double bonds = 0.0;
    Quantity holdings = 0;
    Quantity filled = 0;
    double notional = 0.0;
    /// price printed by the clearing of the issue step
    double clearing_price = 0.0;

    double average_price() const { return filled > 0 ? notional / static_cast<double>(filled) : 0.0; }
};

/// Cash-flow effect, marked at `resolution_price`, of trading `quantity` at `price` versus not trading.
double replay_value(Intent intent, Quantity quantity, double price, double resolution_price, double fee_rate);

struct Replay {
    /// indexed by Intent; Hold is always 0
    std::array<double, 3> value{};
    /// whether a neutral-priced order would have crossed the issue-step clearing price
    std::array<bool, 3> feasible{true, false, false};
};

/// Replays hold, buy and sell at neutral pricing. A replayed order executes at
/// the issue-step clearing price when its limit would have crossed it.
Replay replay(const Pending& p, double resolution_price, double fee_rate, double trade_fraction, int n_stocks);

/// NAV with the recorded action minus NAV without it. Unfilled orders and
/// holds are compared against the best feasible executed alternative.
double cashflow_diff(const Pending& p, double resolution_price, double fee_rate, double trade_fraction,
                     int n_stocks);

/// argmax over the replayed intents, ties resolved towards Hold then Buy.
Intent hindsight_best_intent(const Replay& r);

/// Best action: the best intent, keeping the taken pricing if the intent matches, else neutral.
int hindsight_best_action(Intent best, int taken_action);

/// Sextile reward: larger differences than the agent's past ones score higher.
int reward(double diff, const History& diff_history);

struct Resolution {
    int state = 0;
    int taken = 0;
    int best = 0;
    int reward = 0;
    double diff = 0.0;
    Replay replay{};
    bool updated = false;
};

struct Learner {
    Learner() = default;
    explicit Learner(const AgentParams& params);

    PolicyTable policy{kStateCount, kActionCount};
    std::deque<Pending> pending;
    History diffs;
    History holdings_value;

    Resolution resolve(const Pending& p, double resolution_price, double learn_rate, double fee_rate,
                       double trade_fraction, int n_stocks);
};

}  // namespace agora::trade
