#include "agora/rl_trade.hpp"

#include <cmath>

namespace agora::trade {

State State::from_index(int index) {
    State s;
    s.direction = static_cast<Direction>(index / 36);
    s.volatility = (index / 12) % 3;
    s.bonds_high = ((index / 6) % 2) == 1;
    s.holdings_high = ((index / 3) % 2) == 1;
    s.volume = index % 3;
    return s;
}

Direction direction(double forecast, double price, double threshold) {
    if (forecast > price * (1.0 + threshold)) {
        return Direction::Up;
    }
    if (forecast < price * (1.0 - threshold)) {
        return Direction::Down;
    }
    return Direction::Flat;
}

State observe_state(const Observation& obs, double direction_threshold, const History& bonds_history,
                    const History& holdings_history, std::span<const double> volume_history) {
    State s;
    s.direction = direction(obs.forecast, obs.price, direction_threshold);
    s.volatility = obs.volatility_tercile;
    s.bonds_high = at_or_above_median(obs.bonds, bonds_history);
    s.holdings_high = at_or_above_median(obs.holdings_value, holdings_history);
    s.volume = tercile(obs.last_volume, volume_history);
    return s;
}

double relative_spread(const OrderContext& ctx) {
    if (!ctx.last_spread || ctx.price <= 0.0) {
        return ctx.fallback_spread;
    }
    return *ctx.last_spread / ctx.price;
}

double limit_price(Intent intent, Pricing pricing, double forecast, double gesture, double rel_spread) {
    const double sign = static_cast<double>(static_cast<int>(pricing) - 1);
    const double shift = gesture * sign * rel_spread;
    switch (intent) {
        case Intent::Buy: return forecast * (1.0 + shift);
        case Intent::Sell: return forecast * (1.0 - shift);
        case Intent::Hold: break;
    }
    return forecast;
}

Quantity order_size(Intent intent, double limit, double bonds, Quantity holdings, double trade_fraction,
                    int n_stocks) {
    if (limit <= 0.0) {
        return 0;
    }
    switch (intent) {
        case Intent::Buy:
            return static_cast<Quantity>(std::floor(trade_fraction * std::max(bonds, 0.0) / (n_stocks * limit)));
        case Intent::Sell:
            return static_cast<Quantity>(std::floor(trade_fraction * static_cast<double>(holdings)));
        case Intent::Hold: break;
    }
    return 0;
}

std::optional<Order> make_order(AgentId agent, StockId stock, Action action, const OrderContext& ctx) {
    if (ctx.bankrupt || action.intent == Intent::Hold) {
        return std::nullopt;
    }
    const double limit = limit_price(action.intent, action.pricing, ctx.forecast, ctx.gesture, relative_spread(ctx));
    const Quantity q = order_size(action.intent, limit, ctx.bonds, ctx.holdings, ctx.trade_fraction, ctx.n_stocks);
    if (q <= 0 || !(limit > 0.0) || !std::isfinite(limit)) {
        return std::nullopt;
    }
    return Order{agent, stock, action.intent == Intent::Buy ? Side::Bid : Side::Ask, limit, q};
}

double replay_value(Intent intent, Quantity quantity, double price, double resolution_price, double fee_rate) {
    const double q = static_cast<double>(quantity);
    switch (intent) {
        case Intent::Buy: return q * (resolution_price - price) - fee_rate * q * price;
        case Intent::Sell: return q * (price - resolution_price) - fee_rate * q * price;
        case Intent::Hold: break;
    }
    return 0.0;
}

Replay replay(const Pending& p, double resolution_price, double fee_rate, double trade_fraction, int n_stocks) {
    Replay r;
    const double limit = p.forecast;  // neutral pricing
    const Quantity buy_q = order_size(Intent::Buy, limit, p.bonds, p.holdings, trade_fraction, n_stocks);
    const Quantity sell_q = order_size(Intent::Sell, limit, p.bonds, p.holdings, trade_fraction, n_stocks);
    if (buy_q > 0 && p.clearing_price <= limit) {
        r.feasible[1] = true;
        r.value[1] = replay_value(Intent::Buy, buy_q, p.clearing_price, resolution_price, fee_rate);
    }
    if (sell_q > 0 && p.clearing_price >= limit) {
        r.feasible[2] = true;
        r.value[2] = replay_value(Intent::Sell, sell_q, p.clearing_price, resolution_price, fee_rate);
    }
    return r;
}

double cashflow_diff(const Pending& p, double resolution_price, double fee_rate, double trade_fraction,
                     int n_stocks) {
    const auto taken = Action::from_index(p.action);
    if (taken.intent != Intent::Hold && p.filled > 0) {
        return replay_value(taken.intent, p.filled, p.average_price(), resolution_price, fee_rate);
    }
    const Replay r = replay(p, resolution_price, fee_rate, trade_fraction, n_stocks);
    bool any = false;
    double best = 0.0;
    for (int k = 1; k < 3; ++k) {
        if (r.feasible[static_cast<std::size_t>(k)]) {
            best = any ? std::max(best, r.value[static_cast<std::size_t>(k)]) : r.value[static_cast<std::size_t>(k)];
            any = true;
        }
    }
    return any ? -best : 0.0;
}

Intent hindsight_best_intent(const Replay& r) {
    int best = 0;
    for (int k = 1; k < 3; ++k) {
        if (r.value[static_cast<std::size_t>(k)] > r.value[static_cast<std::size_t>(best)]) {
            best = k;
        }
    }
    return static_cast<Intent>(best);
}

int hindsight_best_action(Intent best, int taken_action) {
    const auto taken = Action::from_index(taken_action);
    const Pricing pricing = taken.intent == best ? taken.pricing : Pricing::Neutral;
    return Action{best, pricing}.index();
}

int reward(double diff, const History& diff_history) {
    return sextile_reward(count_below(diff, diff_history), diff_history.size());
}

Learner::Learner(const AgentParams& params)
    : diffs(static_cast<std::size_t>(params.memory)), holdings_value(static_cast<std::size_t>(params.memory)) {}

Resolution Learner::resolve(const Pending& p, double resolution_price, double learn_rate, double fee_rate,
                            double trade_fraction, int n_stocks) {
    Resolution r;
    r.state = p.state;
    r.taken = p.action;
    r.diff = cashflow_diff(p, resolution_price, fee_rate, trade_fraction, n_stocks);
    r.replay = replay(p, resolution_price, fee_rate, trade_fraction, n_stocks);
    r.best = hindsight_best_action(hindsight_best_intent(r.replay), p.action);
    if (!diffs.empty()) {
        r.reward = reward(r.diff, diffs);
        hindsight_update(policy, p.state, r.best, p.action, r.reward, learn_rate);
        r.updated = true;
    }
    diffs.push(r.diff);
    return r;
}

}  // namespace agora::trade
