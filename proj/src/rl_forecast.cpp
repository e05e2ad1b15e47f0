#include "agora/rl_forecast.hpp"

#include <algorithm>
#include <cmath>

namespace agora::forecast {

namespace {

constexpr double kPriceFloor = 0.01;

std::span<const double> tail(std::span<const double> xs, int n) {
    const auto count = std::min(xs.size(), static_cast<std::size_t>(std::max(n, 1)));
    return xs.subspan(xs.size() - count);
}

/// Least-squares slope of xs against 0..n-1.
double ls_slope(std::span<const double> xs) {
    const auto n = xs.size();
    if (n < 2) {
        return 0.0;
    }
    const double x_mean = 0.5 * static_cast<double>(n - 1);
    const double y_mean = mean(xs);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        sxy += dx * (xs[i] - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace

int lag_days(int lag_choice, const SimConfig& config) {
    switch (lag_choice) {
        case 0: return config.week_len;
        case 1: return config.month_len;
        default: return 3 * config.month_len;
    }
}

double technical_forecast(Tool tool, int lag_days, std::span<const double> prices, int horizon) {
    if (prices.empty()) {
        return kPriceFloor;
    }
    const auto window = tail(prices, lag_days);
    const double last = prices.back();
    double forecast = last;
    switch (tool) {
        case Tool::Average:
            forecast = mean(window);
            break;
        case Tool::MeanRevert: {
            const double pull = std::min(1.0, static_cast<double>(horizon) / static_cast<double>(window.size()));
            forecast = last + (mean(window) - last) * pull;
            break;
        }
        case Tool::TrendFollow:
            forecast = last + static_cast<double>(horizon) * ls_slope(window);
            break;
    }
    return std::max(forecast, kPriceFloor);
}

double blend(double technical, double valuation, double reflexivity, int weight_level) {
    double factor = 0.5;
    if (weight_level == 1) {
        factor = 1.0;
    } else if (weight_level >= 2) {
        factor = reflexivity > 0.0 ? std::min(1.0 / reflexivity, 1.5) : 1.5;
    }
    const double c = std::clamp(reflexivity * factor, 0.0, 1.0);
    return c * valuation + (1.0 - c) * technical;
}

double relative_volatility(std::span<const double> prices, int window) {
    if (prices.empty()) {
        return 0.0;
    }
    return sample_std(tail(prices, window)) / prices.back();
}

State observe_state(double long_vol, std::span<const double> long_vol_history, double short_vol,
                    const History& short_vol_history, double gap, const History& gap_history) {
    return {tercile(long_vol, long_vol_history), tercile(short_vol, short_vol_history), tercile(gap, gap_history)};
}

Candidates candidate_forecasts(std::span<const double> prices, double valuation, const AgentParams& params,
                               const SimConfig& config) {
    Candidates out{};
    for (int tool = 0; tool < 3; ++tool) {
        for (int lag = 0; lag < 3; ++lag) {
            const double tech =
                technical_forecast(static_cast<Tool>(tool), lag_days(lag, config), prices, params.horizon);
            for (int weight = 0; weight < 3; ++weight) {
                const Action a{static_cast<Tool>(tool), lag, weight};
                out[static_cast<std::size_t>(a.index())] =
                    std::max(blend(tech, valuation, params.reflexivity, weight), kPriceFloor);
            }
        }
    }
    return out;
}

int hindsight_best(const Candidates& candidates, double realized) {
    int best = 0;
    double best_error = std::abs(candidates[0] - realized);
    for (int a = 1; a < kActionCount; ++a) {
        const double err = std::abs(candidates[static_cast<std::size_t>(a)] - realized);
        if (err < best_error) {
            best = a;
            best_error = err;
        }
    }
    return best;
}

int reward(double abs_error, const History& error_history) {
    // fewer past errors below this one means a better forecast
    return -sextile_reward(count_below(abs_error, error_history), error_history.size());
}

Learner::Learner(const AgentParams& params)
    : errors(static_cast<std::size_t>(params.memory)),
      short_vol(static_cast<std::size_t>(params.memory)),
      gap(static_cast<std::size_t>(params.memory)) {}

Resolution Learner::resolve(const Pending& p, double realized, double learn_rate) {
    Resolution r;
    r.state = p.state;
    r.taken = p.action;
    r.abs_error = std::abs(p.forecast - realized);
    r.best = hindsight_best(p.candidates, realized);
    if (!errors.empty()) {
        r.reward = reward(r.abs_error, errors);
        hindsight_update(policy, p.state, r.best, p.action, r.reward, learn_rate);
        r.updated = true;
    }
    errors.push(r.abs_error);
    return r;
}

}  // namespace agora::forecast
