#pragma once

#include "agora/config.hpp"
#include "agora/types.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace agora {

/// Parameters drawn once per agent at initialisation.
struct AgentParams {
    double drawdown_limit = 0.55;  // l
    double reflexivity = 0.5;      // rho, weight of the fundamental in forecasts
    int horizon = 5;               // tau, days
    int trading_window = 5;        // w, days
    int memory = 5;                // h, days
    double gesture = 0.5;          // g
    double learn_rate = 0.1;

    bool operator==(const AgentParams&) const = default;
};

enum class AgentRole { Proprietary, HerdBest, HerdWorst, Noise };

std::string_view to_string(AgentRole role);
/// Throws std::invalid_argument for an unknown name.
AgentRole agent_role_from_string(std::string_view name);

struct Portfolio {
    double bonds = 0.0;
    std::vector<Quantity> holdings;
    double ytd_peak_nav = 0.0;
    bool bankrupt = false;
    /// fees that could not be charged because bonds hit zero
    double fee_shortfall = 0.0;

    bool operator==(const Portfolio&) const = default;
};

/// Draws l, rho, tau, w, h, g and the learning rate, in that order, from `rng`.
AgentParams draw_agent_params(const SimConfig& config, RngStream& rng);

/// Role of agent `index` under `scenario`: the first round(p I) agents are affected.
AgentRole role_for(const Scenario& scenario, int index, int n_agents);

/// Learning-rate multiplier applied to agent `index` under `scenario`.
double learn_rate_multiplier(const Scenario& scenario, int index, int n_agents);

/// Number of agents a scenario touches, round(p I).
int affected_count(const Scenario& scenario, int n_agents);

Portfolio initial_portfolio(const SimConfig& config);

double equity_value(const Portfolio& portfolio, std::span<const double> prices);
double net_asset_value(const Portfolio& portfolio, std::span<const double> prices);

/// Per-step compounding rates equivalent to the annual ones over `year_len` steps.
double step_rate(double annual, int year_len);

struct Accrual {
    double interest = 0.0;
    double dividends = 0.0;
};

/// bonds <- bonds (1 + r) + d * equity. Dividends are paid in cash.
Accrual accrue(Portfolio& portfolio, std::span<const double> prices, double riskfree_step, double dividend_step);

/// Charges fee_rate * trade_value against bonds, flooring at zero. Returns the
/// amount actually charged; any remainder is added to fee_shortfall.
double apply_fee(Portfolio& portfolio, double trade_value, double fee_rate);

/// Updates the year-to-date peak (reset at every year boundary) and flags the
/// portfolio bankrupt once NAV falls below (1 - limit) * peak. Bankruptcy is
/// absorbing. Returns true when the flag flips on this call.
bool check_bankruptcy(Portfolio& portfolio, double drawdown_limit, double nav, long step, int year_len);

}  // namespace agora
