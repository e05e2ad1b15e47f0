#include "agora/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace agora {

std::string_view to_string(AgentRole role) {
    switch (role) {
        case AgentRole::Proprietary: return "proprietary";
        case AgentRole::HerdBest: return "herd-best";
        case AgentRole::HerdWorst: return "herd-worst";
        case AgentRole::Noise: return "noise";
    }
    return "proprietary";
}

AgentRole agent_role_from_string(std::string_view name) {
    for (auto role : {AgentRole::Proprietary, AgentRole::HerdBest, AgentRole::HerdWorst, AgentRole::Noise}) {
        if (to_string(role) == name) {
            return role;
        }
    }
    throw std::invalid_argument("unknown agent role '" + std::string(name) + "'");
}

AgentParams draw_agent_params(const SimConfig& config, RngStream& rng) {
    AgentParams p;
    const int tw = config.week_len;
    p.drawdown_limit = rng.uniform(0.50, 0.60);
    p.reflexivity = rng.uniform(0.0, 1.0);
    p.horizon = static_cast<int>(rng.uniform_int(tw, 6 * config.month_len));
    p.trading_window = static_cast<int>(rng.uniform_int(tw, p.horizon));
    p.memory = static_cast<int>(rng.uniform_int(tw, config.n_steps - p.horizon - 2 * tw));
    p.gesture = rng.uniform(0.2, 0.8);
    p.learn_rate = rng.uniform(0.05, 0.20);
    return p;
}

int affected_count(const Scenario& scenario, int n_agents) {
    return static_cast<int>(std::lround(scenario.fraction * n_agents));
}

AgentRole role_for(const Scenario& scenario, int index, int n_agents) {
    if (index >= affected_count(scenario, n_agents)) {
        return AgentRole::Proprietary;
    }
    switch (scenario.kind) {
        case ScenarioKind::HerdBest: return AgentRole::HerdBest;
        case ScenarioKind::HerdWorst: return AgentRole::HerdWorst;
        case ScenarioKind::NoiseTraders: return AgentRole::Noise;
        default: return AgentRole::Proprietary;
    }
}

double learn_rate_multiplier(const Scenario& scenario, int index, int n_agents) {
    switch (scenario.kind) {
        case ScenarioKind::LearnRateGlobal: return scenario.zeta;
        case ScenarioKind::LearnRateFraction:
            return index < affected_count(scenario, n_agents) ? scenario.zeta : 1.0;
        default: return 1.0;
    }
}

Portfolio initial_portfolio(const SimConfig& config) {
    Portfolio p;
    p.bonds = config.init_bonds;
    p.holdings.assign(static_cast<std::size_t>(config.n_stocks), config.init_shares);
    p.ytd_peak_nav = config.init_bonds + static_cast<double>(config.init_shares) * config.init_price * config.n_stocks;
    return p;
}

double equity_value(const Portfolio& portfolio, std::span<const double> prices) {
    double equity = 0.0;
    for (std::size_t j = 0; j < portfolio.holdings.size(); ++j) {
        equity += static_cast<double>(portfolio.holdings[j]) * prices[j];
    }
    return equity;
}

double net_asset_value(const Portfolio& portfolio, std::span<const double> prices) {
    return portfolio.bonds + equity_value(portfolio, prices) - portfolio.fee_shortfall;
}

double step_rate(double annual, int year_len) { return std::pow(1.0 + annual, 1.0 / year_len) - 1.0; }

Accrual accrue(Portfolio& portfolio, std::span<const double> prices, double riskfree_step, double dividend_step) {
    Accrual a;
    a.interest = portfolio.bonds * riskfree_step;
    a.dividends = dividend_step * equity_value(portfolio, prices);
    portfolio.bonds += a.interest + a.dividends;
    return a;
}

double apply_fee(Portfolio& portfolio, double trade_value, double fee_rate) {
    const double fee = fee_rate * trade_value;
    const double charged = std::min(fee, portfolio.bonds);
    portfolio.bonds -= charged;
    portfolio.fee_shortfall += fee - charged;
    return charged;
}

bool check_bankruptcy(Portfolio& portfolio, double drawdown_limit, double nav, long step, int year_len) {
    if (portfolio.bankrupt) {
        return false;
    }
    if (step % year_len == 0) {
        portfolio.ytd_peak_nav = nav;
    } else {
        portfolio.ytd_peak_nav = std::max(portfolio.ytd_peak_nav, nav);
    }
    if (nav < (1.0 - drawdown_limit) * portfolio.ytd_peak_nav) {
        portfolio.bankrupt = true;
        return true;
    }
    return false;
}

}  // namespace agora
