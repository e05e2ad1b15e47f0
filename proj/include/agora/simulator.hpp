#pragma once

#include "agora/agent_state.hpp"
#include "agora/config.hpp"
#include "agora/fundamentals.hpp"
#include "agora/orderbook.hpp"
#include "agora/policy.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace agora {

/// Per-stock market series over the recorded phase. Entry k describes
/// recorded step k: the price and volume printed by that step's clearing and
/// the pre-clearing spread (NaN when one side of the book was empty).
struct StockRecord {
    std::vector<double> price;
    std::vector<double> volume;
    std::vector<double> spread;
    std::vector<Quantity> total_shares;
    std::vector<double> fundamental;
};

struct AgentSummary {
    AgentId id = 0;
    AgentParams params;
    AgentRole role = AgentRole::Proprietary;
    double final_nav = 0.0;
    bool bankrupt = false;
    long bankruptcy_step = -1;
};

/// Policies of every agent at one recorded step, with the NAVs used to rank them.
struct PolicySnapshot {
    long step = 0;
    int n_stocks = 1;
    std::vector<double> nav;
    /// indexed agent * n_stocks + stock
    std::vector<PolicyTable> forecast;
    std::vector<PolicyTable> trade;

    const PolicyTable& forecast_of(int agent, int stock = 0) const {
        return forecast[static_cast<std::size_t>(agent * n_stocks + stock)];
    }
    const PolicyTable& trade_of(int agent, int stock = 0) const {
        return trade[static_cast<std::size_t>(agent * n_stocks + stock)];
    }
};

/// Cash movements of one step, summed over agents.
struct CashAudit {
    double bonds_before = 0.0;
    double bonds_after = 0.0;
    double interest = 0.0;
    double dividends = 0.0;
    double fees = 0.0;
};

struct OrderLogEntry {
    long step = 0;
    Order order;
    Quantity filled = 0;
};

struct MarketRecord {
    int n_agents = 0;
    int n_stocks = 0;
    std::uint64_t seed = 0;
    std::vector<StockRecord> stocks;
    std::vector<int> bankrupt_count;
    /// nav[agent][step]
    std::vector<std::vector<double>> nav;
    std::vector<PolicySnapshot> snapshots;
    std::vector<AgentSummary> agents;
    std::vector<CashAudit> cash;
    std::vector<OrderLogEntry> orders;

    std::size_t steps() const { return bankrupt_count.size(); }
};

/// Orders remembered from the previous step's best and worst solvent agents, per stock.
struct HerdMemory {
    std::vector<std::optional<Order>> best;
    std::vector<std::optional<Order>> worst;
};

/// Copies the remembered order with its quantity capped to what the copier can
/// pay for (buys) or deliver (sells). Absent memory or a zero cap means hold.
std::optional<Order> override_herd(const AgentState& agent, StockId stock, const std::optional<Order>& remembered,
                                   double fee_rate, int n_stocks);

/// Uniform hold/buy/sell with a limit uniformly within +-band of the price,
/// sized like a learned order.
std::optional<Order> override_noise(const AgentState& agent, StockId stock, double price, double band,
                                    double trade_fraction, int n_stocks, RngStream& rng);

struct UpdateEvent {
    enum class Kind { Forecast, Trade };
    Kind kind = Kind::Forecast;
    AgentId agent = 0;
    StockId stock = 0;
    long step = 0;
    const PolicyTable* policy = nullptr;
    int state = 0;
    int taken = 0;
    int best = 0;
    int reward = 0;
    bool updated = false;
    /// forecasting: every candidate forecast and the realised price
    const forecast::Candidates* candidates = nullptr;
    double realized = 0.0;
    /// trading: replayed value of hold, buy, sell
    std::array<double, 3> replay{};
};

struct SimOptions {
    /// Worker threads for the agent decision phase; results do not depend on it.
    int threads = 1;
    /// Stream index per agent; empty for the identity mapping.
    std::vector<std::uint64_t> streams;
    bool log_orders = false;
    std::function<void(const UpdateEvent&)> on_update;
};

class Simulation {
public:
    explicit Simulation(const SimConfig& config, SimOptions options = {});

    /// Advances one step: accrual, decisions, clearing, settlement, recording,
    /// hindsight updates, bankruptcy checks, herd memory.
    void step();

    /// Learning phase, portfolio reset, then the recorded steps.
    MarketRecord run();

    /// Restores every portfolio to its initial endowment; policies are kept.
    void reset_portfolios();
    void start_recording();

    const SimConfig& config() const { return config_; }
    long time() const { return time_; }
    const std::vector<double>& prices(StockId stock) const { return prices_[static_cast<std::size_t>(stock)]; }
    const std::vector<double>& volumes(StockId stock) const { return volumes_[static_cast<std::size_t>(stock)]; }
    const std::vector<AgentState>& agents() const { return agents_; }
    std::vector<AgentState>& agents_mut() { return agents_; }
    const HerdMemory& herd_memory() const { return herd_; }
    const MarketRecord& record() const { return record_; }
    double total_bonds() const;
    Quantity total_shares(StockId stock) const;

private:
    void decide(AgentState& agent);
    void record_step(const std::vector<ClearingResult>& results, const std::vector<std::optional<double>>& spreads,
                     const CashAudit& audit);
    void take_snapshot(long step);
    void finalize();
    std::vector<double> latest_prices() const;
    long year_step() const;

    SimConfig config_;
    SimOptions options_;
    std::vector<FundamentalSeries> fundamentals_;
    std::vector<AgentState> agents_;
    std::vector<std::vector<double>> prices_;
    std::vector<std::vector<double>> volumes_;
    std::vector<std::vector<double>> long_vol_;
    std::vector<std::optional<double>> last_spread_;
    std::vector<std::vector<std::optional<Order>>> decisions_;
    HerdMemory herd_;
    long time_ = 0;
    bool recording_ = false;
    long record_start_ = 0;
    double riskfree_step_ = 0.0;
    double dividend_step_ = 0.0;
    MarketRecord record_;
};

/// One run with master seed config.master_seed + run_index.
MarketRecord run_simulation(const SimConfig& config, int run_index, SimOptions options = {});

}  // namespace agora
