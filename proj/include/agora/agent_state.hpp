#pragma once

#include "agora/agents.hpp"
#include "agora/fundamentals.hpp"
#include "agora/rl_forecast.hpp"
#include "agora/rl_trade.hpp"

#include <optional>
#include <span>
#include <vector>

namespace agora {

/// Everything one agent owns during a run.
struct AgentState {
    AgentId id = 0;
    std::uint64_t stream = 0;
    AgentParams params;
    AgentRole role = AgentRole::Proprietary;
    Portfolio portfolio;
    Portfolio initial;
    std::vector<Valuation> valuations;
    std::vector<forecast::Learner> forecasters;
    std::vector<trade::Learner> traders;
    History bonds_history;
    RngStream rng;
    std::optional<long> bankruptcy_step;

    AgentState(AgentId id_, std::uint64_t stream_, RngStream decision_rng)
        : id(id_), stream(stream_), rng(std::move(decision_rng)) {}
};

/// Draws every agent's parameters and cointegration rules from its own
/// (seed, AgentInit, stream) generator, applies the scenario roles and
/// learning-rate scaling, and sets up uniform policies. `streams[i]` is agent
/// i's stream index; an empty span means the identity mapping.
std::vector<AgentState> init_agents(const SimConfig& config, std::span<const FundamentalSeries> fundamentals,
                                    std::span<const std::uint64_t> streams = {});

}  // namespace agora
