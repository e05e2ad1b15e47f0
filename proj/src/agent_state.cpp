#include "agora/agent_state.hpp"

#include <stdexcept>

namespace agora {

std::vector<AgentState> init_agents(const SimConfig& config, std::span<const FundamentalSeries> fundamentals,
                                    std::span<const std::uint64_t> streams) {
    if (!streams.empty() && static_cast<int>(streams.size()) != config.n_agents) {
        throw std::invalid_argument("stream mapping must cover every agent");
    }
    std::vector<AgentState> agents;
    agents.reserve(static_cast<std::size_t>(config.n_agents));
    for (int i = 0; i < config.n_agents; ++i) {
        const std::uint64_t stream = streams.empty() ? static_cast<std::uint64_t>(i) : streams[static_cast<std::size_t>(i)];
        AgentState agent(i, stream, rng_stream(config.master_seed, StreamDomain::AgentDecision, stream));
        auto init_rng = rng_stream(config.master_seed, StreamDomain::AgentInit, stream);

        agent.params = draw_agent_params(config, init_rng);
        agent.params.learn_rate =
            std::min(1.0, agent.params.learn_rate * learn_rate_multiplier(config.scenario, i, config.n_agents));
        agent.role = role_for(config.scenario, i, config.n_agents);

        for (int j = 0; j < config.n_stocks; ++j) {
            const auto rule = draw_cointegration_rule(config, init_rng);
            agent.valuations.push_back(Valuation::build(fundamentals[static_cast<std::size_t>(j)], rule, init_rng));
            agent.forecasters.emplace_back(agent.params);
            agent.traders.emplace_back(agent.params);
        }
        agent.bonds_history = History(static_cast<std::size_t>(agent.params.memory));
        agent.portfolio = initial_portfolio(config);
        agent.initial = agent.portfolio;
        agents.push_back(std::move(agent));
    }
    return agents;
}

}  // namespace agora
