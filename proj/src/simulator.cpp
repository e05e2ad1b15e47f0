#include "agora/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace agora {

std::optional<Order> override_herd(const AgentState& agent, StockId stock, const std::optional<Order>& remembered,
                                   double fee_rate, int n_stocks) {
    if (!remembered || agent.portfolio.bankrupt) {
        return std::nullopt;
    }
    Order copy = *remembered;
    copy.agent_id = agent.id;
    copy.stock_id = stock;
    Quantity cap = 0;
    if (copy.side == Side::Bid) {
        const double unit_cost = copy.price * (1.0 + fee_rate) * n_stocks;
        cap = static_cast<Quantity>(std::floor(std::max(agent.portfolio.bonds, 0.0) / unit_cost));
    } else {
        cap = agent.portfolio.holdings[static_cast<std::size_t>(stock)];
    }
    copy.quantity = std::min(copy.quantity, cap);
    if (copy.quantity <= 0) {
        return std::nullopt;
    }
    return copy;
}

std::optional<Order> override_noise(const AgentState& agent, StockId stock, double price, double band,
                                    double trade_fraction, int n_stocks, RngStream& rng) {
    const auto intent = static_cast<trade::Intent>(rng.uniform_int(0, 2));
    const double limit = price * (1.0 + rng.uniform(-band, band));
    if (agent.portfolio.bankrupt || intent == trade::Intent::Hold) {
        return std::nullopt;
    }
    const Quantity q = trade::order_size(intent, limit, agent.portfolio.bonds,
                                         agent.portfolio.holdings[static_cast<std::size_t>(stock)], trade_fraction,
                                         n_stocks);
    if (q <= 0) {
        return std::nullopt;
    }
    return Order{agent.id, stock, intent == trade::Intent::Buy ? Side::Bid : Side::Ask, limit, q};
}

// ---------------------------------------------------------------------------

Simulation::Simulation(const SimConfig& config, SimOptions options)
    : config_(validate(config)), options_(std::move(options)) {
    const auto J = static_cast<std::size_t>(config_.n_stocks);
    const auto length = static_cast<std::size_t>(config_.learning_phase + config_.n_steps + 1);
    for (std::size_t j = 0; j < J; ++j) {
        fundamentals_.push_back(generate_fundamental(config_, static_cast<StockId>(j), length));
    }
    agents_ = init_agents(config_, fundamentals_, options_.streams);
    prices_.assign(J, std::vector<double>{config_.init_price});
    volumes_.assign(J, std::vector<double>{0.0});
    long_vol_.assign(J, {});
    last_spread_.assign(J, std::nullopt);
    decisions_.assign(agents_.size(), std::vector<std::optional<Order>>(J));
    herd_.best.assign(J, std::nullopt);
    herd_.worst.assign(J, std::nullopt);
    riskfree_step_ = step_rate(config_.riskfree_annual, config_.year_len);
    dividend_step_ = step_rate(config_.dividend_annual, config_.year_len);
    for (auto& series : prices_) {
        series.reserve(length);
    }
    record_.n_agents = config_.n_agents;
    record_.n_stocks = config_.n_stocks;
    record_.seed = config_.master_seed;
}

std::vector<double> Simulation::latest_prices() const {
    std::vector<double> out;
    out.reserve(prices_.size());
    for (const auto& p : prices_) {
        out.push_back(p.back());
    }
    return out;
}

double Simulation::total_bonds() const {
    double total = 0.0;
    for (const auto& a : agents_) {
        total += a.portfolio.bonds;
    }
    return total;
}

Quantity Simulation::total_shares(StockId stock) const {
    Quantity total = 0;
    for (const auto& a : agents_) {
        total += a.portfolio.holdings[static_cast<std::size_t>(stock)];
    }
    return total;
}

long Simulation::year_step() const { return recording_ ? time_ - record_start_ : time_; }

void Simulation::decide(AgentState& agent) {
    auto& orders = decisions_[static_cast<std::size_t>(agent.id)];
    std::fill(orders.begin(), orders.end(), std::nullopt);
    if (agent.portfolio.bankrupt) {
        return;
    }
    const long t = time_;
    const auto& params = agent.params;
    const auto memory = static_cast<std::size_t>(params.memory);
    const int J = config_.n_stocks;

    for (int j = 0; j < J; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const std::span<const double> prices(prices_[js]);
        const double price = prices.back();
        const double valuation = agent.valuations[js].at(static_cast<std::size_t>(t));
        auto& fl = agent.forecasters[js];

        const std::span<const double> long_hist(long_vol_[js]);
        const double short_now = forecast::relative_volatility(prices, params.trading_window);
        const double gap_now = (valuation - price) / price;
        const auto fstate = forecast::observe_state(
            forecast::relative_volatility(prices, 6 * config_.month_len),
            long_hist.subspan(long_hist.size() - std::min(long_hist.size(), memory)), short_now, fl.short_vol, gap_now,
            fl.gap);
        fl.short_vol.push(short_now);
        fl.gap.push(gap_now);

        const int faction = fl.policy.sample(fstate.index(), agent.rng);
        const auto candidates = forecast::candidate_forecasts(prices, valuation, params, config_);
        const double predicted = candidates[static_cast<std::size_t>(faction)];
        fl.pending.push_back({t, fstate.index(), faction, predicted, candidates});

        const Quantity holdings = agent.portfolio.holdings[js];
        switch (agent.role) {
            case AgentRole::Proprietary: {
                auto& tl = agent.traders[js];
                const std::span<const double> volumes(volumes_[js]);
                const auto vol_hist = volumes.first(volumes.size() - 1);
                trade::Observation obs;
                obs.forecast = predicted;
                obs.price = price;
                obs.volatility_tercile = fstate.short_vol;
                obs.bonds = agent.portfolio.bonds;
                obs.holdings_value = static_cast<double>(holdings) * price;
                obs.last_volume = volumes.back();
                const auto tstate =
                    trade::observe_state(obs, config_.direction_threshold, agent.bonds_history, tl.holdings_value,
                                         vol_hist.subspan(vol_hist.size() - std::min(vol_hist.size(), memory)));
                tl.holdings_value.push(obs.holdings_value);

                const int taction = tl.policy.sample(tstate.index(), agent.rng);
                trade::OrderContext ctx;
                ctx.forecast = predicted;
                ctx.price = price;
                ctx.last_spread = last_spread_[js];
                ctx.fallback_spread = config_.fallback_spread;
                ctx.gesture = params.gesture;
                ctx.bonds = agent.portfolio.bonds;
                ctx.holdings = holdings;
                ctx.trade_fraction = config_.trade_fraction;
                ctx.n_stocks = J;
                orders[js] = trade::make_order(agent.id, j, trade::Action::from_index(taction), ctx);

                trade::Pending pending;
                pending.issue_step = t;
                pending.state = tstate.index();
                pending.action = taction;
                pending.forecast = predicted;
                pending.bonds = agent.portfolio.bonds;
                pending.holdings = holdings;
                tl.pending.push_back(pending);
                break;
            }
            case AgentRole::HerdBest:
                orders[js] = override_herd(agent, j, herd_.best[js], config_.broker_fee, J);
                break;
            case AgentRole::HerdWorst:
                orders[js] = override_herd(agent, j, herd_.worst[js], config_.broker_fee, J);
                break;
            case AgentRole::Noise:
                orders[js] =
                    override_noise(agent, j, price, config_.noise_band, config_.trade_fraction, J, agent.rng);
                break;
        }
    }
    agent.bonds_history.push(agent.portfolio.bonds);
}

void Simulation::step() {
    const long t = time_;
    const auto J = static_cast<std::size_t>(config_.n_stocks);
    const auto now = latest_prices();

    // (1) interest and dividends
    CashAudit audit;
    audit.bonds_before = total_bonds();
    for (auto& agent : agents_) {
        const Accrual a = accrue(agent.portfolio, now, riskfree_step_, dividend_step_);
        audit.interest += a.interest;
        audit.dividends += a.dividends;
    }

    // (2) decisions against the step-t snapshot
    const int threads = std::clamp(options_.threads, 1, static_cast<int>(agents_.size()));
    if (threads == 1) {
        for (auto& agent : agents_) {
            decide(agent);
        }
    } else {
        std::vector<std::jthread> workers;
        const std::size_t n = agents_.size();
        for (int w = 0; w < threads; ++w) {
            workers.emplace_back([this, w, threads, n] {
                for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(threads)) {
                    decide(agents_[i]);
                }
            });
        }
    }
    for (std::size_t j = 0; j < J; ++j) {
        long_vol_[j].push_back(forecast::relative_volatility(prices_[j], 6 * config_.month_len));
    }

    // (3) submission in agent-index order, one clearing per stock
    std::vector<ClearingResult> results;
    std::vector<std::optional<double>> spreads;
    std::vector<std::vector<AgentId>> submitter(J);
    for (std::size_t j = 0; j < J; ++j) {
        OrderBook book(static_cast<StockId>(j));
        for (const auto& agent : agents_) {
            if (const auto& order = decisions_[static_cast<std::size_t>(agent.id)][j]) {
                book.submit(*order);
                submitter[j].push_back(agent.id);
            }
        }
        spreads.push_back(book.spread());
        std::vector<Order> submitted;
        if (options_.log_orders && recording_) {
            for (AgentId id : submitter[j]) {
                submitted.push_back(*decisions_[static_cast<std::size_t>(id)][j]);
            }
        }
        results.push_back(book.clear(now[j], recording_ ? t - record_start_ : t));
        if (options_.log_orders && recording_) {
            for (std::size_t k = 0; k < submitted.size(); ++k) {
                record_.orders.push_back({t - record_start_, submitted[k], results.back().filled[k]});
            }
        }
    }

    // (4) settlement
    for (std::size_t j = 0; j < J; ++j) {
        for (const Trade& tr : results[j].trades) {
            auto& buyer = agents_[static_cast<std::size_t>(tr.buyer_id)];
            auto& seller = agents_[static_cast<std::size_t>(tr.seller_id)];
            const double value = tr.price * static_cast<double>(tr.quantity);
            buyer.portfolio.bonds -= value;
            buyer.portfolio.holdings[j] += tr.quantity;
            seller.portfolio.bonds += value;
            seller.portfolio.holdings[j] -= tr.quantity;
            audit.fees += apply_fee(buyer.portfolio, value, config_.broker_fee);
            audit.fees += apply_fee(seller.portfolio, value, config_.broker_fee);
            for (auto* party : {&buyer, &seller}) {
                auto& pend = party->traders[j].pending;
                if (!pend.empty() && pend.back().issue_step == t) {
                    pend.back().filled += tr.quantity;
                    pend.back().notional += value;
                }
            }
        }
    }
    audit.bonds_after = total_bonds();

    // (5) price, volume and spread
    for (std::size_t j = 0; j < J; ++j) {
        prices_[j].push_back(results[j].new_price);
        volumes_[j].push_back(static_cast<double>(results[j].volume));
        last_spread_[j] = results[j].residual_spread;
    }
    for (auto& agent : agents_) {
        for (std::size_t j = 0; j < J; ++j) {
            auto& pend = agent.traders[j].pending;
            if (!pend.empty() && pend.back().issue_step == t) {
                pend.back().clearing_price = results[j].new_price;
            }
        }
    }

    // (6) hindsight updates for everything due at t + 1
    const long due = t + 1;
    for (auto& agent : agents_) {
        if (agent.portfolio.bankrupt) {
            continue;
        }
        const long tau = agent.params.horizon;
        for (std::size_t j = 0; j < J; ++j) {
            auto& fl = agent.forecasters[j];
            while (!fl.pending.empty() && fl.pending.front().issue_step + tau <= due) {
                const auto p = fl.pending.front();
                fl.pending.pop_front();
                const double realized = prices_[j][static_cast<std::size_t>(p.issue_step + tau)];
                const auto res = fl.resolve(p, realized, agent.params.learn_rate);
                if (options_.on_update) {
                    UpdateEvent ev;
                    ev.kind = UpdateEvent::Kind::Forecast;
                    ev.agent = agent.id;
                    ev.stock = static_cast<StockId>(j);
                    ev.step = t;
                    ev.policy = &fl.policy;
                    ev.state = res.state;
                    ev.taken = res.taken;
                    ev.best = res.best;
                    ev.reward = res.reward;
                    ev.updated = res.updated;
                    ev.candidates = &p.candidates;
                    ev.realized = realized;
                    options_.on_update(ev);
                }
            }
            auto& tl = agent.traders[j];
            while (!tl.pending.empty() && tl.pending.front().issue_step + tau <= due) {
                const auto p = tl.pending.front();
                tl.pending.pop_front();
                const double resolution = prices_[j][static_cast<std::size_t>(p.issue_step + tau)];
                const auto res = tl.resolve(p, resolution, agent.params.learn_rate, config_.broker_fee,
                                            config_.trade_fraction, config_.n_stocks);
                if (options_.on_update) {
                    UpdateEvent ev;
                    ev.kind = UpdateEvent::Kind::Trade;
                    ev.agent = agent.id;
                    ev.stock = static_cast<StockId>(j);
                    ev.step = t;
                    ev.policy = &tl.policy;
                    ev.state = res.state;
                    ev.taken = res.taken;
                    ev.best = res.best;
                    ev.reward = res.reward;
                    ev.updated = res.updated;
                    ev.realized = resolution;
                    ev.replay = res.replay.value;
                    options_.on_update(ev);
                }
            }
        }
    }

    // (7) bankruptcy
    const auto after = latest_prices();
    std::vector<double> navs(agents_.size());
    for (auto& agent : agents_) {
        const double nav = net_asset_value(agent.portfolio, after);
        navs[static_cast<std::size_t>(agent.id)] = nav;
        if (check_bankruptcy(agent.portfolio, agent.params.drawdown_limit, nav, year_step(), config_.year_len)) {
            agent.bankruptcy_step = year_step();
            for (std::size_t j = 0; j < J; ++j) {
                agent.forecasters[j].pending.clear();
                agent.traders[j].pending.clear();
            }
        }
    }

    // (8) herd memory for the next step
    int best = -1;
    int worst = -1;
    for (const auto& agent : agents_) {
        if (agent.portfolio.bankrupt) {
            continue;
        }
        const double nav = navs[static_cast<std::size_t>(agent.id)];
        if (best < 0 || nav > navs[static_cast<std::size_t>(best)]) {
            best = agent.id;
        }
        if (worst < 0 || nav < navs[static_cast<std::size_t>(worst)]) {
            worst = agent.id;
        }
    }
    for (std::size_t j = 0; j < J; ++j) {
        herd_.best[j] = best >= 0 ? decisions_[static_cast<std::size_t>(best)][j] : std::nullopt;
        herd_.worst[j] = worst >= 0 ? decisions_[static_cast<std::size_t>(worst)][j] : std::nullopt;
    }

    if (recording_) {
        record_step(results, spreads, audit);
        for (auto& agent : agents_) {
            record_.nav[static_cast<std::size_t>(agent.id)].push_back(navs[static_cast<std::size_t>(agent.id)]);
        }
        const long k = t - record_start_;
        const bool last = k == config_.n_steps - 1;
        if (last || (config_.snapshot_interval > 0 && k % config_.snapshot_interval == 0)) {
            take_snapshot(k);
        }
    }
    ++time_;
}

void Simulation::record_step(const std::vector<ClearingResult>& results,
                             const std::vector<std::optional<double>>& spreads, const CashAudit& audit) {
    const auto J = static_cast<std::size_t>(config_.n_stocks);
    for (std::size_t j = 0; j < J; ++j) {
        auto& s = record_.stocks[j];
        s.price.push_back(results[j].new_price);
        s.volume.push_back(static_cast<double>(results[j].volume));
        s.spread.push_back(spreads[j] ? *spreads[j] : std::numeric_limits<double>::quiet_NaN());
        s.total_shares.push_back(total_shares(static_cast<StockId>(j)));
        s.fundamental.push_back(fundamentals_[j].at(static_cast<std::size_t>(time_ + 1)));
    }
    int bankrupt = 0;
    for (const auto& a : agents_) {
        bankrupt += a.portfolio.bankrupt ? 1 : 0;
    }
    record_.bankrupt_count.push_back(bankrupt);
    record_.cash.push_back(audit);
}

void Simulation::take_snapshot(long step) {
    PolicySnapshot snap;
    snap.step = step;
    snap.n_stocks = config_.n_stocks;
    for (const auto& agent : agents_) {
        snap.nav.push_back(record_.nav[static_cast<std::size_t>(agent.id)].back());
        for (std::size_t j = 0; j < agent.forecasters.size(); ++j) {
            snap.forecast.push_back(agent.forecasters[j].policy);
            snap.trade.push_back(agent.traders[j].policy);
        }
    }
    record_.snapshots.push_back(std::move(snap));
}

void Simulation::reset_portfolios() {
    for (auto& agent : agents_) {
        agent.portfolio = agent.initial;
        agent.bankruptcy_step.reset();
    }
}

void Simulation::start_recording() {
    recording_ = true;
    record_start_ = time_;
    record_.stocks.assign(static_cast<std::size_t>(config_.n_stocks), {});
    record_.bankrupt_count.clear();
    record_.nav.assign(agents_.size(), {});
    record_.snapshots.clear();
    record_.cash.clear();
    record_.orders.clear();
}

void Simulation::finalize() {
    record_.agents.clear();
    const auto prices = latest_prices();
    for (const auto& agent : agents_) {
        AgentSummary s;
        s.id = agent.id;
        s.params = agent.params;
        s.role = agent.role;
        s.final_nav = net_asset_value(agent.portfolio, prices);
        s.bankrupt = agent.portfolio.bankrupt;
        s.bankruptcy_step = agent.bankruptcy_step.value_or(-1);
        record_.agents.push_back(s);
    }
}

MarketRecord Simulation::run() {
    for (int k = 0; k < config_.learning_phase; ++k) {
        step();
    }
    reset_portfolios();
    start_recording();
    for (int k = 0; k < config_.n_steps; ++k) {
        step();
    }
    finalize();
    return record_;
}

MarketRecord run_simulation(const SimConfig& config, int run_index, SimOptions options) {
    SimConfig c = config;
    c.master_seed = config.master_seed + static_cast<std::uint64_t>(run_index);
    Simulation sim(c, std::move(options));
    return sim.run();
}

}  // namespace agora
