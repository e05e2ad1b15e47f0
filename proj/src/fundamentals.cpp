#include "agora/fundamentals.hpp"

#include <cmath>

namespace agora {

FundamentalSeries generate_fundamental(const SimConfig& config, StockId stock, std::size_t length) {
    auto rng = rng_stream(config.master_seed, StreamDomain::Fundamental, static_cast<std::uint64_t>(stock));
    FundamentalSeries series;
    series.values.reserve(length);
    series.jumps.reserve(length);
    if (length == 0) {
        return series;
    }
    series.values.push_back(config.init_price);
    series.jumps.push_back(false);
    double log_change = 0.0;
    for (std::size_t t = 1; t < length; ++t) {
        // draw all three variates every step so the stream layout is parameter independent
        const double diffusion = rng.normal(0.0, 1.0) * config.fundamental_vol;
        const bool jump = rng.bernoulli(config.jump_prob);
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        log_change += diffusion + (jump ? sign * config.jump_scale : 0.0);
        series.values.push_back(config.init_price * std::exp(log_change));
        series.jumps.push_back(jump);
    }
    return series;
}

CointegrationRule draw_cointegration_rule(const SimConfig& config, RngStream& rng) {
    CointegrationRule rule;
    rule.bias = rng.uniform(-config.coint_bias, config.coint_bias);
    rule.lag = static_cast<int>(rng.uniform_int(0, config.week_len));
    rule.phi = config.coint_phi;
    rule.noise_scale = config.coint_noise;
    return rule;
}

double cointegrate(const FundamentalSeries& series, const CointegrationRule& rule, std::size_t t, double eta) {
    const std::size_t lag = static_cast<std::size_t>(rule.lag);
    const double base = t >= lag ? series.at(t - lag) : series.at(0);
    return base * (1.0 + rule.bias) * std::exp(eta);
}

Valuation Valuation::build(const FundamentalSeries& series, const CointegrationRule& rule, RngStream& rng) {
    Valuation v;
    v.rule_ = rule;
    v.values_.reserve(series.size());
    double eta = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        eta = rule.phi * eta + rng.normal(0.0, 1.0) * rule.noise_scale;
        v.values_.push_back(cointegrate(series, rule, t, eta));
    }
    return v;
}

}  // namespace agora
