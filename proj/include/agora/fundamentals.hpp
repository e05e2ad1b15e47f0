#pragma once

#include "agora/config.hpp"
#include "agora/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace agora {

/// Hidden fundamental value of one stock: a geometric random walk with rare
/// symmetric log jumps, starting at the initial market price.
struct FundamentalSeries {
    std::vector<double> values;
    /// true at steps whose increment carried a jump
    std::vector<bool> jumps;

    double at(std::size_t t) const { return values[t]; }
    std::size_t size() const { return values.size(); }
};

/// Series of `length` values, fully determined by (seed, Fundamental, stock).
FundamentalSeries generate_fundamental(const SimConfig& config, StockId stock, std::size_t length);

/// An agent's private approximation rule for one stock:
/// B(t) = F(t - lag) * (1 + bias) * exp(eta(t)), eta an AR(1) with
/// persistence `phi` and innovation scale `noise_scale`.
struct CointegrationRule {
    double bias = 0.0;
    int lag = 0;
    double phi = 0.9;
    double noise_scale = 0.01;
};

CointegrationRule draw_cointegration_rule(const SimConfig& config, RngStream& rng);

/// Single evaluation of the rule given the already-evolved noise state.
double cointegrate(const FundamentalSeries& series, const CointegrationRule& rule, std::size_t t, double eta);

/// One agent's view of one stock's fundamental: only B is reachable from here.
class Valuation {
public:
    Valuation() = default;

    /// Evolves the AR(1) noise with `rng` and materialises B over the whole
    /// series length. Steps before the lag read F(0).
    static Valuation build(const FundamentalSeries& series, const CointegrationRule& rule, RngStream& rng);

    double at(std::size_t t) const { return values_[t]; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    const CointegrationRule& rule() const { return rule_; }

private:
    CointegrationRule rule_{};
    std::vector<double> values_;
};

}  // namespace agora
