#include "agora/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace agora {

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double quantile_inplace(std::vector<double>& scratch, double prob) {
    if (scratch.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    const double pos = prob * static_cast<double>(scratch.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.end());
    const double lo_value = scratch[lo];
    if (frac == 0.0 || lo + 1 >= scratch.size()) {
        return lo_value;
    }
    const double hi_value = *std::min_element(scratch.begin() + static_cast<std::ptrdiff_t>(lo) + 1, scratch.end());
    return lo_value + frac * (hi_value - lo_value);
}

namespace {

thread_local std::vector<double> tl_scratch;

int tercile_of_scratch(double value) {
    if (tl_scratch.empty()) {
        return 1;
    }
    const double q1 = quantile_inplace(tl_scratch, 1.0 / 3.0);
    const double q2 = quantile_inplace(tl_scratch, 2.0 / 3.0);
    if (value < q1) {
        return 0;
    }
    if (value > q2) {
        return 2;
    }
    return 1;
}

}  // namespace

int tercile(double value, std::span<const double> history) {
    tl_scratch.assign(history.begin(), history.end());
    return tercile_of_scratch(value);
}

int tercile(double value, const History& history) {
    tl_scratch.assign(history.values().begin(), history.values().end());
    return tercile_of_scratch(value);
}

bool at_or_above_median(double value, const History& history) {
    if (history.empty()) {
        return false;
    }
    tl_scratch.assign(history.values().begin(), history.values().end());
    return value >= quantile_inplace(tl_scratch, 0.5);
}

int sextile_reward(std::size_t beaten, std::size_t total) {
    static constexpr std::array<int, 6> kRewards{-4, -2, -1, 1, 2, 4};
    if (total == 0) {
        throw std::invalid_argument("sextile reward needs a nonempty history");
    }
    const std::size_t bin = std::min<std::size_t>(5, (6 * std::min(beaten, total)) / total);
    return kRewards[bin];
}

std::size_t count_below(double value, const History& history) {
    return static_cast<std::size_t>(
        std::count_if(history.values().begin(), history.values().end(), [value](double x) { return x < value; }));
}

std::size_t count_above(double value, const History& history) {
    return static_cast<std::size_t>(
        std::count_if(history.values().begin(), history.values().end(), [value](double x) { return x > value; }));
}

}  // namespace agora
