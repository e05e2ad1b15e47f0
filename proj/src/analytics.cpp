#include "agora/analytics.hpp"

#include "agora/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace agora::analytics {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double policy_distance(const PolicyTable& a, const PolicyTable& b) {
    if (a.states() != b.states() || a.actions() != b.actions()) {
        throw std::invalid_argument("policy tables differ in shape");
    }
    const auto pa = a.data();
    const auto pb = b.data();
    // Neumaier summation
    double total = 0.0;
    double carry = 0.0;
    for (std::size_t k = 0; k < pa.size(); ++k) {
        const double x = std::abs(pa[k] - pb[k]);
        const double t = total + x;
        carry += std::abs(total) >= x ? (total - t) + x : (x - t) + total;
        total = t;
    }
    return (total + carry) / static_cast<double>(pa.size());
}

DistanceMatrix::DistanceMatrix(std::span<const PolicyTable* const> tables)
    : n_(static_cast<int>(tables.size())), d_(tables.size() * tables.size(), 0.0) {
    for (int m = 0; m < n_; ++m) {
        for (int n = m + 1; n < n_; ++n) {
            const double d = policy_distance(*tables[static_cast<std::size_t>(m)], *tables[static_cast<std::size_t>(n)]);
            d_[static_cast<std::size_t>(m * n_ + n)] = d;
            d_[static_cast<std::size_t>(n * n_ + m)] = d;
        }
    }
}

Deciles nav_deciles(std::span<const double> nav) {
    const int n = static_cast<int>(nav.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return nav[static_cast<std::size_t>(a)] > nav[static_cast<std::size_t>(b)];
    });
    const int size = std::max(1, n / 10);
    Deciles d;
    d.best.assign(order.begin(), order.begin() + size);
    // worst decile: lowest NAVs, with equal-NAV agents of higher index ranked worse
    d.worst.assign(order.end() - size, order.end());
    return d;
}

namespace {

double within(const DistanceMatrix& d, const std::vector<int>& group) {
    double total = 0.0;
    long pairs = 0;
    for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
            total += d.at(group[a], group[b]);
            ++pairs;
        }
    }
    return pairs > 0 ? total / static_cast<double>(pairs) : kNaN;
}

double across(const DistanceMatrix& d, const std::vector<int>& g1, const std::vector<int>& g2) {
    double total = 0.0;
    long pairs = 0;
    for (int a : g1) {
        for (int b : g2) {
            if (a != b) {
                total += d.at(a, b);
                ++pairs;
            }
        }
    }
    return pairs > 0 ? total / static_cast<double>(pairs) : kNaN;
}

std::vector<int> complement(int n, const std::vector<int>& group) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (int g : group) {
        in[static_cast<std::size_t>(g)] = true;
    }
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
        if (!in[static_cast<std::size_t>(i)]) {
            rest.push_back(i);
        }
    }
    return rest;
}

}  // namespace

GroupDistances group_distances(const DistanceMatrix& d, const Deciles& deciles, double scale) {
    GroupDistances g;
    g.best_best = scale * within(d, deciles.best);
    g.best_rest = scale * across(d, deciles.best, complement(d.size(), deciles.best));
    g.best_worst = scale * across(d, deciles.best, deciles.worst);
    g.worst_rest = scale * across(d, deciles.worst, complement(d.size(), deciles.worst));
    g.worst_worst = scale * within(d, deciles.worst);
    return g;
}

std::vector<GroupCurvePoint> group_distance_curves(std::span<const PolicySnapshot> snapshots, int stock) {
    std::vector<GroupCurvePoint> out;
    for (const auto& snap : snapshots) {
        const int n = static_cast<int>(snap.nav.size());
        std::vector<const PolicyTable*> ft;
        std::vector<const PolicyTable*> tt;
        for (int i = 0; i < n; ++i) {
            ft.push_back(&snap.forecast_of(i, stock));
            tt.push_back(&snap.trade_of(i, stock));
        }
        const auto deciles = nav_deciles(snap.nav);
        GroupCurvePoint p;
        p.step = snap.step;
        p.forecast = group_distances(DistanceMatrix(ft), deciles);
        p.trade = group_distances(DistanceMatrix(tt), deciles, kTradeToForecastScale);
        out.push_back(p);
    }
    return out;
}

Volatility rolling_volatility(std::span<const double> prices, int lag) {
    Volatility v;
    if (lag < 1 || prices.size() < static_cast<std::size_t>(lag)) {
        return v;
    }
    const auto L = static_cast<std::size_t>(lag);
    for (std::size_t t = L - 1; t < prices.size(); ++t) {
        v.series.push_back(sample_std(prices.subspan(t + 1 - L, L)) / prices[t]);
    }
    v.mean = mean(v.series);
    return v;
}

int count_crashes(std::span<const double> prices, int window, double threshold) {
    int events = 0;
    long last_start = std::numeric_limits<long>::min() / 2;
    for (std::size_t t = 1; t < prices.size(); ++t) {
        const std::size_t from = t >= static_cast<std::size_t>(window) ? t - static_cast<std::size_t>(window) : 0;
        const double peak = *std::max_element(prices.begin() + static_cast<std::ptrdiff_t>(from),
                                              prices.begin() + static_cast<std::ptrdiff_t>(t));
        if (prices[t] < (1.0 - threshold) * peak) {
            const long lt = static_cast<long>(t);
            if (lt - last_start >= window) {
                ++events;
                last_start = lt;
            }
        }
    }
    return events;
}

std::vector<double> log_returns(std::span<const double> prices) {
    std::vector<double> r;
    for (std::size_t t = 1; t < prices.size(); ++t) {
        r.push_back(std::log(prices[t] / prices[t - 1]));
    }
    return r;
}

Moments moments(std::span<const double> xs) {
    Moments m;
    if (xs.empty()) {
        return m;
    }
    const double n = static_cast<double>(xs.size());
    m.mean = mean(xs);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.std = std::sqrt(m2);
    if (m2 > 0.0) {
        m.skewness = m3 / std::pow(m2, 1.5);
        m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

long Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

Histogram histogram(std::span<const double> xs, int bins, double lo, double hi) {
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.counts.assign(static_cast<std::size_t>(std::max(bins, 1)), 0);
    const double width = hi > lo ? (hi - lo) / static_cast<double>(h.counts.size()) : 0.0;
    for (double x : xs) {
        std::size_t k = 0;
        if (width > 0.0) {
            const double pos = std::floor((x - lo) / width);
            k = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(h.counts.size() - 1)));
        }
        ++h.counts[k];
    }
    return h;
}

ReturnDistribution return_histogram(std::span<const double> prices, int bins) {
    ReturnDistribution d;
    d.returns = log_returns(prices);
    d.moments = moments(d.returns);
    double lo = 0.0;
    double hi = 0.0;
    if (!d.returns.empty()) {
        const auto [mn, mx] = std::minmax_element(d.returns.begin(), d.returns.end());
        lo = *mn;
        hi = *mx;
    }
    d.hist = histogram(d.returns, bins, lo, hi);
    return d;
}

std::vector<int> run_lengths(std::span<const double> prices) {
    std::vector<int> runs;
    int current = 0;
    for (std::size_t t = 1; t < prices.size(); ++t) {
        const int dir = prices[t] > prices[t - 1] ? 1 : (prices[t] < prices[t - 1] ? -1 : 0);
        if (dir != 0 && current != 0 && (current > 0) == (dir > 0)) {
            current += dir;
            continue;
        }
        if (current != 0) {
            runs.push_back(current);
        }
        current = dir;
    }
    if (current != 0) {
        runs.push_back(current);
    }
    return runs;
}

std::map<int, long> run_length_distribution(std::span<const double> prices) {
    std::map<int, long> out;
    for (int r : run_lengths(prices)) {
        ++out[r];
    }
    return out;
}

DecileDistribution decile_param_distribution(std::span<const AgentSummary> agents, AgentParam param, int bins) {
    std::vector<double> nav;
    for (const auto& a : agents) {
        nav.push_back(a.final_nav);
    }
    const auto deciles = nav_deciles(nav);
    const auto value = [&](int i) {
        const auto& p = agents[static_cast<std::size_t>(i)].params;
        return param == AgentParam::Reflexivity ? p.reflexivity : p.gesture;
    };
    const double lo = param == AgentParam::Reflexivity ? 0.0 : 0.2;
    const double hi = param == AgentParam::Reflexivity ? 1.0 : 0.8;
    DecileDistribution d;
    for (int i : deciles.best) {
        d.best_values.push_back(value(i));
    }
    for (int i : deciles.worst) {
        d.worst_values.push_back(value(i));
    }
    d.best = histogram(d.best_values, bins, lo, hi);
    d.worst = histogram(d.worst_values, bins, lo, hi);
    return d;
}

double median(std::vector<double> xs) {
    if (xs.empty()) {
        return kNaN;
    }
    return quantile_inplace(xs, 0.5);
}

double bankruptcy_rate(std::span<const MarketRecord> records) {
    double total = 0.0;
    long steps = 0;
    for (const auto& r : records) {
        for (int count : r.bankrupt_count) {
            total += static_cast<double>(count) / r.n_agents;
            ++steps;
        }
    }
    return steps > 0 ? 100.0 * total / static_cast<double>(steps) : 0.0;
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return kNaN;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman needs two equally sized samples of at least two values");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

RunSummary summarize(const MarketRecord& record, const SimConfig& calendar, int stock) {
    RunSummary s;
    const auto& st = record.stocks[static_cast<std::size_t>(stock)];
    const std::span<const double> prices(st.price);
    s.vol_week = rolling_volatility(prices, calendar.week_len).mean;
    s.vol_month = rolling_volatility(prices, calendar.month_len).mean;
    s.vol_halfyear = rolling_volatility(prices, 6 * calendar.month_len).mean;
    s.crashes = count_crashes(prices, calendar.month_len, calendar.crash_threshold);
    s.volume = mean(st.volume);
    double spread_total = 0.0;
    long spread_n = 0;
    for (std::size_t k = 0; k < st.spread.size(); ++k) {
        if (!std::isnan(st.spread[k])) {
            spread_total += 100.0 * st.spread[k] / st.price[k];
            ++spread_n;
        }
    }
    s.spread_pct = spread_n > 0 ? spread_total / static_cast<double>(spread_n) : 0.0;
    s.bankruptcy_pct = bankruptcy_rate(std::span<const MarketRecord>(&record, 1));
    return s;
}

RunSummary summarize(std::span<const MarketRecord> records, const SimConfig& calendar, int stock) {
    RunSummary total;
    if (records.empty()) {
        return total;
    }
    for (const auto& r : records) {
        const auto s = summarize(r, calendar, stock);
        total.vol_week += s.vol_week;
        total.vol_month += s.vol_month;
        total.vol_halfyear += s.vol_halfyear;
        total.crashes += s.crashes;
        total.volume += s.volume;
        total.spread_pct += s.spread_pct;
        total.bankruptcy_pct += s.bankruptcy_pct;
    }
    const double n = static_cast<double>(records.size());
    total.vol_week /= n;
    total.vol_month /= n;
    total.vol_halfyear /= n;
    total.crashes /= n;
    total.volume /= n;
    total.spread_pct /= n;
    total.bankruptcy_pct /= n;
    return total;
}

}  // namespace agora::analytics
