#pragma once

#include "agora/config.hpp"
#include "agora/policy.hpp"
#include "agora/simulator.hpp"

#include <map>
#include <span>
#include <vector>

namespace agora::analytics {

/// Mean absolute difference between two policy tables of equal shape.
/// Lies in [0, 2/|A|]. Throws std::invalid_argument on a shape mismatch.
double policy_distance(const PolicyTable& a, const PolicyTable& b);

/// Maximum of policy_distance for tables with `actions` columns.
constexpr double distance_bound(int actions) { return 2.0 / actions; }

/// Factor bringing trade-table distances onto the forecast-table scale:
/// the ratio of the two metrics' upper bounds, (2/27) / (2/9) = 1/3.
inline constexpr double kTradeToForecastScale = (2.0 / 27.0) / (2.0 / 9.0);

class DistanceMatrix {
public:
    explicit DistanceMatrix(std::span<const PolicyTable* const> tables);
    int size() const { return n_; }
    double at(int m, int n) const { return d_[static_cast<std::size_t>(m * n_ + n)]; }

private:
    int n_ = 0;
    std::vector<double> d_;
};

/// Agent indices of the top and bottom NAV deciles (floor(I/10), at least one
/// agent each). Ties rank by agent index, lower first.
struct Deciles {
    std::vector<int> best;
    std::vector<int> worst;
};
Deciles nav_deciles(std::span<const double> nav);

/// Mean pairwise distances between groups; NaN where no pair exists.
struct GroupDistances {
    double best_best = 0.0;
    double best_rest = 0.0;
    double best_worst = 0.0;
    double worst_rest = 0.0;
    double worst_worst = 0.0;
};

GroupDistances group_distances(const DistanceMatrix& d, const Deciles& deciles, double scale = 1.0);

struct GroupCurvePoint {
    long step = 0;
    GroupDistances forecast;
    /// already multiplied by kTradeToForecastScale
    GroupDistances trade;
};

/// One point per snapshot; deciles recomputed from each snapshot's NAVs.
std::vector<GroupCurvePoint> group_distance_curves(std::span<const PolicySnapshot> snapshots, int stock = 0);

struct Volatility {
    std::vector<double> series;
    double mean = 0.0;
};

/// sigma/P over each full window [t - lag + 1, t]; sample standard deviation.
Volatility rolling_volatility(std::span<const double> prices, int lag);

/// A crash starts at t when P(t) < (1 - threshold) max(P over the previous
/// `window` steps); qualifying steps within `window` of a crash's start belong to it.
int count_crashes(std::span<const double> prices, int window, double threshold);

std::vector<double> log_returns(std::span<const double> prices);

struct Moments {
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};
/// Population moments; skewness and kurtosis are 0 for a zero-variance sample.
Moments moments(std::span<const double> xs);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long> counts;

    double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size()); }
    long total() const;
};

/// Equal-width bins over [lo, hi]; values outside are clamped to the edge bins.
Histogram histogram(std::span<const double> xs, int bins, double lo, double hi);

struct ReturnDistribution {
    std::vector<double> returns;
    Histogram hist;
    Moments moments;
};

/// Log returns log(P(t)/P(t-1)) with a histogram over their observed range.
ReturnDistribution return_histogram(std::span<const double> prices, int bins);

/// Lengths of maximal strictly rising (+k) and strictly falling (-k) runs;
/// unchanged steps end a run and are not counted.
std::vector<int> run_lengths(std::span<const double> prices);
std::map<int, long> run_length_distribution(std::span<const double> prices);

enum class AgentParam { Reflexivity, Gesture };

struct DecileDistribution {
    Histogram best;
    Histogram worst;
    std::vector<double> best_values;
    std::vector<double> worst_values;
};

/// Histograms of rho or g over the best and worst final-NAV deciles. Bankrupt
/// agents stay in the ranking.
DecileDistribution decile_param_distribution(std::span<const AgentSummary> agents, AgentParam param, int bins = 10);

double median(std::vector<double> xs);

/// Mean over steps and runs of the bankrupt share, in percent.
double bankruptcy_rate(std::span<const MarketRecord> records);

/// Spearman rank correlation with average ranks for ties; NaN when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// Scalar statistics of one run (stock 0).
struct RunSummary {
    double vol_week = 0.0;
    double vol_month = 0.0;
    double vol_halfyear = 0.0;
    double crashes = 0.0;
    double volume = 0.0;
    double spread_pct = 0.0;
    double bankruptcy_pct = 0.0;
};

RunSummary summarize(const MarketRecord& record, const SimConfig& calendar, int stock = 0);
/// Field-wise mean of per-run summaries.
RunSummary summarize(std::span<const MarketRecord> records, const SimConfig& calendar, int stock = 0);

}  // namespace agora::analytics
