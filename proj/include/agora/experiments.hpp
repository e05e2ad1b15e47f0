#pragma once

#include "agora/config.hpp"
#include "agora/simulator.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace agora::experiments {

inline constexpr double kFractionGrid[] = {0.0, 0.2, 0.4, 0.6, 0.8};
inline constexpr double kZetaGrid[] = {0.5, 1.0, 1.5, 2.0, 2.5};
/// Multiplier applied to the selected agents in the lr-frac sweep.
inline constexpr double kFractionSweepZeta = 2.0;

struct SweepPoint {
    double fraction = 0.0;
    double zeta = 1.0;
};

struct SweepPlan {
    SimConfig base;
    ScenarioKind kind = ScenarioKind::Baseline;
    std::vector<SweepPoint> points;
    std::filesystem::path out;
};

/// The preset grid for `kind`: p over {0,...,0.8}, or zeta over {0.5,...,2.5}
/// for lr-global. Baseline is a single point.
SweepPlan preset_plan(ScenarioKind kind, const SimConfig& base, const std::filesystem::path& out);

SimConfig point_config(const SweepPlan& plan, const SweepPoint& point);

/// Abscissa of a configuration in the figures: zeta for lr-global, p otherwise.
double figure_x(const SimConfig& config);

/// All S runs of `config`, at most `jobs` at a time. Output is independent of `jobs`.
std::vector<MarketRecord> run_all(const SimConfig& config, int jobs, bool log_orders = false);

struct PointRuns {
    double x = 0.0;
    std::vector<MarketRecord> runs;
};

/// Figure CSVs by file name, plus notices for figures that could not be built.
struct FigureSet {
    std::map<std::string, std::string> files;
    std::vector<std::string> missing;
};

/// Every figure from in-memory or reloaded records. `calendar` supplies the
/// volatility lags and the crash rule.
FigureSet compute_figures(const SimConfig& calendar, std::span<const PointRuns> points);
void write_figures(const std::filesystem::path& dir, const FigureSet& figures);

/// summary.csv content: one row per point.
std::string summary_csv(const SimConfig& calendar, std::span<const PointRuns> points);

struct RunArgs {
    SimConfig config;
    std::filesystem::path out;
    int jobs = 1;
    bool log_orders = false;
};

/// Writes run_meta.json, run_<k>/ for every run and the figure CSVs.
/// The config is validated before anything is written. Throws on failure.
void cmd_run(const RunArgs& args, std::ostream& log);

/// Runs every point into point_<i>/ and writes summary.csv plus figures at the
/// root. A failing point is reported and skipped; returns the number of failures.
int cmd_sweep(const SweepPlan& plan, int jobs, std::ostream& log);

/// Rebuilds the figures (and summary.csv for a sweep) from a run or sweep
/// directory. Returns the number of figures that could not be produced.
int cmd_analyze(const std::filesystem::path& dir, std::ostream& log);

}  // namespace agora::experiments
