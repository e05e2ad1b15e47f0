#include "agora/experiments.hpp"

#include "agora/analytics.hpp"
#include "agora/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace agora::experiments {

namespace fs = std::filesystem;
using io::format_double;

namespace {

constexpr int kReturnBins = 50;
constexpr int kParamBins = 10;

const char* const kFigureNames[] = {"fig_K1.csv", "fig_I1.csv", "fig_I2.csv", "fig_N1.csv",
                                    "fig_N2.csv", "fig_N3.csv", "fig_L1.csv", "fig_L2.csv",
                                    "fig_L3.csv", "fig_L4.csv", "fig_K5.csv", "fig_K10.csv"};

/// Runs task(0..n-1) on at most `jobs` threads.
template <typename F>
void parallel_for(int n, int jobs, F&& task) {
    const int workers = std::max(1, std::min(jobs, n));
    if (workers == 1) {
        for (int k = 0; k < n; ++k) {
            task(k);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int k = next++; k < n; k = next++) {
                    try {
                        task(k);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

void add_mean(double& acc, int& n, double x) {
    if (!std::isnan(x)) {
        acc += x;
        ++n;
    }
}

double finish_mean(double acc, int n) { return n > 0 ? acc / n : std::nan(""); }

std::string group_cells(const analytics::GroupDistances& g) {
    return format_double(g.best_best) + ',' + format_double(g.best_rest) + ',' + format_double(g.best_worst) + ',' +
           format_double(g.worst_rest) + ',' + format_double(g.worst_worst);
}

struct GroupAccumulator {
    double v[5] = {};
    int n[5] = {};

    void add(const analytics::GroupDistances& g) {
        const double xs[5] = {g.best_best, g.best_rest, g.best_worst, g.worst_rest, g.worst_worst};
        for (int k = 0; k < 5; ++k) {
            add_mean(v[k], n[k], xs[k]);
        }
    }
    analytics::GroupDistances mean() const {
        return {finish_mean(v[0], n[0]), finish_mean(v[1], n[1]), finish_mean(v[2], n[2]), finish_mean(v[3], n[3]),
                finish_mean(v[4], n[4])};
    }
};

std::string figure_k1(std::span<const PointRuns> points) {
    std::ostringstream out;
    out << "x,step,forecast_best_best,forecast_best_rest,forecast_best_worst,forecast_worst_rest,"
           "forecast_worst_worst,trade_best_best,trade_best_rest,trade_best_worst,trade_worst_rest,"
           "trade_worst_worst\n";
    for (const auto& pt : points) {
        std::vector<long> steps;
        std::vector<GroupAccumulator> fc;
        std::vector<GroupAccumulator> tr;
        for (const auto& run : pt.runs) {
            const auto curves = analytics::group_distance_curves(run.snapshots);
            if (curves.size() > steps.size()) {
                steps.resize(curves.size());
                fc.resize(curves.size());
                tr.resize(curves.size());
            }
            for (std::size_t k = 0; k < curves.size(); ++k) {
                steps[k] = curves[k].step;
                fc[k].add(curves[k].forecast);
                tr[k].add(curves[k].trade);
            }
        }
        for (std::size_t k = 0; k < steps.size(); ++k) {
            out << format_double(pt.x) << ',' << steps[k] << ',' << group_cells(fc[k].mean()) << ','
                << group_cells(tr[k].mean()) << '\n';
        }
    }
    return out.str();
}

std::string figure_params(std::span<const PointRuns> points, analytics::AgentParam param) {
    std::ostringstream out;
    out << "x,bin_lo,bin_hi,best,worst,best_median,worst_median\n";
    for (const auto& pt : points) {
        std::vector<long> best;
        std::vector<long> worst;
        std::vector<double> best_values;
        std::vector<double> worst_values;
        double lo = 0.0;
        double hi = 0.0;
        for (const auto& run : pt.runs) {
            const auto d = analytics::decile_param_distribution(run.agents, param, kParamBins);
            lo = d.best.lo;
            hi = d.best.hi;
            best.resize(d.best.counts.size());
            worst.resize(d.worst.counts.size());
            for (std::size_t b = 0; b < best.size(); ++b) {
                best[b] += d.best.counts[b];
                worst[b] += d.worst.counts[b];
            }
            best_values.insert(best_values.end(), d.best_values.begin(), d.best_values.end());
            worst_values.insert(worst_values.end(), d.worst_values.begin(), d.worst_values.end());
        }
        const double width = best.empty() ? 0.0 : (hi - lo) / static_cast<double>(best.size());
        const auto bm = format_double(analytics::median(best_values));
        const auto wm = format_double(analytics::median(worst_values));
        for (std::size_t b = 0; b < best.size(); ++b) {
            out << format_double(pt.x) << ',' << format_double(lo + width * static_cast<double>(b)) << ','
                << format_double(lo + width * static_cast<double>(b + 1)) << ',' << best[b] << ',' << worst[b] << ','
                << bm << ',' << wm << '\n';
        }
    }
    return out.str();
}

std::string figure_returns(std::span<const PointRuns> points) {
    double range = 0.0;
    std::vector<std::vector<double>> pooled;
    for (const auto& pt : points) {
        auto& r = pooled.emplace_back();
        for (const auto& run : pt.runs) {
            const auto lr = analytics::log_returns(run.stocks.front().price);
            r.insert(r.end(), lr.begin(), lr.end());
        }
        for (double x : r) {
            range = std::max(range, std::abs(x));
        }
    }
    if (!(range > 0.0)) {
        range = 0.01;
    }
    std::ostringstream out;
    out << "x,bin_lo,bin_hi,count,mean,std,skewness,excess_kurtosis\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto h = analytics::histogram(pooled[i], kReturnBins, -range, range);
        const auto m = analytics::moments(pooled[i]);
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            out << format_double(points[i].x) << ',' << format_double(h.lo + h.bin_width() * static_cast<double>(b))
                << ',' << format_double(h.lo + h.bin_width() * static_cast<double>(b + 1)) << ',' << h.counts[b]
                << ',' << format_double(m.mean) << ',' << format_double(m.std) << ',' << format_double(m.skewness)
                << ',' << format_double(m.excess_kurtosis) << '\n';
        }
    }
    return out.str();
}

std::string figure_run_lengths(std::span<const PointRuns> points) {
    std::ostringstream out;
    out << "x,run_length,count\n";
    for (const auto& pt : points) {
        std::map<int, long> total;
        for (const auto& run : pt.runs) {
            for (const auto& [len, count] : analytics::run_length_distribution(run.stocks.front().price)) {
                total[len] += count;
            }
        }
        for (const auto& [len, count] : total) {
            out << format_double(pt.x) << ',' << len << ',' << count << '\n';
        }
    }
    return out.str();
}

using SummaryField = double analytics::RunSummary::*;

std::string figure_scalars(std::span<const analytics::RunSummary> summaries, std::span<const PointRuns> points,
                           std::initializer_list<std::pair<const char*, SummaryField>> columns) {
    std::ostringstream out;
    out << 'x';
    for (const auto& [name, field] : columns) {
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << format_double(points[i].x);
        for (const auto& [name, field] : columns) {
            out << ',' << format_double(summaries[i].*field);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<analytics::RunSummary> summaries_of(const SimConfig& calendar, std::span<const PointRuns> points) {
    std::vector<analytics::RunSummary> out;
    for (const auto& pt : points) {
        out.push_back(analytics::summarize(pt.runs, calendar));
    }
    return out;
}

fs::path point_dir(const fs::path& root, std::size_t index) { return root / ("point_" + std::to_string(index)); }

std::vector<MarketRecord> load_runs(const fs::path& dir, const io::RunMeta& meta) {
    std::vector<MarketRecord> runs;
    for (std::size_t k = 0; k < meta.seeds.size(); ++k) {
        auto record = io::read_run(io::run_dir(dir, static_cast<int>(k)));
        record.seed = meta.seeds[k];
        if (record.n_agents == 0) {
            record.n_agents = meta.config.n_agents;
        }
        runs.push_back(std::move(record));
    }
    return runs;
}

std::vector<std::uint64_t> seeds_of(const SimConfig& config) {
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < config.n_runs; ++k) {
        seeds.push_back(config.master_seed + static_cast<std::uint64_t>(k));
    }
    return seeds;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
        throw io::IoError("cannot write '" + path.string() + "'");
    }
}

/// Rejects an output location that is a file or cannot be created.
void prepare_out(const fs::path& out) {
    std::error_code ec;
    if (fs::exists(out, ec) && !fs::is_directory(out, ec)) {
        throw io::IoError("output path '" + out.string() + "' exists and is not a directory");
    }
    fs::create_directories(out, ec);
    if (ec) {
        throw io::IoError("cannot create output directory '" + out.string() + "': " + ec.message());
    }
}

/// Simulates and stores one configuration under `dir`; returns the records.
std::vector<MarketRecord> run_into(const SimConfig& config, const fs::path& dir, int jobs, bool log_orders) {
    const auto start = std::chrono::steady_clock::now();
    auto runs = run_all(config, jobs, log_orders);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        io::write_run(io::run_dir(dir, static_cast<int>(k)), runs[k]);
    }
    io::write_meta(dir / io::kMetaFile, {config, seeds_of(config), wall.count()});
    return runs;
}

void report_missing(const FigureSet& figures, std::ostream& log) {
    for (const auto& m : figures.missing) {
        log << "skipped " << m << '\n';
    }
}

}  // namespace

SweepPlan preset_plan(ScenarioKind kind, const SimConfig& base, const fs::path& out) {
    SweepPlan plan{base, kind, {}, out};
    switch (kind) {
        case ScenarioKind::Baseline:
            plan.points.push_back({0.0, 1.0});
            break;
        case ScenarioKind::LearnRateGlobal:
            for (double z : kZetaGrid) {
                plan.points.push_back({1.0, z});
            }
            break;
        case ScenarioKind::LearnRateFraction:
            for (double p : kFractionGrid) {
                plan.points.push_back({p, kFractionSweepZeta});
            }
            break;
        default:
            for (double p : kFractionGrid) {
                plan.points.push_back({p, 1.0});
            }
            break;
    }
    return plan;
}

SimConfig point_config(const SweepPlan& plan, const SweepPoint& point) {
    SimConfig c = plan.base;
    c.scenario = {plan.kind, point.fraction, point.zeta};
    return c;
}

double figure_x(const SimConfig& config) {
    switch (config.scenario.kind) {
        case ScenarioKind::Baseline: return 0.0;
        case ScenarioKind::LearnRateGlobal: return config.scenario.zeta;
        default: return config.scenario.fraction;
    }
}

std::vector<MarketRecord> run_all(const SimConfig& config, int jobs, bool log_orders) {
    validate(config);
    const int runs = config.n_runs;
    std::vector<MarketRecord> out(static_cast<std::size_t>(runs));
    const int threads_per_run = std::max(1, jobs / std::max(1, runs));
    parallel_for(runs, jobs, [&](int k) {
        SimOptions opts;
        opts.threads = threads_per_run;
        opts.log_orders = log_orders;
        out[static_cast<std::size_t>(k)] = run_simulation(config, k, std::move(opts));
    });
    return out;
}

FigureSet compute_figures(const SimConfig& calendar, std::span<const PointRuns> points) {
    FigureSet set;
    bool any_runs = false;
    bool snapshots = true;
    bool agents = true;
    for (const auto& pt : points) {
        for (const auto& run : pt.runs) {
            any_runs = true;
            snapshots = snapshots && !run.snapshots.empty();
            agents = agents && !run.agents.empty();
        }
    }
    if (!any_runs) {
        for (const char* name : kFigureNames) {
            set.missing.push_back(std::string(name) + ": no run records found");
        }
        return set;
    }
    if (snapshots) {
        set.files["fig_K1.csv"] = figure_k1(points);
    } else {
        set.missing.push_back("fig_K1.csv: policy snapshots absent");
    }
    if (agents) {
        set.files["fig_I1.csv"] = figure_params(points, analytics::AgentParam::Reflexivity);
        set.files["fig_I2.csv"] = figure_params(points, analytics::AgentParam::Gesture);
    } else {
        set.missing.push_back("fig_I1.csv: agents.csv absent");
        set.missing.push_back("fig_I2.csv: agents.csv absent");
    }
    const auto s = summaries_of(calendar, points);
    using RS = analytics::RunSummary;
    const auto vols = figure_scalars(
        s, points, {{"vol_week", &RS::vol_week}, {"vol_month", &RS::vol_month}, {"vol_halfyear", &RS::vol_halfyear}});
    set.files["fig_N1.csv"] = vols;
    set.files["fig_K5.csv"] = vols;
    const auto crashes = figure_scalars(s, points, {{"crashes", &RS::crashes}});
    set.files["fig_N2.csv"] = crashes;
    set.files["fig_L3.csv"] = crashes;
    set.files["fig_N3.csv"] = figure_scalars(s, points, {{"bankruptcy_pct", &RS::bankruptcy_pct}});
    set.files["fig_L1.csv"] = figure_returns(points);
    set.files["fig_L2.csv"] = figure_scalars(s, points, {{"volume", &RS::volume}});
    set.files["fig_L4.csv"] = figure_scalars(s, points, {{"spread_pct", &RS::spread_pct}});
    set.files["fig_K10.csv"] = figure_run_lengths(points);
    return set;
}

void write_figures(const fs::path& dir, const FigureSet& figures) {
    for (const auto& [name, text] : figures.files) {
        write_text(dir / name, text);
    }
}

std::string summary_csv(const SimConfig& calendar, std::span<const PointRuns> points) {
    std::ostringstream out;
    out << "x,vol_week,vol_month,vol_halfyear,crashes,volume,spread_pct,bankruptcy_pct\n";
    for (const auto& pt : points) {
        const auto s = analytics::summarize(pt.runs, calendar);
        out << format_double(pt.x) << ',' << format_double(s.vol_week) << ',' << format_double(s.vol_month) << ','
            << format_double(s.vol_halfyear) << ',' << format_double(s.crashes) << ',' << format_double(s.volume)
            << ',' << format_double(s.spread_pct) << ',' << format_double(s.bankruptcy_pct) << '\n';
    }
    return out.str();
}

void cmd_run(const RunArgs& args, std::ostream& log) {
    validate(args.config);
    prepare_out(args.out);
    auto runs = run_into(args.config, args.out, args.jobs, args.log_orders);
    const PointRuns pt{figure_x(args.config), std::move(runs)};
    const auto figures = compute_figures(args.config, std::span<const PointRuns>(&pt, 1));
    write_figures(args.out, figures);
    report_missing(figures, log);
    log << "wrote " << pt.runs.size() << " run(s) to " << args.out.string() << '\n';
}

int cmd_sweep(const SweepPlan& plan, int jobs, std::ostream& log) {
    std::vector<SimConfig> configs;
    for (const auto& point : plan.points) {
        configs.push_back(validate(point_config(plan, point)));
    }
    prepare_out(plan.out);
    std::vector<PointRuns> done;
    int failures = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        try {
            auto runs = run_into(configs[i], point_dir(plan.out, i), jobs, false);
            done.push_back({figure_x(configs[i]), std::move(runs)});
            log << "point " << i << " (x=" << format_double(done.back().x) << ") done\n";
        } catch (const std::exception& e) {
            ++failures;
            log << "point " << i << " failed: " << e.what() << '\n';
        }
    }
    write_text(plan.out / "summary.csv", summary_csv(plan.base, done));
    const auto figures = compute_figures(plan.base, done);
    write_figures(plan.out, figures);
    report_missing(figures, log);
    return failures;
}

int cmd_analyze(const fs::path& dir, std::ostream& log) {
    std::vector<PointRuns> points;
    SimConfig calendar;
    bool sweep = false;
    bool have_calendar = false;
    if (fs::exists(dir / io::kMetaFile)) {
        const auto meta = io::read_meta(dir / io::kMetaFile);
        calendar = meta.config;
        have_calendar = true;
        points.push_back({figure_x(meta.config), load_runs(dir, meta)});
    } else {
        for (std::size_t i = 0; fs::exists(point_dir(dir, i) / io::kMetaFile); ++i) {
            const auto meta = io::read_meta(point_dir(dir, i) / io::kMetaFile);
            if (!have_calendar) {
                calendar = meta.config;
                have_calendar = true;
            }
            points.push_back({figure_x(meta.config), load_runs(point_dir(dir, i), meta)});
            sweep = true;
        }
    }
    const auto figures = compute_figures(calendar, points);
    if (!have_calendar) {
        log << "no run_meta.json found under " << dir.string() << '\n';
    }
    write_figures(dir, figures);
    if (sweep) {
        write_text(dir / "summary.csv", summary_csv(calendar, points));
    }
    report_missing(figures, log);
    log << "wrote " << figures.files.size() << " figure(s) to " << dir.string() << '\n';
    return static_cast<int>(figures.missing.size());
}

}  // namespace agora::experiments
