#pragma once

#include "agora/config.hpp"
#include "agora/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/// Run artifacts on disk. Every double is written in its shortest round-trip
/// form, so a record read back is bit-identical to the one written.
namespace agora::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal that parses back to `x`; empty for NaN.
std::string format_double(double x);
/// Inverse of format_double; empty text gives NaN. Throws IoError.
double parse_double(std::string_view text);

void write_prices(const std::filesystem::path& path, const MarketRecord& record);
void write_agents(const std::filesystem::path& path, const MarketRecord& record);
void write_fundamentals(const std::filesystem::path& path, const MarketRecord& record);
void write_orders(const std::filesystem::path& path, const MarketRecord& record);
void write_snapshot(const std::filesystem::path& path, const PolicySnapshot& snapshot);

/// Fills stocks (price, volume, spread) and bankrupt_count.
void read_prices(const std::filesystem::path& path, MarketRecord& record);
std::vector<AgentSummary> read_agents(const std::filesystem::path& path);
/// Fills stocks[j].fundamental and total_shares; stocks must already be sized.
void read_fundamentals(const std::filesystem::path& path, MarketRecord& record);
PolicySnapshot read_snapshot(const std::filesystem::path& path);

inline constexpr std::string_view kPricesFile = "prices.csv";
inline constexpr std::string_view kAgentsFile = "agents.csv";
inline constexpr std::string_view kFundamentalFile = "fundamental.csv";
inline constexpr std::string_view kOrdersFile = "orders.csv";
inline constexpr std::string_view kPoliciesDir = "policies";
inline constexpr std::string_view kMetaFile = "run_meta.json";

/// Writes prices, agents, fundamentals, snapshots and, when logged, orders.
void write_run(const std::filesystem::path& dir, const MarketRecord& record);

/// Reads what write_run produced. prices.csv is required; agents.csv and the
/// snapshots are loaded when present (AgentSummary list and snapshots stay
/// empty otherwise).
MarketRecord read_run(const std::filesystem::path& dir);

std::filesystem::path run_dir(const std::filesystem::path& root, int run_index);

struct RunMeta {
    SimConfig config;
    std::vector<std::uint64_t> seeds;
    double wall_seconds = 0.0;
};

void write_meta(const std::filesystem::path& path, const RunMeta& meta);
RunMeta read_meta(const std::filesystem::path& path);

}  // namespace agora::io
