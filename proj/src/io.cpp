#include "agora/io.hpp"

#include "agora/analytics.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace agora::io {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

constexpr char kSnapshotMagic[4] = {'A', 'G', 'P', 'S'};
constexpr std::uint32_t kSnapshotVersion = 1;

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    return in;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename T>
T parse_int(std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw IoError("malformed integer '" + std::string(text) + "'");
    }
    return value;
}

/// Rows of a CSV file after checking its header.
class CsvReader {
public:
    CsvReader(const fs::path& path, std::string_view header) : path_(path), in_(open_in(path)) {
        std::string line;
        if (!std::getline(in_, line) || strip(line) != header) {
            throw IoError("'" + path.string() + "' does not start with header '" + std::string(header) + "'");
        }
        columns_ = split(header).size();
    }

    bool next(std::vector<std::string_view>& cells) {
        while (std::getline(in_, line_)) {
            const auto view = strip(line_);
            if (view.empty()) {
                continue;
            }
            cells = split(view);
            if (cells.size() != columns_) {
                throw IoError("'" + path_.string() + "': expected " + std::to_string(columns_) + " columns");
            }
            return true;
        }
        return false;
    }

private:
    static std::string_view strip(std::string_view s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) {
            s.remove_suffix(1);
        }
        return s;
    }

    fs::path path_;
    std::ifstream in_;
    std::string line_;
    std::size_t columns_ = 0;
};

template <typename T>
void put(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw IoError("truncated policy snapshot");
    }
    return value;
}

void put_doubles(std::ostream& out, std::span<const double> xs) {
    out.write(reinterpret_cast<const char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& in, std::size_t n) {
    std::vector<double> xs(n);
    in.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) {
        throw IoError("truncated policy snapshot");
    }
    return xs;
}

void put_table(std::ostream& out, const PolicyTable& t) {
    put(out, static_cast<std::uint32_t>(t.states()));
    put(out, static_cast<std::uint32_t>(t.actions()));
    put_doubles(out, t.data());
}

PolicyTable get_table(std::istream& in) {
    const auto states = get<std::uint32_t>(in);
    const auto actions = get<std::uint32_t>(in);
    if (states == 0 || actions == 0 || states > 100000 || actions > 100000) {
        throw IoError("corrupt policy table dimensions");
    }
    auto data = get_doubles(in, static_cast<std::size_t>(states) * actions);
    return PolicyTable::from_data(static_cast<int>(states), static_cast<int>(actions), std::move(data));
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) {
        return {};
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    if (text.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw IoError("malformed number '" + std::string(text) + "'");
    }
    return value;
}

void write_prices(const fs::path& path, const MarketRecord& record) {
    auto out = open_out(path);
    out << "step,stock,price,volume,spread,bankrupt_count\n";
    for (std::size_t k = 0; k < record.steps(); ++k) {
        for (std::size_t j = 0; j < record.stocks.size(); ++j) {
            const auto& s = record.stocks[j];
            out << k << ',' << j << ',' << format_double(s.price[k]) << ',' << format_double(s.volume[k]) << ','
                << format_double(s.spread[k]) << ',' << record.bankrupt_count[k] << '\n';
        }
    }
    finish(out, path);
}

void write_agents(const fs::path& path, const MarketRecord& record) {
    auto out = open_out(path);
    out << "agent_id,role,drawdown_limit,reflexivity,horizon,trading_window,memory,gesture,learn_rate,final_nav,"
           "bankrupt,bankruptcy_step\n";
    for (const auto& a : record.agents) {
        const auto& p = a.params;
        out << a.id << ',' << to_string(a.role) << ',' << format_double(p.drawdown_limit) << ','
            << format_double(p.reflexivity) << ',' << p.horizon << ',' << p.trading_window << ',' << p.memory << ','
            << format_double(p.gesture) << ',' << format_double(p.learn_rate) << ',' << format_double(a.final_nav)
            << ',' << (a.bankrupt ? 1 : 0) << ',' << a.bankruptcy_step << '\n';
    }
    finish(out, path);
}

void write_fundamentals(const fs::path& path, const MarketRecord& record) {
    auto out = open_out(path);
    out << "step,stock,fundamental,total_shares\n";
    for (std::size_t k = 0; k < record.steps(); ++k) {
        for (std::size_t j = 0; j < record.stocks.size(); ++j) {
            const auto& s = record.stocks[j];
            out << k << ',' << j << ',' << format_double(s.fundamental[k]) << ',' << s.total_shares[k] << '\n';
        }
    }
    finish(out, path);
}

void write_orders(const fs::path& path, const MarketRecord& record) {
    auto out = open_out(path);
    out << "step,agent_id,stock_id,side,price,quantity,filled_quantity\n";
    for (const auto& e : record.orders) {
        out << e.step << ',' << e.order.agent_id << ',' << e.order.stock_id << ','
            << (e.order.side == Side::Bid ? "bid" : "ask") << ',' << format_double(e.order.price) << ','
            << e.order.quantity << ',' << e.filled << '\n';
    }
    finish(out, path);
}

void write_snapshot(const fs::path& path, const PolicySnapshot& snap) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    put(out, kSnapshotVersion);
    put(out, static_cast<std::int64_t>(snap.step));
    put(out, static_cast<std::uint32_t>(snap.nav.size()));
    put(out, static_cast<std::uint32_t>(snap.n_stocks));
    put_doubles(out, snap.nav);
    for (const auto& t : snap.forecast) {
        put_table(out, t);
    }
    for (const auto& t : snap.trade) {
        put_table(out, t);
    }
    finish(out, path);
}

void read_prices(const fs::path& path, MarketRecord& record) {
    CsvReader csv(path, "step,stock,price,volume,spread,bankrupt_count");
    record.stocks.clear();
    record.bankrupt_count.clear();
    std::vector<std::string_view> c;
    while (csv.next(c)) {
        const auto step = parse_int<std::size_t>(c[0]);
        const auto stock = parse_int<std::size_t>(c[1]);
        if (stock >= record.stocks.size()) {
            if (step != 0) {
                throw IoError("'" + path.string() + "': stock " + std::to_string(stock) + " first seen after step 0");
            }
            record.stocks.resize(stock + 1);
        }
        auto& s = record.stocks[stock];
        if (s.price.size() != step) {
            throw IoError("'" + path.string() + "': rows out of order at step " + std::to_string(step));
        }
        s.price.push_back(parse_double(c[2]));
        s.volume.push_back(parse_double(c[3]));
        s.spread.push_back(parse_double(c[4]));
        if (stock == 0) {
            record.bankrupt_count.push_back(parse_int<int>(c[5]));
        }
    }
    record.n_stocks = static_cast<int>(record.stocks.size());
    for (const auto& s : record.stocks) {
        if (s.price.size() != record.bankrupt_count.size()) {
            throw IoError("'" + path.string() + "': stocks cover different step ranges");
        }
    }
}

std::vector<AgentSummary> read_agents(const fs::path& path) {
    CsvReader csv(path,
                  "agent_id,role,drawdown_limit,reflexivity,horizon,trading_window,memory,gesture,learn_rate,final_nav,"
                  "bankrupt,bankruptcy_step");
    std::vector<AgentSummary> agents;
    std::vector<std::string_view> c;
    while (csv.next(c)) {
        AgentSummary a;
        a.id = parse_int<AgentId>(c[0]);
        try {
            a.role = agent_role_from_string(c[1]);
        } catch (const std::invalid_argument& e) {
            throw IoError(path.string() + ": " + e.what());
        }
        a.params.drawdown_limit = parse_double(c[2]);
        a.params.reflexivity = parse_double(c[3]);
        a.params.horizon = parse_int<int>(c[4]);
        a.params.trading_window = parse_int<int>(c[5]);
        a.params.memory = parse_int<int>(c[6]);
        a.params.gesture = parse_double(c[7]);
        a.params.learn_rate = parse_double(c[8]);
        a.final_nav = parse_double(c[9]);
        a.bankrupt = parse_int<int>(c[10]) != 0;
        a.bankruptcy_step = parse_int<long>(c[11]);
        agents.push_back(a);
    }
    return agents;
}

void read_fundamentals(const fs::path& path, MarketRecord& record) {
    CsvReader csv(path, "step,stock,fundamental,total_shares");
    for (auto& s : record.stocks) {
        s.fundamental.clear();
        s.total_shares.clear();
    }
    std::vector<std::string_view> c;
    while (csv.next(c)) {
        const auto stock = parse_int<std::size_t>(c[1]);
        if (stock >= record.stocks.size()) {
            throw IoError("'" + path.string() + "': unknown stock " + std::to_string(stock));
        }
        record.stocks[stock].fundamental.push_back(parse_double(c[2]));
        record.stocks[stock].total_shares.push_back(parse_int<Quantity>(c[3]));
    }
}

PolicySnapshot read_snapshot(const fs::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[4] = {};
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
        throw IoError("'" + path.string() + "' is not a policy snapshot");
    }
    if (get<std::uint32_t>(in) != kSnapshotVersion) {
        throw IoError("'" + path.string() + "': unsupported snapshot version");
    }
    PolicySnapshot snap;
    snap.step = static_cast<long>(get<std::int64_t>(in));
    const auto agents = get<std::uint32_t>(in);
    snap.n_stocks = static_cast<int>(get<std::uint32_t>(in));
    if (snap.n_stocks <= 0) {
        throw IoError("'" + path.string() + "': corrupt stock count");
    }
    snap.nav = get_doubles(in, agents);
    const std::size_t tables = static_cast<std::size_t>(agents) * static_cast<std::size_t>(snap.n_stocks);
    snap.forecast.reserve(tables);
    snap.trade.reserve(tables);
    for (std::size_t k = 0; k < tables; ++k) {
        snap.forecast.push_back(get_table(in));
    }
    for (std::size_t k = 0; k < tables; ++k) {
        snap.trade.push_back(get_table(in));
    }
    return snap;
}

void write_run(const fs::path& dir, const MarketRecord& record) {
    fs::create_directories(dir);
    write_prices(dir / kPricesFile, record);
    write_agents(dir / kAgentsFile, record);
    write_fundamentals(dir / kFundamentalFile, record);
    if (!record.orders.empty()) {
        write_orders(dir / kOrdersFile, record);
    }
    if (!record.snapshots.empty()) {
        const auto pdir = dir / kPoliciesDir;
        fs::create_directories(pdir);
        for (const auto& snap : record.snapshots) {
            char name[32];
            std::snprintf(name, sizeof(name), "step_%07ld.bin", snap.step);
            write_snapshot(pdir / name, snap);
        }
    }
}

MarketRecord read_run(const fs::path& dir) {
    MarketRecord record;
    read_prices(dir / kPricesFile, record);
    if (fs::exists(dir / kAgentsFile)) {
        record.agents = read_agents(dir / kAgentsFile);
        record.n_agents = static_cast<int>(record.agents.size());
    }
    if (fs::exists(dir / kFundamentalFile)) {
        read_fundamentals(dir / kFundamentalFile, record);
    }
    const auto pdir = dir / kPoliciesDir;
    if (fs::is_directory(pdir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(pdir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".bin") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            record.snapshots.push_back(read_snapshot(f));
        }
        if (record.n_agents == 0 && !record.snapshots.empty()) {
            record.n_agents = static_cast<int>(record.snapshots.front().nav.size());
        }
    }
    return record;
}

fs::path run_dir(const fs::path& root, int run_index) { return root / ("run_" + std::to_string(run_index)); }

void write_meta(const fs::path& path, const RunMeta& meta) {
    nlohmann::ordered_json j;
    j["format"] = "agora-run/1";
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config_to_map(meta.config)) {
        cfg[key] = value;
    }
    j["config"] = cfg;
    j["seeds"] = meta.seeds;
    j["wall_time_seconds"] = meta.wall_seconds;
    j["trade_distance_scale"] = analytics::kTradeToForecastScale;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

RunMeta read_meta(const fs::path& path) {
    auto in = open_in(path);
    RunMeta meta;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& [key, value] : j.at("config").items()) {
            apply_setting(meta.config, key, value.get<std::string>());
        }
        meta.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        meta.wall_seconds = j.value("wall_time_seconds", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    } catch (const ConfigError& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
    return meta;
}

}  // namespace agora::io
