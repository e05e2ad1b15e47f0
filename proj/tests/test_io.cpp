#include "agora/io.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

using namespace agora;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

SimConfig tiny_config() {
    SimConfig c = preset_config(Scale::Desk);
    c.n_agents = 20;
    c.n_steps = 140;
    c.learning_phase = 30;
    c.snapshot_interval = 50;
    return c;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("property: doubles round-trip through text bit-exactly") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100000; ++i) {
        const double x = std::bit_cast<double>(rng());
        if (!std::isfinite(x)) {
            continue;
        }
        REQUIRE(std::bit_cast<std::uint64_t>(io::parse_double(io::format_double(x))) ==
                std::bit_cast<std::uint64_t>(x));
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(std::nan("")).empty());
    CHECK(std::isnan(io::parse_double("")));
    CHECK_THROWS_AS(io::parse_double("1.5x"), io::IoError);
    CHECK_THROWS_AS(io::parse_double("abc"), io::IoError);
}

TEST_CASE("a run written to disk reads back identically") {
    TempDir tmp("agora_test_io_run");
    SimOptions opts;
    opts.log_orders = true;
    const auto rec = run_simulation(tiny_config(), 0, opts);
    io::write_run(tmp.path, rec);
    CHECK(fs::exists(tmp.path / io::kPricesFile));
    CHECK(fs::exists(tmp.path / io::kAgentsFile));
    CHECK(fs::exists(tmp.path / io::kFundamentalFile));
    CHECK(fs::exists(tmp.path / io::kOrdersFile));

    const auto back = io::read_run(tmp.path);
    CHECK(back.n_agents == rec.n_agents);
    CHECK(back.n_stocks == rec.n_stocks);
    REQUIRE(back.stocks.size() == rec.stocks.size());
    CHECK(same_bits(back.stocks[0].price, rec.stocks[0].price));
    CHECK(same_bits(back.stocks[0].volume, rec.stocks[0].volume));
    CHECK(same_bits(back.stocks[0].spread, rec.stocks[0].spread));
    CHECK(same_bits(back.stocks[0].fundamental, rec.stocks[0].fundamental));
    CHECK(back.stocks[0].total_shares == rec.stocks[0].total_shares);
    CHECK(back.bankrupt_count == rec.bankrupt_count);

    REQUIRE(back.agents.size() == rec.agents.size());
    for (std::size_t i = 0; i < rec.agents.size(); ++i) {
        CHECK(back.agents[i].id == rec.agents[i].id);
        CHECK(back.agents[i].params == rec.agents[i].params);
        CHECK(back.agents[i].role == rec.agents[i].role);
        CHECK(back.agents[i].final_nav == rec.agents[i].final_nav);
        CHECK(back.agents[i].bankrupt == rec.agents[i].bankrupt);
        CHECK(back.agents[i].bankruptcy_step == rec.agents[i].bankruptcy_step);
    }

    REQUIRE(back.snapshots.size() == rec.snapshots.size());
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        CHECK(back.snapshots[k].step == rec.snapshots[k].step);
        CHECK(same_bits(back.snapshots[k].nav, rec.snapshots[k].nav));
        CHECK(back.snapshots[k].forecast == rec.snapshots[k].forecast);
        CHECK(back.snapshots[k].trade == rec.snapshots[k].trade);
    }

    std::ifstream orders(tmp.path / io::kOrdersFile);
    std::string header;
    std::getline(orders, header);
    CHECK(header == "step,agent_id,stock_id,side,price,quantity,filled_quantity");
    std::size_t lines = 0;
    for (std::string line; std::getline(orders, line);) {
        ++lines;
    }
    CHECK(lines == rec.orders.size());
}

TEST_CASE("orders are only written when logged") {
    TempDir tmp("agora_test_io_noorders");
    io::write_run(tmp.path, run_simulation(tiny_config(), 0));
    CHECK_FALSE(fs::exists(tmp.path / io::kOrdersFile));
}

TEST_CASE("malformed inputs are rejected") {
    TempDir tmp("agora_test_io_bad");
    MarketRecord rec;
    CHECK_THROWS_AS(io::read_prices(tmp.path / "missing.csv", rec), io::IoError);

    write_text(tmp.path / "wrong_header.csv", "a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(io::read_prices(tmp.path / "wrong_header.csv", rec), io::IoError);

    write_text(tmp.path / "short_row.csv", "step,stock,price,volume,spread,bankrupt_count\n0,0,100\n");
    CHECK_THROWS_AS(io::read_prices(tmp.path / "short_row.csv", rec), io::IoError);

    write_text(tmp.path / "bad_number.csv", "step,stock,price,volume,spread,bankrupt_count\n0,0,1oo,5,,0\n");
    CHECK_THROWS_AS(io::read_prices(tmp.path / "bad_number.csv", rec), io::IoError);

    write_text(tmp.path / "agents.csv", "agent_id,role\n0,noise\n");
    CHECK_THROWS_AS(io::read_agents(tmp.path / "agents.csv"), io::IoError);

    write_text(tmp.path / "bad.bin", "NOPE");
    CHECK_THROWS_AS(io::read_snapshot(tmp.path / "bad.bin"), io::IoError);

    PolicySnapshot snap;
    snap.step = 3;
    snap.nav = {1.0, 2.0};
    snap.forecast = {PolicyTable(27, 27), PolicyTable(27, 27)};
    snap.trade = {PolicyTable(108, 9), PolicyTable(108, 9)};
    io::write_snapshot(tmp.path / "good.bin", snap);
    const auto back = io::read_snapshot(tmp.path / "good.bin");
    CHECK(back.step == 3);
    CHECK(back.forecast == snap.forecast);

    const auto size = fs::file_size(tmp.path / "good.bin");
    fs::resize_file(tmp.path / "good.bin", size - 8);
    CHECK_THROWS_AS(io::read_snapshot(tmp.path / "good.bin"), io::IoError);

    CHECK_THROWS_AS(io::read_meta(tmp.path / "absent.json"), io::IoError);
    write_text(tmp.path / "meta.json", "{not json");
    CHECK_THROWS_AS(io::read_meta(tmp.path / "meta.json"), io::IoError);
}

TEST_CASE("run metadata round-trips") {
    TempDir tmp("agora_test_io_meta");
    io::RunMeta meta;
    meta.config = tiny_config();
    meta.config.scenario = {ScenarioKind::HerdBest, 0.4, 1.0};
    meta.config.master_seed = 987654321012ULL;
    meta.seeds = {meta.config.master_seed, meta.config.master_seed + 1};
    meta.wall_seconds = 1.25;
    io::write_meta(tmp.path / io::kMetaFile, meta);
    const auto back = io::read_meta(tmp.path / io::kMetaFile);
    CHECK(back.config == meta.config);
    CHECK(back.seeds == meta.seeds);
    CHECK(back.wall_seconds == 1.25);
    CHECK(io::run_dir(tmp.path, 3) == tmp.path / "run_3");
}
