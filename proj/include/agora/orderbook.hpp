#pragma once

#include "agora/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace agora {

enum class Side { Bid, Ask };

struct Order {
    AgentId agent_id = 0;
    StockId stock_id = 0;
    Side side = Side::Bid;
    double price = 0.0;
    Quantity quantity = 0;

    bool operator==(const Order&) const = default;
};

struct Trade {
    AgentId buyer_id = 0;
    AgentId seller_id = 0;
    double price = 0.0;
    Quantity quantity = 0;
    long step = 0;

    bool operator==(const Trade&) const = default;
};

struct ClearingResult {
    std::vector<Trade> trades;
    double new_price = 0.0;
    Quantity volume = 0;
    std::optional<double> residual_spread;
    /// Filled quantity per order, indexed by submission sequence.
    std::vector<Quantity> filled;
};

/// Single-stock limit order book, rebuilt every step.
///
/// Bids are ranked by descending price and asks by ascending price, earlier
/// submissions first within a price level. clear() walks both queues from the
/// top, trading each crossing pair (bid >= ask) at its mid-price, and empties
/// the book: nothing rests across steps.
class OrderBook {
public:
    struct Entry {
        Order order;
        std::size_t seq = 0;
    };

    explicit OrderBook(StockId stock = 0) : stock_(stock) {}

    /// Throws std::invalid_argument on non-positive or non-finite price or quantity.
    void submit(const Order& order);

    std::optional<double> best_bid() const;
    std::optional<double> best_ask() const;
    /// best ask - best bid; negative while crossed. Absent if either side is empty.
    std::optional<double> spread() const;

    const std::vector<Entry>& bids() const { return bids_; }
    const std::vector<Entry>& asks() const { return asks_; }
    std::size_t size() const { return next_seq_; }
    bool empty() const { return next_seq_ == 0; }
    StockId stock() const { return stock_; }

    ClearingResult clear(double prev_price, long step);

private:
    StockId stock_;
    std::vector<Entry> bids_;
    std::vector<Entry> asks_;
    std::size_t next_seq_ = 0;
};

}  // namespace agora
