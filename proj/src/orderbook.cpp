#include "agora/orderbook.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agora {

void OrderBook::submit(const Order& order) {
    if (!(std::isfinite(order.price) && order.price > 0.0)) {
        throw std::invalid_argument("order price must be positive and finite");
    }
    if (order.quantity <= 0) {
        throw std::invalid_argument("order quantity must be positive");
    }
    Entry entry{order, next_seq_++};
    if (order.side == Side::Bid) {
        auto pos = std::upper_bound(bids_.begin(), bids_.end(), entry,
                                    [](const Entry& a, const Entry& b) { return a.order.price > b.order.price; });
        bids_.insert(pos, entry);
    } else {
        auto pos = std::upper_bound(asks_.begin(), asks_.end(), entry,
                                    [](const Entry& a, const Entry& b) { return a.order.price < b.order.price; });
        asks_.insert(pos, entry);
    }
}

std::optional<double> OrderBook::best_bid() const {
    if (bids_.empty()) {
        return std::nullopt;
    }
    return bids_.front().order.price;
}

std::optional<double> OrderBook::best_ask() const {
    if (asks_.empty()) {
        return std::nullopt;
    }
    return asks_.front().order.price;
}

std::optional<double> OrderBook::spread() const {
    if (bids_.empty() || asks_.empty()) {
        return std::nullopt;
    }
    return asks_.front().order.price - bids_.front().order.price;
}

ClearingResult OrderBook::clear(double prev_price, long step) {
    ClearingResult result;
    result.new_price = prev_price;
    result.filled.assign(next_seq_, 0);

    std::size_t b = 0;
    std::size_t a = 0;
    Quantity bid_left = bids_.empty() ? 0 : bids_[0].order.quantity;
    Quantity ask_left = asks_.empty() ? 0 : asks_[0].order.quantity;

    while (b < bids_.size() && a < asks_.size()) {
        const Entry& bid = bids_[b];
        const Entry& ask = asks_[a];
        if (bid.order.price < ask.order.price) {
            break;
        }
        if (bid.order.agent_id == ask.order.agent_id) {
            // self-cross: drop both orders, no trade
            if (++b < bids_.size()) {
                bid_left = bids_[b].order.quantity;
            }
            if (++a < asks_.size()) {
                ask_left = asks_[a].order.quantity;
            }
            continue;
        }
        const Quantity q = std::min(bid_left, ask_left);
        const double price = 0.5 * (bid.order.price + ask.order.price);
        result.trades.push_back(Trade{bid.order.agent_id, ask.order.agent_id, price, q, step});
        result.volume += q;
        result.new_price = price;
        result.filled[bid.seq] += q;
        result.filled[ask.seq] += q;
        bid_left -= q;
        ask_left -= q;
        if (bid_left == 0 && ++b < bids_.size()) {
            bid_left = bids_[b].order.quantity;
        }
        if (ask_left == 0 && ++a < asks_.size()) {
            ask_left = asks_[a].order.quantity;
        }
    }

    if (b < bids_.size() && a < asks_.size()) {
        result.residual_spread = asks_[a].order.price - bids_[b].order.price;
    }

    bids_.clear();
    asks_.clear();
    next_seq_ = 0;
    return result;
}

}  // namespace agora
