#include "rlmarket/order_book.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rlmarket/config.hpp"

namespace rlmarket {

namespace {

constexpr std::array<double, 6> kPow10{1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0};

void check_digits(int tick_digits) {
  if (tick_digits < 0 || tick_digits > 5)
    throw std::domain_error("tick_digits must be in 0..5, got " + std::to_string(tick_digits));
}

}  // namespace

double tick_size(int tick_digits) {
  check_digits(tick_digits);
  return 1.0 / kPow10[static_cast<std::size_t>(tick_digits)];
}

double quantize_price(double raw, int tick_digits) {
  check_digits(tick_digits);
  if (!std::isfinite(raw) || raw <= 0.0)
    throw std::domain_error("price must be positive and finite");
  const double scale = kPow10[static_cast<std::size_t>(tick_digits)];
  const double scaled = raw * scale;
  const double lower = std::floor(scaled);
  const double frac = scaled - lower;
  // A decimal half such as 100.235 is stored slightly below or above the
  // half; treat anything within a few ulps of it as an exact half.
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scaled);
  double units;
  if (std::abs(frac - 0.5) <= tol) {
    units = lower + 1.0;
  } else {
    units = std::round(scaled);
  }
  return units / scale;
}

bool on_tick_grid(double price, int tick_digits) {
  return std::isfinite(price) && price > 0.0 && quantize_price(price, tick_digits) == price;
}

MarketUpdate clear_auction(std::span<const Order> orders, int tick_digits,
                           const MarketUpdate& prev, int step) {
  std::vector<int> bids;
  std::vector<int> asks;
  for (int i = 0; i < static_cast<int>(orders.size()); ++i) {
    if (orders[i].quantity <= 0) continue;
    (orders[i].side == Side::bid ? bids : asks).push_back(i);
  }
  std::sort(bids.begin(), bids.end(), [&](int a, int b) {
    if (orders[a].limit_price != orders[b].limit_price)
      return orders[a].limit_price > orders[b].limit_price;
    return orders[a].arrival_rank < orders[b].arrival_rank;
  });
  std::sort(asks.begin(), asks.end(), [&](int a, int b) {
    if (orders[a].limit_price != orders[b].limit_price)
      return orders[a].limit_price < orders[b].limit_price;
    return orders[a].arrival_rank < orders[b].arrival_rank;
  });

  MarketUpdate out;
  std::size_t bi = 0;
  std::size_t ai = 0;
  std::int64_t bid_left = bids.empty() ? 0 : orders[bids[0]].quantity;
  std::int64_t ask_left = asks.empty() ? 0 : orders[asks[0]].quantity;
  double bid_sum = 0.0;
  double ask_sum = 0.0;
  while (bi < bids.size() && ai < asks.size()) {
    const Order& bid = orders[bids[bi]];
    const Order& ask = orders[asks[ai]];
    if (bid.limit_price < ask.limit_price) break;
    if (bid.agent_id == ask.agent_id)
      throw InvariantViolation("self-match for agent " + std::to_string(bid.agent_id));

    Transaction tx;
    tx.buyer_id = bid.agent_id;
    tx.seller_id = ask.agent_id;
    tx.quantity = std::min(bid_left, ask_left);
    tx.price = quantize_price(0.5 * (bid.limit_price + ask.limit_price), tick_digits);
    tx.step = step;
    tx.bid_limit = bid.limit_price;
    tx.ask_limit = ask.limit_price;
    tx.bid_index = bids[bi];
    tx.ask_index = asks[ai];
    out.transactions.push_back(tx);
    out.volume += tx.quantity;
    bid_sum += bid.limit_price;
    ask_sum += ask.limit_price;

    bid_left -= tx.quantity;
    ask_left -= tx.quantity;
    if (bid_left == 0 && ++bi < bids.size()) bid_left = orders[bids[bi]].quantity;
    if (ask_left == 0 && ++ai < asks.size()) ask_left = orders[asks[ai]].quantity;
  }

  if (out.transactions.empty()) {
    out.last_price = prev.last_price;
    out.spread = prev.spread;
    return out;
  }
  const auto n = static_cast<double>(out.transactions.size());
  out.last_price = out.transactions.back().price;
  out.spread = std::abs(bid_sum / n - ask_sum / n);
  return out;
}

Money settle(std::span<const Transaction> transactions, std::span<Portfolio> portfolios,
             double fee_rate, std::span<Money> fees_by_agent) {
  Money total;
  for (const Transaction& tx : transactions) {
    if (tx.quantity <= 0) throw InvariantViolation("transaction with non-positive quantity");
    Portfolio& buyer = portfolios[static_cast<std::size_t>(tx.buyer_id)];
    Portfolio& seller = portfolios[static_cast<std::size_t>(tx.seller_id)];
    const Money value = notional(tx.price, tx.quantity);
    const Money fee = value.scaled(fee_rate);

    buyer.cash -= value + fee;
    buyer.shares += tx.quantity;
    seller.cash += value - fee;
    seller.shares -= tx.quantity;
    total += fee + fee;
    if (!fees_by_agent.empty()) {
      fees_by_agent[static_cast<std::size_t>(tx.buyer_id)] += fee;
      fees_by_agent[static_cast<std::size_t>(tx.seller_id)] += fee;
    }
    if (buyer.cash < Money{})
      throw InvariantViolation("buyer " + std::to_string(tx.buyer_id) + " insolvent at settlement");
    if (seller.shares < 0)
      throw InvariantViolation("seller " + std::to_string(tx.seller_id) + " short at settlement");
    if (seller.cash < Money{})
      throw InvariantViolation("seller " + std::to_string(tx.seller_id) +
                               " cannot cover fees at settlement");
  }
  return total;
}

}  // namespace rlmarket
