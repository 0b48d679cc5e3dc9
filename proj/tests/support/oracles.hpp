#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rlmarket/order_book.hpp"
#include "rlmarket/rng.hpp"

namespace oracle {

inline std::int64_t pow10(int digits) {
  std::int64_t p = 1;
  for (int i = 0; i < digits; ++i) p *= 10;
  return p;
}

// Mid of two on-grid limits, rounded half up in integer ticks.
inline double mid_price(double bid, double ask, int digits) {
  const std::int64_t scale = pow10(digits);
  const std::int64_t b = std::llround(bid * static_cast<double>(scale));
  const std::int64_t a = std::llround(ask * static_cast<double>(scale));
  const std::int64_t sum = a + b;
  const std::int64_t ticks = sum % 2 == 0 ? sum / 2 : (sum + 1) / 2;
  return static_cast<double>(ticks) / static_cast<double>(scale);
}

// Brute-force call auction: every order is expanded into unit lots, and each
// round scans all lots for the best remaining bid and ask by linear search.
// Consecutive lots from the same pair of orders are merged into one transaction.
inline rlmarket::MarketUpdate reference_clear(std::span<const rlmarket::Order> orders, int digits,
                                              const rlmarket::MarketUpdate& prev, int step = 0) {
  using rlmarket::Side;
  std::vector<std::int64_t> left;
  for (const auto& o : orders) left.push_back(std::max<std::int64_t>(o.quantity, 0));

  auto better = [&](int i, int j, bool bid) {
    if (j < 0) return true;
    const double pi = orders[static_cast<std::size_t>(i)].limit_price;
    const double pj = orders[static_cast<std::size_t>(j)].limit_price;
    if (pi != pj) return bid ? pi > pj : pi < pj;
    return orders[static_cast<std::size_t>(i)].arrival_rank <
           orders[static_cast<std::size_t>(j)].arrival_rank;
  };

  rlmarket::MarketUpdate out;
  for (;;) {
    int best_bid = -1;
    int best_ask = -1;
    for (int i = 0; i < static_cast<int>(orders.size()); ++i) {
      if (left[static_cast<std::size_t>(i)] == 0) continue;
      const bool is_bid = orders[static_cast<std::size_t>(i)].side == Side::bid;
      int& best = is_bid ? best_bid : best_ask;
      if (better(i, best, is_bid)) best = i;
    }
    if (best_bid < 0 || best_ask < 0) break;
    const auto& b = orders[static_cast<std::size_t>(best_bid)];
    const auto& a = orders[static_cast<std::size_t>(best_ask)];
    if (b.limit_price < a.limit_price) break;

    --left[static_cast<std::size_t>(best_bid)];
    --left[static_cast<std::size_t>(best_ask)];
    if (!out.transactions.empty() && out.transactions.back().bid_index == best_bid &&
        out.transactions.back().ask_index == best_ask) {
      ++out.transactions.back().quantity;
    } else {
      rlmarket::Transaction tx;
      tx.buyer_id = b.agent_id;
      tx.seller_id = a.agent_id;
      tx.price = mid_price(b.limit_price, a.limit_price, digits);
      tx.quantity = 1;
      tx.step = step;
      tx.bid_limit = b.limit_price;
      tx.ask_limit = a.limit_price;
      tx.bid_index = best_bid;
      tx.ask_index = best_ask;
      out.transactions.push_back(tx);
    }
    ++out.volume;
  }

  if (out.transactions.empty()) {
    out.last_price = prev.last_price;
    out.spread = prev.spread;
    return out;
  }
  double bid_sum = 0.0;
  double ask_sum = 0.0;
  for (const auto& tx : out.transactions) {
    bid_sum += tx.bid_limit;
    ask_sum += tx.ask_limit;
  }
  const auto n = static_cast<double>(out.transactions.size());
  out.last_price = out.transactions.back().price;
  out.spread = std::abs(bid_sum / n - ask_sum / n);
  return out;
}

// Up to ten orders from distinct agents, quantities 1..20, limits on a coarse
// grid around 100 so that ties and crossings are frequent.
inline std::vector<rlmarket::Order> random_book(rlmarket::Rng& rng, int digits) {
  const auto n = static_cast<int>(rng.uniform_int(0, 10));
  const double step = std::max(0.5, 1.0 / static_cast<double>(pow10(digits)));
  std::vector<rlmarket::Order> orders;
  for (int i = 0; i < n; ++i) {
    rlmarket::Order o;
    o.agent_id = i;
    o.side = rng.uniform01() < 0.5 ? rlmarket::Side::bid : rlmarket::Side::ask;
    o.limit_price = rlmarket::quantize_price(
        97.0 + step * static_cast<double>(rng.uniform_int(0, 12)), digits);
    o.quantity = rng.uniform_int(1, 20);
    o.arrival_rank = i;
    orders.push_back(o);
  }
  rng.shuffle(std::span<rlmarket::Order>(orders));
  for (int i = 0; i < n; ++i) orders[static_cast<std::size_t>(i)].arrival_rank = i;
  return orders;
}

inline bool same_update(const rlmarket::MarketUpdate& a, const rlmarket::MarketUpdate& b) {
  return a.transactions == b.transactions && a.volume == b.volume &&
         a.last_price == b.last_price && a.spread == b.spread;
}

}  // namespace oracle
