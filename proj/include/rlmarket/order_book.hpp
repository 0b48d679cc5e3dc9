#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rlmarket/money.hpp"
#include "rlmarket/portfolio.hpp"

namespace rlmarket {

struct Order {
  int agent_id = 0;
  Side side = Side::bid;
  double limit_price = 0.0;  // already tick-quantized
  std::int64_t quantity = 0;
  int arrival_rank = 0;      // position after the upstream shuffle
};

struct Transaction {
  int buyer_id = 0;
  int seller_id = 0;
  double price = 0.0;
  std::int64_t quantity = 0;
  int step = 0;
  double bid_limit = 0.0;
  double ask_limit = 0.0;
  // Indices of the matched orders in the submitted order list.
  int bid_index = -1;
  int ask_index = -1;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct MarketUpdate {
  double last_price = 0.0;
  std::int64_t volume = 0;
  double spread = 0.0;
  std::vector<Transaction> transactions;
};

// Rounds to `tick_digits` decimals, half away from zero. Throws
// std::domain_error for non-positive or non-finite input.
double quantize_price(double raw, int tick_digits);

// Smallest positive price on the tick grid.
double tick_size(int tick_digits);

bool on_tick_grid(double price, int tick_digits);

// One-shot call auction. Bids are ranked by descending limit, asks by
// ascending limit, ties by arrival rank; the best bid and ask trade while they
// cross, at the re-quantized mid. Unfilled residue is dropped. With no
// transaction the previous price and spread carry forward and volume is zero.
MarketUpdate clear_auction(std::span<const Order> orders, int tick_digits,
                           const MarketUpdate& prev, int step = 0);

// Moves cash and shares between the parties of each transaction and charges
// `fee_rate` of the notional to both sides. Returns the total fees charged;
// when `fees_by_agent` is non-empty (indexed like `portfolios`) each agent's
// fees are added to it. Throws InvariantViolation if a party ends with
// negative cash or shares.
Money settle(std::span<const Transaction> transactions, std::span<Portfolio> portfolios,
             double fee_rate, std::span<Money> fees_by_agent = {});

}  // namespace rlmarket
