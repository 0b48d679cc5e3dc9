#pragma once

#include <cstdint>
#include <vector>

#include "rlmarket/money.hpp"

namespace rlmarket {

enum class Side : std::uint8_t { bid, ask };

// Shares bought (bid) or sold (ask) at `entry_step`, unwound at entry + horizon.
struct OpenPosition {
  int entry_step = 0;
  std::int64_t quantity = 0;
  Side side = Side::bid;
  Money entry_value;   // traded notional
  Money entry_fees;
  Money dividends;     // dividends earned (long) or forgone (short) while open
  int outcome_id = -1; // pending trading outcome resolved on liquidation
};

struct Portfolio {
  Money cash;
  std::int64_t shares = 0;
  std::vector<double> nav_history;
  std::vector<OpenPosition> open_positions;
  bool bankrupt = false;

  double nav(double price) const {
    return cash.to_double() + static_cast<double>(shares) * price;
  }
};

}  // namespace rlmarket
