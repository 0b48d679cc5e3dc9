#include "rlmarket/agent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "rlmarket/stats.hpp"

namespace rlmarket {

namespace {

// lo + floor(u * (hi - lo + 1)), one draw regardless of the range.
int discrete(double u, int lo, int hi) {
  if (hi < lo) hi = lo;
  const int n = hi - lo + 1;
  return lo + std::min(static_cast<int>(u * n), n - 1);
}

}  // namespace

AgentParams draw_agent_params(const SimConfig& config, bool is_hft, Rng& rng) {
  const int tw = config.week_length;
  const int tm = config.month_length;
  AgentParams p;
  p.is_hft = is_hft;
  p.learning_rate = rng.uniform(0.05, 0.20);
  const double u_horizon = rng.uniform01();
  p.horizon = is_hft ? discrete(u_horizon, tw, 2 * tw - 1) : discrete(u_horizon, tw, 6 * tm);
  p.memory = discrete(rng.uniform01(), tw, config.horizon_steps - p.horizon - 2 * tw);
  p.reflexivity = rng.uniform(0.0, 1.0);
  p.drawdown_limit = rng.uniform(0.5, 0.6);
  p.trading_window = discrete(rng.uniform01(), tw, p.horizon);
  p.gesture = rng.uniform(0.2, 0.8);
  return p;
}

int forecast_lag(int lag_level, int horizon, int memory, int available) {
  int lag = 0;
  switch (lag_level) {
    case 0: lag = (horizon + 1) / 2; break;
    case 1: lag = horizon; break;
    case 2: lag = 2 * horizon; break;
    default: throw std::out_of_range("lag level must be 0, 1 or 2");
  }
  return std::max(1, std::min({lag, memory, available}));
}

double chartist_estimate(ForecastTool tool, std::span<const double> window, int horizon) {
  if (window.empty()) throw std::invalid_argument("chartist estimate needs prices");
  const double avg = stats::mean(window);
  const double last = window.back();
  switch (tool) {
    case ForecastTool::mean:
      return avg;
    case ForecastTool::revert:
      return 2.0 * avg - last;
    case ForecastTool::trend: {
      const auto n = window.size();
      if (n < 2) return last;
      // Least squares on x = 0..n-1, evaluated at x = n - 1 + horizon.
      const double xbar = 0.5 * static_cast<double>(n - 1);
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - xbar;
        sxy += dx * (window[i] - avg);
        sxx += dx * dx;
      }
      const double slope = sxy / sxx;
      return avg + slope * (static_cast<double>(n - 1) + horizon - xbar);
    }
  }
  throw std::logic_error("unknown forecast tool");
}

double fundamental_weight(int weight_level, double reflexivity) {
  static constexpr std::array<double, 3> kLevels{0.25, 0.5, 0.75};
  if (weight_level < 0 || weight_level > 2) throw std::out_of_range("weight level must be 0..2");
  return reflexivity * kLevels[static_cast<std::size_t>(weight_level)];
}

std::optional<double> forecast(const ForecastAction& action, std::span<const double> prices,
                               double belief, const AgentParams& params, int tick_digits) {
  if (prices.size() < 2) return std::nullopt;
  const int lag = forecast_lag(action.lag_level, params.horizon, params.memory,
                               static_cast<int>(prices.size()));
  const auto window = prices.last(static_cast<std::size_t>(lag));
  const double chartist = chartist_estimate(action.tool, window, params.horizon);
  const double k = fundamental_weight(action.weight_level, params.reflexivity);
  const double blended = (1.0 - k) * chartist + k * belief;
  return std::max(blended, tick_size(tick_digits));
}

double trailing_volatility(std::span<const double> prices, int t, int window) {
  const int first = std::max(0, t - window + 1);
  const int n = t - first + 1;
  if (n < 2) return 0.0;
  const auto w = prices.subspan(static_cast<std::size_t>(first), static_cast<std::size_t>(n));
  return stats::population_std(w) / prices[static_cast<std::size_t>(t)];
}

double fundamental_gap(double belief, double price) { return std::abs(belief - price) / price; }

ForecastState discretize_forecast_state(double long_vol, std::span<const double> long_vol_hist,
                                        double short_vol, std::span<const double> short_vol_hist,
                                        double gap, std::span<const double> gap_hist) {
  ForecastState s;
  s.long_vol = stats::tercile_bucket(long_vol, long_vol_hist);
  s.short_vol = stats::tercile_bucket(short_vol, short_vol_hist);
  s.gap = stats::tercile_bucket(gap, gap_hist);
  return s;
}

std::optional<ForecastState> discretize_state_F(std::span<const double> prices,
                                                std::span<const double> beliefs, int t,
                                                const AgentParams& params, int week_length) {
  if (t < 1 || static_cast<std::size_t>(t) >= prices.size() ||
      static_cast<std::size_t>(t) >= beliefs.size())
    return std::nullopt;
  const int n = std::min(params.memory, t + 1);
  std::vector<double> lv, sv, gp;
  for (int s = t - n + 1; s <= t; ++s) {
    lv.push_back(trailing_volatility(prices, s, params.horizon));
    sv.push_back(trailing_volatility(prices, s, week_length));
    gp.push_back(fundamental_gap(beliefs[static_cast<std::size_t>(s)],
                                 prices[static_cast<std::size_t>(s)]));
  }
  return discretize_forecast_state(lv.back(), lv, sv.back(), sv, gp.back(), gp);
}

int volume_bucket(std::int64_t previous_volume, std::span<const double> nonzero_volume_hist) {
  if (previous_volume == 0) return 0;
  if (nonzero_volume_hist.empty()) return 1;
  const double med = stats::quantile(nonzero_volume_hist, 0.5);
  return static_cast<double>(previous_volume) <= med ? 1 : 2;
}

TradeState discretize_trade_state(ForecastTool tool, int long_vol_bucket, double cash,
                                  double cash_median, double holdings, double holdings_median,
                                  std::int64_t previous_volume,
                                  std::span<const double> nonzero_volume_hist) {
  TradeState s;
  s.tool = tool;
  s.long_vol = long_vol_bucket;
  s.cash = median_bucket(cash, cash_median);
  s.holdings = median_bucket(holdings, holdings_median);
  s.volume = volume_bucket(previous_volume, nonzero_volume_hist);
  return s;
}

int reward_from_percentile(double value, std::span<const double> history, bool higher_is_better) {
  if (history.size() < 6) {
    if (history.empty()) return 1;
    const double med = stats::quantile(history, 0.5);
    const bool good = higher_is_better ? value >= med : value <= med;
    return good ? 1 : -1;
  }
  static constexpr std::array<double, 5> kProbs{1.0 / 6, 2.0 / 6, 3.0 / 6, 4.0 / 6, 5.0 / 6};
  static constexpr std::array<int, 6> kRewards{4, 2, 1, -1, -2, -4};
  const auto q = stats::quantiles(history, kProbs);
  // Number of boundaries strictly on the better side of `value`.
  int worse_by = 0;
  for (double b : q) {
    if (higher_is_better ? b > value : b < value) ++worse_by;
  }
  return kRewards[static_cast<std::size_t>(worse_by)];
}

int gesture_sign(Gesture gesture) {
  switch (gesture) {
    case Gesture::soft: return 1;
    case Gesture::neutral: return 0;
    case Gesture::hard: return -1;
  }
  return 0;
}

namespace {

double limit_on_grid(double raw, int tick_digits) {
  return quantize_price(std::max(raw, tick_size(tick_digits)), tick_digits);
}

}  // namespace

std::optional<Order> build_order(const TradeAction& action, double forecast, double cash,
                                 std::int64_t shares, double spread, double gesture,
                                 double order_fraction, int tick_digits, int agent_id) {
  const double offset = gesture_sign(action.gesture) * gesture * spread;
  Order order;
  order.agent_id = agent_id;
  switch (action.direction) {
    case Direction::hold:
      return std::nullopt;
    case Direction::buy:
      order.side = Side::bid;
      order.limit_price = limit_on_grid(forecast + offset, tick_digits);
      order.quantity = static_cast<std::int64_t>(std::floor(order_fraction * cash / order.limit_price));
      break;
    case Direction::sell:
      order.side = Side::ask;
      order.limit_price = limit_on_grid(forecast - offset, tick_digits);
      order.quantity = static_cast<std::int64_t>(std::floor(order_fraction * static_cast<double>(shares)));
      break;
  }
  if (order.quantity <= 0) return std::nullopt;
  return order;
}

std::optional<Order> build_liquidation(Side position_side, std::int64_t quantity, double forecast,
                                       double cash, std::int64_t shares, double spread,
                                       double gesture, double fee_rate, int tick_digits,
                                       int agent_id) {
  Order order;
  order.agent_id = agent_id;
  if (position_side == Side::bid) {
    order.side = Side::ask;
    order.limit_price = limit_on_grid(forecast - gesture * spread, tick_digits);
    order.quantity = std::min(quantity, shares);
  } else {
    order.side = Side::bid;
    order.limit_price = limit_on_grid(forecast + gesture * spread, tick_digits);
    const double affordable = std::floor(cash / (order.limit_price * (1.0 + fee_rate) * (1.0 + 1e-9)));
    order.quantity = std::min(quantity, static_cast<std::int64_t>(std::max(affordable, 0.0)));
  }
  if (order.quantity <= 0) return std::nullopt;
  return order;
}

}  // namespace rlmarket
