#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "rlmarket/config.hpp"
#include "rlmarket/order_book.hpp"
#include "rlmarket/policy.hpp"
#include "rlmarket/rng.hpp"

namespace rlmarket {

struct AgentParams {
  double learning_rate = 0.1;   // alpha
  int horizon = 5;              // tau: steps until a position is unwound
  int memory = 5;               // h: look-back for thresholds and reward history
  double reflexivity = 0.5;     // rho: fundamentalist share of the forecast
  double drawdown_limit = 0.55; // l
  int trading_window = 5;       // w: minimum spacing of discretionary orders
  double gesture = 0.5;         // g: spread multiple conceded or demanded
  bool is_hft = false;
};

// Draws one agent's parameters. High-frequency agents get horizons in
// {T_w, ..., 2 T_w - 1}; the number of draws is the same either way, so
// flipping `is_hft` does not shift the stream for later agents.
AgentParams draw_agent_params(const SimConfig& config, bool is_hft, Rng& rng);

// --- forecasting -----------------------------------------------------------

// Look-back for a lag level: {ceil(tau/2), tau, 2 tau}, capped at the memory
// and at the prices available.
int forecast_lag(int lag_level, int horizon, int memory, int available);

// Chartist estimate of the price `horizon` steps after the last entry of
// `window`: mean, least-squares trend extrapolation, or mean reversion
// (2 * mean - last).
double chartist_estimate(ForecastTool tool, std::span<const double> window, int horizon);

// Fundamental weight k = rho * {0.25, 0.5, 0.75}[level].
double fundamental_weight(int weight_level, double reflexivity);

// Blended estimate of P(t + tau) from the prices up to and including t.
// Returns nullopt with fewer than two prices. Floors at one tick.
std::optional<double> forecast(const ForecastAction& action, std::span<const double> prices,
                               double belief, const AgentParams& params, int tick_digits);

// --- state discretization --------------------------------------------------

// Volatility sigma/P over the trailing `window` prices ending at index t
// (fewer if not available; zero with fewer than two).
double trailing_volatility(std::span<const double> prices, int t, int window);

// |B(t) - P(t)| / P(t).
double fundamental_gap(double belief, double price);

// Buckets each statistic against its own history (the last h values,
// current value included).
ForecastState discretize_forecast_state(double long_vol, std::span<const double> long_vol_hist,
                                        double short_vol, std::span<const double> short_vol_hist,
                                        double gap, std::span<const double> gap_hist);

// Same state computed directly from price and belief series up to t.
// Returns nullopt when t < 1.
std::optional<ForecastState> discretize_state_F(std::span<const double> prices,
                                                std::span<const double> beliefs, int t,
                                                const AgentParams& params, int week_length);

// Median split with ties bucketed low.
inline int median_bucket(double value, double median) { return value <= median ? 0 : 1; }

// 0 = zero volume, 1 = at or below the median of recent nonzero volumes, 2 = above.
int volume_bucket(std::int64_t previous_volume, std::span<const double> nonzero_volume_hist);

TradeState discretize_trade_state(ForecastTool tool, int long_vol_bucket, double cash,
                                  double cash_median, double holdings, double holdings_median,
                                  std::int64_t previous_volume,
                                  std::span<const double> nonzero_volume_hist);

// --- rewards ---------------------------------------------------------------

// Maps `value` to {+4, +2, +1, -1, -2, -4} by the sextile of `history` it
// falls in, best first. Values on a boundary take the better bucket. With
// fewer than six past values the reward is +1 if `value` is at least as good
// as the median of `history` (or history is empty), else -1.
int reward_from_percentile(double value, std::span<const double> history, bool higher_is_better);

// --- orders ----------------------------------------------------------------

// +1 soft (concede), 0 neutral, -1 hard (demand better).
int gesture_sign(Gesture gesture);

// Discretionary order for a trading action, or nullopt for hold or zero size.
// Bids size at floor(f * cash / limit), asks at floor(f * shares).
std::optional<Order> build_order(const TradeAction& action, double forecast, double cash,
                                 std::int64_t shares, double spread, double gesture,
                                 double order_fraction, int tick_digits, int agent_id);

// Soft-gesture order unwinding `quantity` shares of a position on `position_side`
// (a bid position is sold, an ask position bought back). Capped at held shares
// or at what cash covers including `fee_rate`.
std::optional<Order> build_liquidation(Side position_side, std::int64_t quantity, double forecast,
                                       double cash, std::int64_t shares, double spread,
                                       double gesture, double fee_rate, int tick_digits,
                                       int agent_id);

}  // namespace rlmarket
