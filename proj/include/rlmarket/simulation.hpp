#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rlmarket/agent.hpp"
#include "rlmarket/config.hpp"
#include "rlmarket/fundamentals.hpp"
#include "rlmarket/money.hpp"
#include "rlmarket/order_book.hpp"
#include "rlmarket/policy.hpp"
#include "rlmarket/portfolio.hpp"
#include "rlmarket/rng.hpp"
#include "rlmarket/stats.hpp"

namespace rlmarket {

struct MetaorderEvent {
  int step = 0;            // reported step at which the order was sent
  int agent = 0;
  Side side = Side::bid;
  std::int64_t quantity = 0;  // ordered
  std::int64_t filled = 0;
  double target_ratio = 0.0;  // percent of shares outstanding
  double ratio = 0.0;         // realized, percent
};

// Cash and share flows of one step, for conservation checks.
struct StepAudit {
  Money cash_delta;  // sum over agents of cash(end) - cash(start)
  Money interest;
  Money dividends;
  Money fees;
  Money external;    // metaorder endowments and resets
  std::int64_t total_shares = 0;        // held by agents at step end
  std::int64_t shares_outstanding = 0;  // after any metaorder injection
  bool metaorder = false;
};

struct SimResult {
  std::vector<double> prices;
  std::vector<std::int64_t> volumes;
  std::vector<double> spreads;
  std::vector<double> fundamentals;
  std::vector<double> mean_navs;
  std::vector<std::vector<double>> agent_navs;  // [agent][reported step]
  std::vector<int> crash_steps;
  std::vector<int> bankruptcy_steps;
  std::vector<MetaorderEvent> metaorder_events;
  std::vector<StepAudit> audit;  // per reported step
  std::int64_t shares_outstanding = 0;
  double initial_nav = 0.0;  // NAV of the initial endowment at the post-learning price
};

class Simulation;

// Emitted after every policy update.
struct PolicyUpdate {
  int agent = 0;
  bool trading = false;  // false: forecasting table
  int issued_at = 0;     // step at which the state was observed
  int state = 0;
  int action = 0;
  int reward = 0;
  const Policy* policy = nullptr;
};

enum class OrderKind { discretionary, liquidation, metaorder };

// Everything that happened in one step, passed to StepHook.
struct StepTrace {
  int step = 0;     // global step
  bool reporting = false;
  std::span<const Order> orders;
  std::span<const OrderKind> kinds;
  const MarketUpdate* update = nullptr;
  std::span<const int> bankrupt_before;  // agents bankrupt when the step began
  const StepAudit* audit = nullptr;
};

struct RunHooks {
  std::function<void(const PolicyUpdate&)> on_policy_update;
  std::function<void(const StepTrace&)> on_step;
};

struct PendingForecast {
  int issued_at = 0;
  int target_step = 0;
  int state = 0;
  int action = 0;
  double forecast = 0.0;
};

struct PendingTrade {
  int id = 0;
  int issued_at = 0;
  int resolve_step = 0;
  int state = 0;
  int action = 0;
  bool has_position = false;
  double value = 0.0;  // final for holds and unfilled orders
};

struct Agent {
  int id = 0;
  AgentParams params;
  AgentBelief belief;
  Portfolio portfolio;
  Policy forecaster{ForecastState::kCount, ForecastAction::kCount};
  Policy trader{TradeState::kCount, TradeAction::kCount};

  std::vector<double> gap_history;
  std::deque<double> forecast_errors;
  std::deque<double> trade_values;
  stats::RunningMedian cash_median;
  stats::RunningMedian holdings_median;
  std::deque<PendingForecast> pending_forecasts;
  std::vector<PendingTrade> pending_trades;
  int next_trade_id = 0;
  int last_order_step = -1'000'000;

  // Current-step decision scratch.
  std::optional<double> current_forecast;
  ForecastTool current_tool = ForecastTool::mean;
  int current_long_vol = 0;

  // Drawdown window.
  int year_index = -1;
  double year_peak = 0.0;
};

// Creates I agents with drawn parameters, beliefs and uniform policies;
// the first floor(p * I) agents are high-frequency. Validates `config`.
std::vector<Agent> init_agents(const SimConfig& config, const FundamentalSeries& fundamental,
                               Rng& rng);

// Year-to-date drawdown test: within the year_length-step window containing
// index t (windows start at multiples of year_length), is the largest
// peak-to-subsequent-trough loss of NAV above `limit`?
bool check_bankruptcy(std::span<const double> nav_history, double limit, int t, int year_length);

// Shares in a metaorder targeting `target_ratio` (a fraction) of the shares outstanding.
std::int64_t metaorder_quantity(double target_ratio, std::int64_t shares_outstanding);

// Cash flows from one step of interest and dividends.
struct AccrualFlows {
  Money interest;
  Money dividends;
};

// Accrues one step of risk-free interest on cash and a dividend of
// dividend_rate * shares * price.
AccrualFlows apply_accounting(Portfolio& portfolio, double price, double risk_free_rate,
                              double dividend_rate);

class Simulation {
public:
  Simulation(const SimConfig& config, std::uint64_t seed, RunHooks hooks = {});

  const SimConfig& config() const { return config_; }
  int current_step() const { return t_; }
  bool finished() const { return t_ >= config_.total_steps(); }
  bool reporting() const { return t_ >= config_.learning_steps; }

  // Executes one step and returns its market update.
  MarketUpdate step();

  void run_to_end();

  std::span<const Agent> agents() const { return agents_; }
  std::span<const double> prices() const { return prices_; }
  const FundamentalSeries& fundamental() const { return fundamental_; }
  const SimResult& result() const { return result_; }
  SimResult take_result() { return std::move(result_); }

private:
  void reset_after_learning();
  void record_reported_state();
  void observe_and_decide(std::vector<Order>& orders, std::vector<OrderKind>& kinds,
                          std::vector<int>& owners_pending);
  void draw_metaorder_triggers();
  const std::vector<double>& volatility_series(int window) const;
  void extend_volatility_series();
  void resolve_forecasts(Agent& agent, int price_step);
  void resolve_trades(Agent& agent, int step);
  void reward_trade(Agent& agent, const PendingTrade& pending, double value);

  SimConfig config_;
  RunHooks hooks_;
  Rng market_rng_;
  Rng meta_rng_;
  FundamentalSeries fundamental_;
  std::vector<Agent> agents_;

  std::vector<double> prices_;
  std::vector<std::int64_t> volumes_;
  std::vector<double> spreads_;
  std::map<int, std::vector<double>> vol_series_;

  double risk_free_step_ = 0.0;
  double dividend_step_ = 0.0;
  std::int64_t shares_outstanding_ = 0;
  std::vector<int> metaorder_triggers_;  // reported steps
  int t_ = 0;
  SimResult result_;
};

// Seeds from (master_seed, run_index), runs learning then reported steps.
SimResult run_simulation(const SimConfig& config, int run_index, RunHooks hooks = {});

}  // namespace rlmarket
