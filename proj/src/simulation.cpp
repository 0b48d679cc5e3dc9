#include "rlmarket/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "rlmarket/metrics.hpp"

namespace rlmarket {

namespace {

constexpr std::uint64_t kFundamentalStream = 0x46554E44;  // "FUND"
constexpr std::uint64_t kAgentStream = 0x4147454E;        // "AGEN"
constexpr std::uint64_t kMarketStream = 0x4D4B5420;       // "MKT "
constexpr std::uint64_t kMetaorderStream = 0x4D455441;    // "META"

Rng substream(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(seed ^ mix_seed(stream))); }

template <class T>
std::span<const T> tail(const std::vector<T>& v, std::size_t n) {
  n = std::min(n, v.size());
  return std::span<const T>(v).subspan(v.size() - n, n);
}

void push_bounded(std::deque<double>& d, double x, std::size_t cap) {
  d.push_back(x);
  while (d.size() > cap) d.pop_front();
}

}  // namespace

std::vector<Agent> init_agents(const SimConfig& config, const FundamentalSeries& fundamental,
                               Rng& rng) {
  validate(config);
  (void)fundamental;
  const int num_hft = static_cast<int>(std::floor(config.hft_fraction * config.num_agents + 1e-9));
  std::vector<Agent> agents(static_cast<std::size_t>(config.num_agents));
  for (int i = 0; i < config.num_agents; ++i) {
    Agent& a = agents[static_cast<std::size_t>(i)];
    a.id = i;
    a.params = draw_agent_params(config, i < num_hft, rng);
    a.belief = cointegrate(config.belief_max_delay, config.belief_max_bias, rng);
    a.portfolio.cash = Money::from_double(config.initial_cash);
    a.portfolio.shares = config.initial_shares;
    a.cash_median.push(a.portfolio.cash.to_double());
    a.holdings_median.push(static_cast<double>(a.portfolio.shares));
  }
  return agents;
}

bool check_bankruptcy(std::span<const double> nav_history, double limit, int t, int year_length) {
  if (nav_history.empty() || t < 0) return false;
  t = std::min(t, static_cast<int>(nav_history.size()) - 1);
  const int start = (t / year_length) * year_length;
  double peak = nav_history[static_cast<std::size_t>(start)];
  for (int i = start; i <= t; ++i) {
    const double nav = nav_history[static_cast<std::size_t>(i)];
    peak = std::max(peak, nav);
    if (peak > 0.0 && (peak - nav) / peak > limit) return true;
  }
  return false;
}

std::int64_t metaorder_quantity(double target_ratio, std::int64_t shares_outstanding) {
  return static_cast<std::int64_t>(std::floor(target_ratio * static_cast<double>(shares_outstanding) + 1e-9));
}

AccrualFlows apply_accounting(Portfolio& portfolio, double price, double risk_free_rate,
                              double dividend_rate) {
  AccrualFlows f;
  f.interest = portfolio.cash.scaled(risk_free_rate);
  f.dividends = notional(price, portfolio.shares).scaled(dividend_rate);
  portfolio.cash += f.interest + f.dividends;
  return f;
}

Simulation::Simulation(const SimConfig& config, std::uint64_t seed, RunHooks hooks)
    : config_(config),
      hooks_(std::move(hooks)),
      market_rng_(substream(seed, kMarketStream)),
      meta_rng_(substream(seed, kMetaorderStream)) {
  validate(config_);
  Rng fund_rng = substream(seed, kFundamentalStream);
  const auto length = static_cast<std::size_t>(config_.total_steps()) + 1 +
                      static_cast<std::size_t>(config_.max_horizon());
  fundamental_ = generate_fundamental(length, config_.fundamental_vol, config_.initial_price, fund_rng);
  Rng agent_rng = substream(seed, kAgentStream);
  agents_ = init_agents(config_, fundamental_, agent_rng);

  risk_free_step_ = config_.per_step_rate(config_.annual_risk_free);
  dividend_step_ = config_.per_step_rate(config_.annual_dividend);
  shares_outstanding_ = config_.shares_outstanding();
  result_.shares_outstanding = shares_outstanding_;

  prices_.push_back(config_.initial_price);
  volumes_.push_back(0);
  spreads_.push_back(0.0);
  vol_series_[config_.week_length];
  for (const Agent& a : agents_) vol_series_[a.params.horizon];
  result_.agent_navs.resize(agents_.size());
}

const std::vector<double>& Simulation::volatility_series(int window) const {
  return vol_series_.at(window);
}

void Simulation::extend_volatility_series() {
  for (auto& [window, series] : vol_series_) series.push_back(trailing_volatility(prices_, t_, window));
}

void Simulation::reset_after_learning() {
  for (Agent& a : agents_) {
    Portfolio& p = a.portfolio;
    p.cash = Money::from_double(config_.initial_cash);
    p.shares = config_.initial_shares;
    p.bankrupt = false;
    p.nav_history.clear();
    p.open_positions.clear();
    a.pending_trades.clear();
    a.cash_median.clear();
    a.holdings_median.clear();
    a.cash_median.push(p.cash.to_double());
    a.holdings_median.push(static_cast<double>(p.shares));
    a.last_order_step = -1'000'000;
    a.year_index = -1;
  }
  result_.initial_nav =
      config_.initial_cash + static_cast<double>(config_.initial_shares) * prices_.back();
  if (config_.metaorders_enabled) draw_metaorder_triggers();
}

void Simulation::draw_metaorder_triggers() {
  metaorder_triggers_.clear();
  const int T = config_.horizon_steps;
  for (int start = 0; start < T; start += config_.year_length) {
    const int end = std::min(start + config_.year_length, T) - 1;
    metaorder_triggers_.push_back(static_cast<int>(meta_rng_.uniform_int(start, end)));
  }
}

void Simulation::record_reported_state() {
  const double price = prices_.back();
  result_.prices.push_back(price);
  result_.volumes.push_back(volumes_.back());
  result_.spreads.push_back(spreads_.back());
  result_.fundamentals.push_back(fundamental_.values[static_cast<std::size_t>(t_)]);
  double sum = 0.0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const double nav = agents_[i].portfolio.nav(price);
    result_.agent_navs[i].push_back(nav);
    sum += nav;
  }
  result_.mean_navs.push_back(sum / static_cast<double>(agents_.size()));
}

void Simulation::run_to_end() {
  while (!finished()) step();
}

MarketUpdate Simulation::step() {
  if (finished()) throw std::logic_error("simulation already finished");
  const int t = t_;
  const int L = config_.learning_steps;
  if (t == L) reset_after_learning();
  const bool report = t >= L;
  if (report) record_reported_state();
  extend_volatility_series();

  const double price = prices_.back();
  const int phase_origin = report ? L : 0;

  std::vector<int> bankrupt_before;
  Money cash_start;
  for (const Agent& a : agents_) {
    cash_start += a.portfolio.cash;
    if (a.portfolio.bankrupt) bankrupt_before.push_back(a.id);
  }

  StepAudit audit;

  // Metaorder: pick the agent before anyone decides.
  struct Injection {
    int agent = -1;
    Money pre_cash;
    std::int64_t pre_shares = 0;
    MetaorderEvent event;
  };
  std::optional<Injection> injection;
  if (report && config_.metaorders_enabled &&
      std::find(metaorder_triggers_.begin(), metaorder_triggers_.end(), t - L) !=
          metaorder_triggers_.end()) {
    std::vector<int> candidates;
    for (const Agent& a : agents_) {
      if (a.portfolio.bankrupt) continue;
      const bool maturing = std::any_of(a.portfolio.open_positions.begin(), a.portfolio.open_positions.end(),
                                        [&](const OpenPosition& p) { return p.entry_step + a.params.horizon == t; });
      if (!maturing) candidates.push_back(a.id);
    }
    if (!candidates.empty()) {
      const auto pick = candidates[static_cast<std::size_t>(
          meta_rng_.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
      const bool sell = meta_rng_.uniform01() < 0.5;
      const double target = meta_rng_.uniform(0.0, config_.metaorder_max_ratio);
      const auto qty = metaorder_quantity(target, config_.shares_outstanding());
      if (qty > 0) {
        Injection inj;
        inj.agent = pick;
        inj.pre_cash = agents_[static_cast<std::size_t>(pick)].portfolio.cash;
        inj.pre_shares = agents_[static_cast<std::size_t>(pick)].portfolio.shares;
        inj.event.step = t - L;
        inj.event.agent = pick;
        inj.event.side = sell ? Side::ask : Side::bid;
        inj.event.quantity = qty;
        inj.event.target_ratio = 100.0 * target;
        injection = inj;
      }
    }
  }

  std::vector<Order> orders;
  std::vector<OrderKind> kinds;
  std::vector<int> trade_ids;  // pending trade id per order, -1 if none

  if (injection) {
    Portfolio& p = agents_[static_cast<std::size_t>(injection->agent)].portfolio;
    Order o;
    o.agent_id = injection->agent;
    o.side = injection->event.side;
    o.quantity = injection->event.quantity;
    const double off = config_.metaorder_limit_offset;
    if (o.side == Side::ask) {
      o.limit_price = quantize_price(std::max(price * (1.0 - off), tick_size(config_.tick_digits)),
                                     config_.tick_digits);
      p.shares += o.quantity;
      shares_outstanding_ += o.quantity;
    } else {
      o.limit_price = quantize_price(price * (1.0 + off), config_.tick_digits);
      const Money cost = notional(o.limit_price, o.quantity);
      const Money endow = cost + cost.scaled(config_.broker_fee) + Money::from_double(1.0);
      p.cash += endow;
      audit.external += endow;
    }
    orders.push_back(o);
    kinds.push_back(OrderKind::metaorder);
    trade_ids.push_back(-1);
  }

  // (1) observe, forecast, decide.
  for (Agent& a : agents_) {
    a.current_forecast.reset();
    const double belief = a.belief.value_at(fundamental_, t);
    a.gap_history.push_back(fundamental_gap(belief, price));
    if (a.portfolio.bankrupt || t < 1) continue;

    const auto n = static_cast<std::size_t>(std::min(a.params.memory, t + 1));
    const auto long_hist = tail(volatility_series(a.params.horizon), n);
    const auto short_hist = tail(volatility_series(config_.week_length), n);
    const auto gap_hist = tail(a.gap_history, n);
    const ForecastState fs = discretize_forecast_state(long_hist.back(), long_hist, short_hist.back(),
                                                       short_hist, gap_hist.back(), gap_hist);
    const int f_state = fs.encode();
    const int f_action = a.forecaster.select(f_state, market_rng_);
    const ForecastAction fa = ForecastAction::decode(f_action);
    const auto estimate = forecast(fa, prices_, belief, a.params, config_.tick_digits);
    if (!estimate) continue;
    a.pending_forecasts.push_back({t, t + a.params.horizon, f_state, f_action, *estimate});
    a.current_forecast = estimate;
    a.current_tool = fa.tool;
    a.current_long_vol = fs.long_vol;

    if (injection && injection->agent == a.id) continue;
    Portfolio& p = a.portfolio;

    // Mandatory unwind of a position reaching its horizon.
    const auto maturing = std::find_if(p.open_positions.begin(), p.open_positions.end(),
                                       [&](const OpenPosition& pos) { return pos.entry_step + a.params.horizon == t; });
    if (maturing != p.open_positions.end()) {
      if (auto o = build_liquidation(maturing->side, maturing->quantity, *estimate, p.cash.to_double(),
                                     p.shares, spreads_.back(), a.params.gesture, config_.broker_fee,
                                     config_.tick_digits, a.id)) {
        orders.push_back(*o);
        kinds.push_back(OrderKind::liquidation);
        trade_ids.push_back(maturing->outcome_id);
      }
      continue;
    }
    if (t - a.last_order_step < a.params.trading_window) continue;

    std::vector<double> nonzero;
    for (auto v : tail(volumes_, static_cast<std::size_t>(a.params.memory)))
      if (v > 0) nonzero.push_back(static_cast<double>(v));
    const TradeState ts = discretize_trade_state(
        fa.tool, fs.long_vol, p.cash.to_double(), a.cash_median.median(), static_cast<double>(p.shares),
        a.holdings_median.median(), volumes_.back(), nonzero);
    const int t_state = ts.encode();
    const int t_action = a.trader.select(t_state, market_rng_);
    const TradeAction ta = TradeAction::decode(t_action);

    PendingTrade pending;
    pending.id = a.next_trade_id++;
    pending.issued_at = t;
    pending.resolve_step = t + a.params.horizon;
    pending.state = t_state;
    pending.action = t_action;
    if (ta.direction == Direction::hold) {
      const double notional_held = config_.order_fraction * p.cash.to_double();
      pending.value = notional_held * (std::pow(1.0 + risk_free_step_, a.params.horizon) - 1.0);
    } else if (auto o = build_order(ta, *estimate, p.cash.to_double(), p.shares, spreads_.back(),
                                    a.params.gesture, config_.order_fraction, config_.tick_digits, a.id)) {
      orders.push_back(*o);
      kinds.push_back(OrderKind::discretionary);
      trade_ids.push_back(pending.id);
      a.last_order_step = t;
    }
    a.pending_trades.push_back(pending);
  }

  // (2) random arrival order.
  std::vector<int> ranks(orders.size());
  std::iota(ranks.begin(), ranks.end(), 0);
  market_rng_.shuffle(std::span<int>(ranks));
  for (std::size_t i = 0; i < orders.size(); ++i) orders[i].arrival_rank = ranks[i];

  // (3) clear.
  MarketUpdate prev;
  prev.last_price = price;
  prev.spread = spreads_.back();
  MarketUpdate update = clear_auction(orders, config_.tick_digits, prev, t);
  const double new_price = update.last_price;

  // (4) settle and account.
  std::vector<Money> fees(agents_.size());
  {
    // settle() works on contiguous balances.
    std::vector<Portfolio> book(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      book[i].cash = agents_[i].portfolio.cash;
      book[i].shares = agents_[i].portfolio.shares;
    }
    audit.fees = settle(update.transactions, book, config_.broker_fee, fees);
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      agents_[i].portfolio.cash = book[i].cash;
      agents_[i].portfolio.shares = book[i].shares;
    }
  }

  struct Fill {
    std::int64_t quantity = 0;
    Money value;
    Money fees;
  };
  std::vector<Fill> fills(orders.size());
  for (const Transaction& tx : update.transactions) {
    const Money value = notional(tx.price, tx.quantity);
    const Money fee = value.scaled(config_.broker_fee);
    for (int idx : {tx.bid_index, tx.ask_index}) {
      Fill& f = fills[static_cast<std::size_t>(idx)];
      f.quantity += tx.quantity;
      f.value += value;
      f.fees += fee;
    }
  }

  if (injection) {
    Agent& a = agents_[static_cast<std::size_t>(injection->agent)];
    Portfolio& p = a.portfolio;
    const Fill& f = fills[0];
    injection->event.filled = f.quantity;
    injection->event.ratio = metrics::traded_ratio(f.quantity, config_.shares_outstanding());
    audit.external += injection->pre_cash - p.cash;
    shares_outstanding_ += injection->pre_shares - p.shares;
    p.cash = injection->pre_cash;
    p.shares = injection->pre_shares;
    audit.metaorder = true;
    result_.metaorder_events.push_back(injection->event);
  }

  // Positions: open from discretionary fills, close on liquidation.
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (kinds[i] != OrderKind::discretionary) continue;
    Agent& a = agents_[static_cast<std::size_t>(orders[i].agent_id)];
    auto pending = std::find_if(a.pending_trades.begin(), a.pending_trades.end(),
                                [&](const PendingTrade& pt) { return pt.id == trade_ids[i]; });
    if (fills[i].quantity == 0 || pending == a.pending_trades.end()) continue;
    OpenPosition pos;
    pos.entry_step = t;
    pos.quantity = fills[i].quantity;
    pos.side = orders[i].side;
    pos.entry_value = fills[i].value;
    pos.entry_fees = fills[i].fees;
    pos.outcome_id = pending->id;
    a.portfolio.open_positions.push_back(pos);
    pending->has_position = true;
  }
  for (Agent& a : agents_) {
    if (a.portfolio.bankrupt) continue;
    auto& positions = a.portfolio.open_positions;
    for (auto it = positions.begin(); it != positions.end();) {
      if (it->entry_step + a.params.horizon != t) {
        ++it;
        continue;
      }
      Fill exit;
      for (std::size_t i = 0; i < orders.size(); ++i) {
        if (kinds[i] == OrderKind::liquidation && orders[i].agent_id == a.id) exit = fills[i];
      }
      const std::int64_t remainder = std::max<std::int64_t>(it->quantity - exit.quantity, 0);
      const Money marked = notional(new_price, remainder);
      Money pnl;
      if (it->side == Side::bid) {
        pnl = exit.value + marked - it->entry_value + it->dividends;
      } else {
        pnl = it->entry_value - exit.value - marked - it->dividends;
      }
      pnl -= it->entry_fees + exit.fees;
      auto pending = std::find_if(a.pending_trades.begin(), a.pending_trades.end(),
                                  [&](const PendingTrade& pt) { return pt.id == it->outcome_id; });
      if (pending != a.pending_trades.end()) {
        pending->value = pnl.to_double();
        pending->has_position = false;
        pending->resolve_step = t;
      }
      it = positions.erase(it);
    }
  }

  for (Agent& a : agents_) {
    const AccrualFlows flows = apply_accounting(a.portfolio, new_price, risk_free_step_, dividend_step_);
    audit.interest += flows.interest;
    audit.dividends += flows.dividends;
    for (OpenPosition& pos : a.portfolio.open_positions)
      pos.dividends += notional(new_price, pos.quantity).scaled(dividend_step_);
  }

  prices_.push_back(new_price);
  volumes_.push_back(update.volume);
  spreads_.push_back(update.spread);
  if (report && new_price <= 0.8 * price) result_.crash_steps.push_back(t - L);

  // NAV, drawdown, medians.
  for (Agent& a : agents_) {
    Portfolio& p = a.portfolio;
    const double nav = p.nav(new_price);
    p.nav_history.push_back(nav);
    a.cash_median.push(p.cash.to_double());
    a.holdings_median.push(static_cast<double>(p.shares));
    if (p.bankrupt) continue;
    const int year = (t - phase_origin) / config_.year_length;
    if (year != a.year_index) {
      a.year_index = year;
      a.year_peak = nav;
    }
    a.year_peak = std::max(a.year_peak, nav);
    if (a.year_peak > 0.0 && (a.year_peak - nav) / a.year_peak > a.params.drawdown_limit) {
      p.bankrupt = true;
      a.pending_forecasts.clear();
      a.pending_trades.clear();
      if (report) result_.bankruptcy_steps.push_back(t - L);
    }
  }

  // (5) matured rewards.
  for (Agent& a : agents_) {
    if (a.portfolio.bankrupt) continue;
    resolve_forecasts(a, t + 1);
    resolve_trades(a, t);
  }

  Money cash_end;
  std::int64_t shares_end = 0;
  for (const Agent& a : agents_) {
    cash_end += a.portfolio.cash;
    shares_end += a.portfolio.shares;
    if (a.portfolio.cash < Money{} || a.portfolio.shares < 0)
      throw InvariantViolation("agent " + std::to_string(a.id) + " has a negative balance");
  }
  audit.cash_delta = cash_end - cash_start;
  audit.total_shares = shares_end;
  audit.shares_outstanding = shares_outstanding_;
  if (shares_end != shares_outstanding_)
    throw InvariantViolation("share count drifted at step " + std::to_string(t));
  if (audit.cash_delta != audit.interest + audit.dividends - audit.fees + audit.external)
    throw InvariantViolation("cash flows do not reconcile at step " + std::to_string(t));
  if (report) result_.audit.push_back(audit);

  if (hooks_.on_step) {
    StepTrace trace;
    trace.step = t;
    trace.reporting = report;
    trace.orders = orders;
    trace.kinds = kinds;
    trace.update = &update;
    trace.bankrupt_before = bankrupt_before;
    trace.audit = &audit;
    hooks_.on_step(trace);
  }
  ++t_;
  return update;
}

void Simulation::resolve_forecasts(Agent& a, int price_step) {
  const auto cap = static_cast<std::size_t>(std::max(a.params.memory, 6));
  while (!a.pending_forecasts.empty() && a.pending_forecasts.front().target_step <= price_step) {
    const PendingForecast pf = a.pending_forecasts.front();
    a.pending_forecasts.pop_front();
    const double error = std::abs(pf.forecast - prices_[static_cast<std::size_t>(pf.target_step)]);
    const std::vector<double> history(a.forecast_errors.begin(), a.forecast_errors.end());
    const int reward = reward_from_percentile(error, history, /*higher_is_better=*/false);
    a.forecaster.update(pf.state, pf.action, reward, a.params.learning_rate);
    push_bounded(a.forecast_errors, error, cap);
    if (hooks_.on_policy_update)
      hooks_.on_policy_update({a.id, false, pf.issued_at, pf.state, pf.action, reward, &a.forecaster});
  }
}

void Simulation::resolve_trades(Agent& a, int step) {
  for (auto it = a.pending_trades.begin(); it != a.pending_trades.end();) {
    if (it->has_position || it->resolve_step > step) {
      ++it;
      continue;
    }
    reward_trade(a, *it, it->value);
    it = a.pending_trades.erase(it);
  }
}

void Simulation::reward_trade(Agent& a, const PendingTrade& pending, double value) {
  const auto cap = static_cast<std::size_t>(std::max(a.params.memory, 6));
  const std::vector<double> history(a.trade_values.begin(), a.trade_values.end());
  const int reward = reward_from_percentile(value, history, /*higher_is_better=*/true);
  a.trader.update(pending.state, pending.action, reward, a.params.learning_rate);
  push_bounded(a.trade_values, value, cap);
  if (hooks_.on_policy_update)
    hooks_.on_policy_update({a.id, true, pending.issued_at, pending.state, pending.action, reward, &a.trader});
}

SimResult run_simulation(const SimConfig& config, int run_index, RunHooks hooks) {
  validate(config);
  Simulation sim(config, derive_run_seed(config.master_seed, static_cast<std::uint64_t>(run_index)),
                 std::move(hooks));
  sim.run_to_end();
  return sim.take_result();
}

}  // namespace rlmarket
