#include <cmath>
#include <vector>

#include "doctest.h"
#include "rlmarket/agent.hpp"
#include "rlmarket/fundamentals.hpp"
#include "rlmarket/simulation.hpp"

using namespace rlmarket;
using V = std::vector<double>;

namespace {
AgentParams params_with(int horizon, int memory, double reflexivity) {
  AgentParams p;
  p.horizon = horizon;
  p.memory = memory;
  p.reflexivity = reflexivity;
  return p;
}
V iota_history(int n) {
  V h;
  for (int i = 1; i <= n; ++i) h.push_back(i);
  return h;
}
}  // namespace

TEST_CASE("parameter draws respect their ranges") {
  SimConfig c;
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const bool hft = i % 2 == 0;
    const auto p = draw_agent_params(c, hft, rng);
    CHECK(p.learning_rate > 0.05);
    CHECK(p.learning_rate < 0.20);
    CHECK(p.reflexivity > 0.0);
    CHECK(p.reflexivity < 1.0);
    CHECK(p.drawdown_limit > 0.5);
    CHECK(p.drawdown_limit < 0.6);
    CHECK(p.gesture > 0.2);
    CHECK(p.gesture < 0.8);
    CHECK(p.horizon >= c.week_length);
    CHECK(p.horizon <= (hft ? 2 * c.week_length - 1 : 6 * c.month_length));
    CHECK(p.trading_window >= c.week_length);
    CHECK(p.trading_window <= p.horizon);
    CHECK(p.memory >= c.week_length);
    CHECK(p.memory <= c.horizon_steps - p.horizon - 2 * c.week_length);
  }
}

TEST_CASE("population of 500 without high-frequency agents starts uniform") {
  SimConfig c;
  c.hft_fraction = 0.0;
  Rng frng(1), arng(2);
  const auto f = generate_fundamental(10, 0.01, 100, frng);
  const auto agents = init_agents(c, f, arng);
  REQUIRE(agents.size() == 500);
  int hft = 0;
  for (const auto& a : agents) {
    hft += a.params.is_hft;
    for (int s = 0; s < ForecastState::kCount; ++s) {
      double sum = 0.0;
      for (int k = 0; k < ForecastAction::kCount; ++k) {
        CHECK(a.forecaster.probability(s, k) == doctest::Approx(1.0 / 27));
        sum += a.forecaster.probability(s, k);
      }
      CHECK(sum == doctest::Approx(1.0));
    }
  }
  CHECK(hft == 0);
}

TEST_CASE("an all high-frequency pair draws short horizons") {
  SimConfig c;
  c.num_agents = 2;
  c.hft_fraction = 1.0;
  Rng frng(1), arng(3);
  const auto f = generate_fundamental(10, 0.01, 100, frng);
  const auto agents = init_agents(c, f, arng);
  for (const auto& a : agents) {
    CHECK(a.params.is_hft);
    CHECK(a.params.horizon >= 5);
    CHECK(a.params.horizon <= 9);
  }
}

TEST_CASE("same seed, same parameters") {
  SimConfig c;
  c.num_agents = 50;
  Rng f1(0), f2(0), a1(42), a2(42);
  const auto f = generate_fundamental(10, 0.01, 100, f1);
  const auto x = init_agents(c, f, a1);
  const auto y = init_agents(c, f, a2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].params.learning_rate == y[i].params.learning_rate);
    CHECK(x[i].params.horizon == y[i].params.horizon);
    CHECK(x[i].belief.bias() == y[i].belief.bias());
  }
}

TEST_CASE("lag menu is half, one and two horizons, capped") {
  CHECK(forecast_lag(0, 9, 100, 100) == 5);
  CHECK(forecast_lag(1, 9, 100, 100) == 9);
  CHECK(forecast_lag(2, 9, 100, 100) == 18);
  CHECK(forecast_lag(2, 9, 12, 100) == 12);
  CHECK(forecast_lag(2, 9, 100, 7) == 7);
}

TEST_CASE("chartist tools on a short window") {
  const V p{90, 95, 100};
  CHECK(chartist_estimate(ForecastTool::trend, p, 1) == doctest::Approx(105.0));
  CHECK(chartist_estimate(ForecastTool::revert, p, 1) == doctest::Approx(90.0));
  CHECK(chartist_estimate(ForecastTool::mean, p, 1) == doctest::Approx(95.0));
  CHECK(chartist_estimate(ForecastTool::trend, p, 4) == doctest::Approx(120.0));
}

TEST_CASE("forecast blends chartist and fundamental views") {
  const V p{90, 95, 100};
  // Zero reflexivity: the chartist estimate alone.
  auto params = params_with(1, 100, 0.0);
  const ForecastAction trend{ForecastTool::trend, 2, 0};
  CHECK(*forecast(trend, p, 50.0, params, 2) == doctest::Approx(105.0));
  // Full reflexivity, high weight: k = 0.75.
  params = params_with(1, 100, 1.0);
  const ForecastAction mean_high{ForecastTool::mean, 2, 2};
  CHECK(*forecast(mean_high, p, 120.0, params, 2) == doctest::Approx(0.25 * 97.5 + 0.75 * 120.0));
  CHECK_FALSE(forecast(trend, V{100}, 100.0, params, 2).has_value());
}

TEST_CASE("constant prices with a matching belief forecast the price itself") {
  const V p(40, 100.0);
  for (int a = 0; a < ForecastAction::kCount; ++a) {
    const auto params = params_with(7, 30, 0.8);
    CHECK(*forecast(ForecastAction::decode(a), p, 100.0, params, 2) == doctest::Approx(100.0));
  }
}

TEST_CASE("forecasts are floored at one tick") {
  const V p{100, 50, 1};
  const auto params = params_with(20, 100, 0.0);
  CHECK(*forecast({ForecastTool::trend, 2, 0}, p, 1.0, params, 2) == 0.01);
}

TEST_CASE("forecast state corners") {
  const V h{1, 2, 3, 4, 5, 6};
  CHECK(discretize_forecast_state(1, h, 1, h, 1, h).encode() == 0);
  CHECK(discretize_forecast_state(6, h, 6, h, 6, h).encode() == 26);
  CHECK(discretize_forecast_state(6, h, 1, h, 3.5, h) == ForecastState{2, 0, 1});
}

TEST_CASE("constant prices: both volatilities low, state set by the gap alone") {
  const V prices(30, 100.0);
  V beliefs(30, 100.0);
  beliefs[29] = 110.0;
  const auto params = params_with(10, 20, 0.5);
  const auto s = discretize_state_F(prices, beliefs, 29, params, 5);
  REQUIRE(s.has_value());
  CHECK(s->long_vol == 0);
  CHECK(s->short_vol == 0);
  CHECK(s->gap == 2);
  CHECK(s->encode() == 2);
  CHECK_FALSE(discretize_state_F(prices, beliefs, 0, params, 5).has_value());
}

TEST_CASE("trade state") {
  const V vols{10, 20, 30};
  auto s = discretize_trade_state(ForecastTool::revert, 0, 5.0, 5.0, 1.0, 2.0, 0, vols);
  CHECK(s.volume == 0);
  CHECK(s.cash == 0);  // at the median: low
  CHECK(s.encode() == 0);
  s = discretize_trade_state(ForecastTool::trend, 2, 9.0, 5.0, 3.0, 2.0, 99, vols);
  CHECK(s.encode() == 107);
  CHECK(volume_bucket(20, vols) == 1);
  CHECK(volume_bucket(21, vols) == 2);
  CHECK(volume_bucket(5, V{}) == 1);
}

TEST_CASE("percentile rewards on a 60-point history") {
  const V h = iota_history(60);
  // Forecast errors: lower is better.
  CHECK(reward_from_percentile(0.5, h, false) == 4);
  CHECK(reward_from_percentile(61.0, h, false) == -4);
  CHECK(reward_from_percentile(15.0, h, false) == 2);
  CHECK(reward_from_percentile(25.0, h, false) == 1);
  // Cash flows: higher is better; the median itself takes the better bucket.
  CHECK(reward_from_percentile(30.5, h, true) == 1);
  CHECK(reward_from_percentile(100.0, h, true) == 4);
  CHECK(reward_from_percentile(-5.0, h, true) == -4);
  // Boundary value of the best bucket.
  const double q1 = stats::quantile(h, 1.0 / 6.0);
  CHECK(reward_from_percentile(q1, h, false) == 4);
}

TEST_CASE("every reward comes from the six-value set and extremes are symmetric") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    V h;
    const auto n = rng.uniform_int(6, 80);
    for (int i = 0; i < n; ++i) h.push_back(rng.uniform(-100, 100) + 1e-3 * i);
    double lo = h[0], hi = h[0];
    for (double x : h) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    CHECK(reward_from_percentile(hi + 1, h, true) == 4);
    CHECK(reward_from_percentile(lo - 1, h, true) == -4);
    CHECK(reward_from_percentile(lo - 1, h, false) == 4);
    CHECK(reward_from_percentile(hi + 1, h, false) == -4);
    const int r = reward_from_percentile(rng.uniform(-120, 120), h, trial % 2 == 0);
    CHECK((r == 4 || r == 2 || r == 1 || r == -1 || r == -2 || r == -4));
  }
}

TEST_CASE("short histories fall back to plus or minus one") {
  CHECK(reward_from_percentile(3.0, V{}, true) == 1);
  CHECK(reward_from_percentile(3.0, V{1, 2, 5}, true) == 1);
  CHECK(reward_from_percentile(1.0, V{1, 2, 5}, true) == -1);
  CHECK(reward_from_percentile(1.0, V{1, 2, 5}, false) == 1);
  CHECK(reward_from_percentile(4.0, V{1, 2, 5}, false) == -1);
}

TEST_CASE("order construction") {
  const TradeAction soft_long{Direction::buy, Gesture::soft};
  const auto o = build_order(soft_long, 100.0, 10000.0, 0, 2.0, 0.5, 0.5, 2, 3);
  REQUIRE(o.has_value());
  CHECK(o->side == Side::bid);
  CHECK(o->limit_price == 101.0);
  CHECK(o->quantity == 49);
  CHECK(o->agent_id == 3);

  const TradeAction hard_short{Direction::sell, Gesture::hard};
  const auto s = build_order(hard_short, 100.0, 0.0, 40, 2.0, 0.5, 0.5, 2, 0);
  REQUIRE(s.has_value());
  CHECK(s->side == Side::ask);
  CHECK(s->limit_price == 101.0);
  CHECK(s->quantity == 20);

  CHECK_FALSE(build_order({Direction::hold, Gesture::soft}, 100, 1e4, 10, 2, 0.5, 0.5, 2, 0));
  CHECK_FALSE(build_order({Direction::sell, Gesture::soft}, 100, 1e4, 0, 2, 0.5, 0.5, 2, 0));
  CHECK_FALSE(build_order({Direction::buy, Gesture::soft}, 100, 10, 0, 2, 0.5, 0.5, 2, 0));
  const auto neutral = build_order({Direction::buy, Gesture::neutral}, 99.996, 1e4, 0, 2, 0.5, 0.5, 2, 0);
  REQUIRE(neutral.has_value());
  CHECK(neutral->limit_price == 100.0);
}

TEST_CASE("liquidations concede the spread and stay funded") {
  const auto sell = build_liquidation(Side::bid, 30, 100.0, 0.0, 25, 2.0, 0.5, 0.001, 2, 1);
  REQUIRE(sell.has_value());
  CHECK(sell->side == Side::ask);
  CHECK(sell->limit_price == 99.0);
  CHECK(sell->quantity == 25);

  const auto buy = build_liquidation(Side::ask, 30, 100.0, 1000.0, 0, 2.0, 0.5, 0.001, 2, 1);
  REQUIRE(buy.has_value());
  CHECK(buy->side == Side::bid);
  CHECK(buy->limit_price == 101.0);
  CHECK(buy->quantity == 9);
  CHECK(buy->quantity * buy->limit_price * 1.001 <= 1000.0);
  CHECK_FALSE(build_liquidation(Side::ask, 30, 100.0, 50.0, 0, 2.0, 0.5, 0.001, 2, 1));
}
