#pragma once

#include <span>
#include <vector>

#include "rlmarket/rng.hpp"

namespace rlmarket {

// Tabular direct-policy-search learner: preferences H(s, a) with
// pi(s, .) = softmax(H(s, .)). Starts uniform.
class Policy {
public:
  Policy(int num_states, int num_actions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double preference(int state, int action) const { return prefs_[index(state, action)]; }
  double probability(int state, int action) const { return probs_[index(state, action)]; }
  std::span<const double> row(int state) const;

  // Inverse-CDF sample from pi(state, .) for a uniform draw u in [0, 1).
  int select(int state, double u) const;
  int select(int state, Rng& rng) const { return select(state, rng.uniform01()); }

  // H(s, a) += learning_rate * reward, then re-normalizes row s.
  void update(int state, int action, double reward, double learning_rate);

  // Overwrites a preference (tests and snapshots).
  void set_preference(int state, int action, double value);

private:
  std::size_t index(int state, int action) const;
  void refresh_row(int state);

  int num_states_;
  int num_actions_;
  std::vector<double> prefs_;
  std::vector<double> probs_;
};

// Forecasting action: econometric tool x lag size x fundamental weight.
enum class ForecastTool : int { revert = 0, mean = 1, trend = 2 };

struct ForecastAction {
  ForecastTool tool = ForecastTool::revert;
  int lag_level = 0;     // low, mid, high
  int weight_level = 0;  // low, mid, high

  static constexpr int kCount = 27;
  int encode() const { return 9 * static_cast<int>(tool) + 3 * lag_level + weight_level; }
  static ForecastAction decode(int index);
  friend bool operator==(const ForecastAction&, const ForecastAction&) = default;
};

enum class Direction : int { sell = 0, hold = 1, buy = 2 };  // short, hold, long
enum class Gesture : int { soft = 0, neutral = 1, hard = 2 };

struct TradeAction {
  Direction direction = Direction::hold;
  Gesture gesture = Gesture::neutral;

  static constexpr int kCount = 9;
  int encode() const { return 3 * static_cast<int>(direction) + static_cast<int>(gesture); }
  static TradeAction decode(int index);
  friend bool operator==(const TradeAction&, const TradeAction&) = default;
};

// Forecasting state: long-term volatility x short-term volatility x
// fundamental gap, each in {low, mid, high}.
struct ForecastState {
  int long_vol = 0;
  int short_vol = 0;
  int gap = 0;

  static constexpr int kCount = 27;
  int encode() const { return 9 * long_vol + 3 * short_vol + gap; }
  static ForecastState decode(int index);
  friend bool operator==(const ForecastState&, const ForecastState&) = default;
};

// Trading state: forecast tool x long-term volatility x cash {low, high} x
// holdings {low, high} x previous volume {zero, low, high}.
struct TradeState {
  ForecastTool tool = ForecastTool::revert;
  int long_vol = 0;
  int cash = 0;
  int holdings = 0;
  int volume = 0;

  static constexpr int kCount = 108;
  int encode() const {
    return 36 * static_cast<int>(tool) + 12 * long_vol + 6 * cash + 3 * holdings + volume;
  }
  static TradeState decode(int index);
  friend bool operator==(const TradeState&, const TradeState&) = default;
};

}  // namespace rlmarket
