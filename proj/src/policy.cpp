#include "rlmarket/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlmarket {

Policy::Policy(int num_states, int num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      prefs_(static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions), 0.0),
      probs_(prefs_.size(), 1.0 / num_actions) {
  if (num_states <= 0 || num_actions <= 0)
    throw std::invalid_argument("policy dimensions must be positive");
}

std::size_t Policy::index(int state, int action) const {
  if (state < 0 || state >= num_states_ || action < 0 || action >= num_actions_)
    throw std::out_of_range("policy index out of range");
  return static_cast<std::size_t>(state) * static_cast<std::size_t>(num_actions_) +
         static_cast<std::size_t>(action);
}

std::span<const double> Policy::row(int state) const {
  return std::span<const double>(probs_).subspan(index(state, 0),
                                                 static_cast<std::size_t>(num_actions_));
}

int Policy::select(int state, double u) const {
  const auto p = row(state);
  double cdf = 0.0;
  for (int a = 0; a < num_actions_; ++a) {
    cdf += p[static_cast<std::size_t>(a)];
    if (u < cdf) return a;
  }
  return num_actions_ - 1;
}

void Policy::update(int state, int action, double reward, double learning_rate) {
  prefs_[index(state, action)] += learning_rate * reward;
  refresh_row(state);
}

void Policy::set_preference(int state, int action, double value) {
  prefs_[index(state, action)] = value;
  refresh_row(state);
}

void Policy::refresh_row(int state) {
  const std::size_t base = index(state, 0);
  const auto n = static_cast<std::size_t>(num_actions_);
  const double hmax = *std::max_element(prefs_.begin() + static_cast<std::ptrdiff_t>(base),
                                        prefs_.begin() + static_cast<std::ptrdiff_t>(base + n));
  // Floor on the exponent keeps every entry strictly positive in double precision.
  constexpr double kMinExponent = -700.0;
  double z = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    probs_[base + a] = std::exp(std::max(prefs_[base + a] - hmax, kMinExponent));
    z += probs_[base + a];
  }
  for (std::size_t a = 0; a < n; ++a) probs_[base + a] /= z;
}

namespace {
void check_index(int index, int count, const char* what) {
  if (index < 0 || index >= count) throw std::out_of_range(std::string(what) + " index out of range");
}
}  // namespace

ForecastAction ForecastAction::decode(int index) {
  check_index(index, kCount, "forecast action");
  return {static_cast<ForecastTool>(index / 9), (index / 3) % 3, index % 3};
}

TradeAction TradeAction::decode(int index) {
  check_index(index, kCount, "trade action");
  return {static_cast<Direction>(index / 3), static_cast<Gesture>(index % 3)};
}

ForecastState ForecastState::decode(int index) {
  check_index(index, kCount, "forecast state");
  return {index / 9, (index / 3) % 3, index % 3};
}

TradeState TradeState::decode(int index) {
  check_index(index, kCount, "trade state");
  return {static_cast<ForecastTool>(index / 36), (index / 12) % 3, (index / 6) % 2,
          (index / 3) % 2, index % 3};
}

}  // namespace rlmarket
