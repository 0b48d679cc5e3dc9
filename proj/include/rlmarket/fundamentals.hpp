#pragma once

#include <span>
#include <vector>

#include "rlmarket/rng.hpp"

namespace rlmarket {

// True value of the stock, hidden from agents.
struct FundamentalSeries {
  std::vector<double> values;
};

// Geometric random walk starting at `initial_price`:
// T(t) = T(t-1) * exp(vol * z_t), z_t standard normal.
FundamentalSeries generate_fundamental(std::size_t length, double vol, double initial_price,
                                       Rng& rng);

// An agent's delayed, biased view of the fundamental: B(t) = T(max(t - delay, 0)) * (1 + bias).
class AgentBelief {
public:
  AgentBelief() = default;
  AgentBelief(int delay, double bias) : delay_(delay), bias_(bias) {}

  int delay() const { return delay_; }
  double bias() const { return bias_; }

  // Uses only values[0..t].
  double value_at(const FundamentalSeries& series, int t) const;

private:
  int delay_ = 0;
  double bias_ = 0.0;
};

// Draws delay ~ U{0, max_delay} and bias ~ U(-max_bias, max_bias).
AgentBelief cointegrate(int max_delay, double max_bias, Rng& rng);

// Materializes B(t) over the whole series (diagnostics and tests).
std::vector<double> belief_series(const FundamentalSeries& series, const AgentBelief& belief);

}  // namespace rlmarket
