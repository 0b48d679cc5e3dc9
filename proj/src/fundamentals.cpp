#include "rlmarket/fundamentals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlmarket {

FundamentalSeries generate_fundamental(std::size_t length, double vol, double initial_price,
                                       Rng& rng) {
  if (!(initial_price > 0.0)) throw std::domain_error("initial fundamental must be positive");
  FundamentalSeries out;
  out.values.reserve(length);
  if (length == 0) return out;
  out.values.push_back(initial_price);
  for (std::size_t t = 1; t < length; ++t) {
    const double z = rng.normal();
    out.values.push_back(out.values.back() * std::exp(vol * z));
  }
  return out;
}

double AgentBelief::value_at(const FundamentalSeries& series, int t) const {
  const int idx = std::max(t - delay_, 0);
  return series.values.at(static_cast<std::size_t>(idx)) * (1.0 + bias_);
}

AgentBelief cointegrate(int max_delay, double max_bias, Rng& rng) {
  const int delay = static_cast<int>(rng.uniform_int(0, max_delay));
  const double bias = max_bias > 0.0 ? rng.uniform(-max_bias, max_bias) : 0.0;
  return AgentBelief(delay, bias);
}

std::vector<double> belief_series(const FundamentalSeries& series, const AgentBelief& belief) {
  std::vector<double> out(series.values.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = belief.value_at(series, static_cast<int>(t));
  return out;
}

}  // namespace rlmarket
