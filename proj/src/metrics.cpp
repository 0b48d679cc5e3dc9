#include "rlmarket/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rlmarket/stats.hpp"

namespace rlmarket::metrics {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> log_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw std::domain_error("log_returns needs at least two prices");
  for (double p : prices)
    if (!(p > 0.0)) throw std::domain_error("log_returns needs positive prices");
  std::vector<double> out(prices.size() - 1);
  for (std::size_t t = 1; t < prices.size(); ++t) out[t - 1] = std::log(prices[t] / prices[t - 1]);
  return out;
}

std::vector<double> rolling_volatility(std::span<const double> prices, std::size_t lag) {
  if (lag < 2) throw std::domain_error("rolling_volatility needs lag >= 2");
  std::vector<double> out;
  if (lag > prices.size()) return out;
  out.reserve(prices.size() - lag + 1);
  for (std::size_t end = lag; end <= prices.size(); ++end) {
    const auto window = prices.subspan(end - lag, lag);
    out.push_back(stats::population_std(window) / prices[end - 1]);
  }
  return out;
}

double interval_autocorr(std::span<const double> series, std::size_t delta, std::size_t t) {
  if (delta < 2 || t < 2 * delta || t > series.size()) return kNaN;
  return stats::pearson(series.subspan(t - 2 * delta, delta), series.subspan(t - delta, delta));
}

std::map<int, std::int64_t> run_lengths(std::span<const double> prices) {
  std::map<int, std::int64_t> hist;
  int run = 0;
  auto flush = [&] {
    if (run != 0) ++hist[run];
    run = 0;
  };
  for (std::size_t t = 1; t < prices.size(); ++t) {
    const double d = prices[t] - prices[t - 1];
    if (d > 0.0) {
      if (run < 0) flush();
      ++run;
    } else if (d < 0.0) {
      if (run > 0) flush();
      --run;
    } else {
      flush();
    }
  }
  flush();
  return hist;
}

std::int64_t count_crashes(std::span<const double> prices) {
  std::int64_t n = 0;
  for (std::size_t t = 1; t < prices.size(); ++t)
    if (prices[t] <= 0.8 * prices[t - 1]) ++n;
  return n;
}

double traded_ratio(std::int64_t quantity, std::int64_t shares_outstanding) {
  if (shares_outstanding <= 0) throw std::domain_error("shares outstanding must be positive");
  if (quantity < 0 || quantity > shares_outstanding)
    throw std::domain_error("traded quantity must lie in [0, shares outstanding]");
  return 100.0 * static_cast<double>(quantity) / static_cast<double>(shares_outstanding);
}

double volatility_impact(std::span<const double> prices, std::size_t t, std::size_t tau) {
  if (tau == 0 || t < tau || t + tau >= prices.size()) return kNaN;
  const double pre = stats::population_std(prices.subspan(t - tau, tau + 1));
  const double post = stats::population_std(prices.subspan(t, tau + 1));
  if (pre == 0.0) return kNaN;
  return (post - pre) / pre;
}

std::vector<double> volume_bps(std::span<const std::int64_t> volumes,
                               std::int64_t shares_outstanding) {
  if (shares_outstanding <= 0) throw std::domain_error("shares outstanding must be positive");
  std::vector<double> out(volumes.size());
  for (std::size_t i = 0; i < volumes.size(); ++i)
    out[i] = 1e4 * static_cast<double>(volumes[i]) / static_cast<double>(shares_outstanding);
  return out;
}

std::vector<double> MetricTable::column(double grid_value, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.grid_value == grid_value && r.metric == metric) out.push_back(r.value);
  return out;
}

double MetricTable::mean_of(double grid_value, const std::string& metric) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.grid_value == grid_value && r.metric == metric && !std::isnan(r.value)) {
      sum += r.value;
      ++n;
    }
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

std::vector<double> MetricTable::grid_values() const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.grid_value) == out.end()) out.push_back(r.grid_value);
  return out;
}

}  // namespace rlmarket::metrics
