#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rlmarket::metrics {

// r(t) = log(P(t) / P(t-1)). Throws std::domain_error for fewer than two
// prices or any non-positive price.
std::vector<double> log_returns(std::span<const double> prices);

// sigma/P over trailing windows of `lag` prices, one value per t >= lag - 1.
// Empty when `lag` exceeds the series. Throws std::domain_error for lag < 2.
std::vector<double> rolling_volatility(std::span<const double> prices, std::size_t lag);

// Pearson correlation between series[t-2d .. t-d) and series[t-d .. t)
// (two adjacent windows of length d ending at t, exclusive). NaN when either
// window is flat.
double interval_autocorr(std::span<const double> series, std::size_t delta, std::size_t t);

// Signed run-length histogram: +k for k consecutive rising steps, -k for
// falling ones. Unchanged steps end the current run and count nowhere.
std::map<int, std::int64_t> run_lengths(std::span<const double> prices);

// Steps with P(t) / P(t-1) <= 0.8.
std::int64_t count_crashes(std::span<const double> prices);

// Traded quantity as a percentage of shares outstanding.
double traded_ratio(std::int64_t quantity, std::int64_t shares_outstanding);

// (sigma_post - sigma_pre) / sigma_pre with sigma_pre over P[t-tau .. t] and
// sigma_post over P[t .. t+tau] (inclusive). NaN when sigma_pre is zero or
// the windows leave the series.
double volatility_impact(std::span<const double> prices, std::size_t t, std::size_t tau);

// Volume in basis points of shares outstanding.
std::vector<double> volume_bps(std::span<const std::int64_t> volumes,
                               std::int64_t shares_outstanding);

// Long-format statistics table: one row per (grid value, run, metric).
struct MetricRow {
  double grid_value = 0.0;
  int run = 0;
  std::string metric;
  double value = 0.0;
};

struct RunLengthRow {
  double grid_value = 0.0;
  int run_length = 0;
  std::int64_t count = 0;
};

struct MetricTable {
  std::vector<MetricRow> rows;
  std::vector<RunLengthRow> run_lengths;

  void add(double grid_value, int run, std::string metric, double value) {
    rows.push_back({grid_value, run, std::move(metric), value});
  }
  // Values of `metric` at `grid_value`, in row order.
  std::vector<double> column(double grid_value, const std::string& metric) const;
  // Mean of the non-NaN values of `metric` at `grid_value` (NaN if none).
  double mean_of(double grid_value, const std::string& metric) const;
  std::vector<double> grid_values() const;
};

}  // namespace rlmarket::metrics
