#pragma once

#include <functional>
#include <queue>
#include <span>
#include <vector>

namespace rlmarket::stats {

double mean(std::span<const double> xs);

// Population standard deviation (divides by n).
double population_std(std::span<const double> xs);

// Empirical quantile with linear interpolation between order statistics
// (position p * (n - 1)). `xs` must be non-empty.
double quantile(std::span<const double> xs, double p);

// Same, for several probabilities at once; `probs` must be ascending.
std::vector<double> quantiles(std::span<const double> xs, std::span<const double> probs);

// 0 = low (<= 1/3 quantile), 1 = mid, 2 = high (> 2/3 quantile) of `history`.
int tercile_bucket(double value, std::span<const double> history);

// Pearson correlation; NaN when either side has zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Lag-k autocorrelation of a series (Pearson of x[0..n-k) against x[k..n)).
double autocorrelation(std::span<const double> xs, std::size_t lag);

// Excess kurtosis m4 / m2^2 - 3 using population moments.
double excess_kurtosis(std::span<const double> xs);

// Median of a stream, updated in O(log n).
class RunningMedian {
public:
  void push(double x);
  double median() const;
  std::size_t size() const { return lower_.size() + upper_.size(); }
  bool empty() const { return size() == 0; }
  void clear();

private:
  std::priority_queue<double> lower_;
  std::priority_queue<double, std::vector<double>, std::greater<>> upper_;
};

}  // namespace rlmarket::stats
