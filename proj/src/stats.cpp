#include "rlmarket/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rlmarket::stats {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return kNaN;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
  if (xs.empty()) return kNaN;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

double quantile(std::span<const double> xs, double p) {
  const double probs[] = {p};
  return quantiles(xs, probs).front();
}

std::vector<double> quantiles(std::span<const double> xs, std::span<const double> probs) {
  if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
  thread_local std::vector<double> buf;
  buf.assign(xs.begin(), xs.end());
  const auto n = buf.size();
  std::vector<double> out;
  out.reserve(probs.size());
  auto lo_it = buf.begin();
  for (double p : probs) {
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(n - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    auto kth = buf.begin() + static_cast<std::ptrdiff_t>(k);
    // Earlier selections leave everything before `lo_it` <= the rest.
    if (kth >= lo_it) std::nth_element(lo_it, kth, buf.end());
    double v = *kth;
    if (frac > 0.0 && k + 1 < n) {
      const double next = *std::min_element(kth + 1, buf.end());
      v += frac * (next - v);
    }
    out.push_back(v);
    lo_it = kth;
  }
  return out;
}

int tercile_bucket(double value, std::span<const double> history) {
  static constexpr double probs[] = {1.0 / 3.0, 2.0 / 3.0};
  const auto q = quantiles(history, probs);
  if (value <= q[0]) return 0;
  if (value > q[1]) return 2;
  return 1;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return kNaN;
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) return kNaN;
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double autocorrelation(std::span<const double> xs, std::size_t lag) {
  if (xs.size() <= lag + 1) return kNaN;
  return pearson(xs.first(xs.size() - lag), xs.subspan(lag));
}

double excess_kurtosis(std::span<const double> xs) {
  if (xs.size() < 2) return kNaN;
  const double m = mean(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m4 /= n;
  if (m2 == 0.0) return kNaN;
  return m4 / (m2 * m2) - 3.0;
}

void RunningMedian::push(double x) {
  if (lower_.empty() || x <= lower_.top()) {
    lower_.push(x);
  } else {
    upper_.push(x);
  }
  if (lower_.size() > upper_.size() + 1) {
    upper_.push(lower_.top());
    lower_.pop();
  } else if (upper_.size() > lower_.size()) {
    lower_.push(upper_.top());
    upper_.pop();
  }
}

double RunningMedian::median() const {
  if (empty()) return kNaN;
  if (lower_.size() > upper_.size()) return lower_.top();
  return 0.5 * (lower_.top() + upper_.top());
}

void RunningMedian::clear() {
  lower_ = {};
  upper_ = {};
}

}  // namespace rlmarket::stats
