#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rlmarket/config.hpp"
#include "rlmarket/metrics.hpp"
#include "rlmarket/simulation.hpp"

namespace rlmarket {

enum class ExperimentKind { tick_size, metaorder, frequency };

const char* to_string(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::tick_size;
  SimConfig base;
  // tick_size: digits; frequency: high-frequency share p. Unused for metaorder.
  std::vector<double> grid;
  int runs_per_point = 20;
  std::vector<int> impact_horizons{5, 10, 21, 63};
  // Optional reference level per metric; adds "<metric>_pct_of_reference" rows.
  std::map<std::string, double> normalization;
  int jobs = 1;
  std::function<void(const std::string&)> progress;
};

// Builds the spec for `kind` from a configuration file's grids.
ExperimentSpec make_spec(ExperimentKind kind, const ConfigFile& config);

// One metaorder with its impact at each horizon of the ladder.
struct ImpactRecord {
  int run = 0;
  MetaorderEvent event;
  std::vector<double> impacts;  // aligned with impact_horizons; NaN if undefined
};

struct MetaorderStudy {
  metrics::MetricTable table;
  std::vector<int> impact_horizons;
  std::vector<ImpactRecord> events;
};

// Realized-ratio buckets [0, 5), [5, 10), [10, 15] percent.
int impact_bucket(double ratio_percent);
extern const std::vector<std::string> kImpactBucketNames;

metrics::MetricTable run_tick_size_experiment(const ExperimentSpec& spec);
metrics::MetricTable run_frequency_experiment(const ExperimentSpec& spec);
MetaorderStudy run_metaorder_experiment(const ExperimentSpec& spec);

// Reduces a finished metaorder run to impact records.
std::vector<ImpactRecord> measure_impacts(const SimResult& result, int run,
                                          const std::vector<int>& horizons);

// Pools impact records into bucket-mean rows (grid value = horizon).
metrics::MetricTable summarize_impacts(const std::vector<ImpactRecord>& events,
                                       const std::vector<int>& horizons);

// Scalar statistics and run-length histogram of one finished run.
struct RunSummary {
  std::vector<std::pair<std::string, double>> metrics;
  std::map<int, std::int64_t> run_lengths;
};

RunSummary summarize_run(ExperimentKind kind, const SimResult& result);

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results come back in
// index order. The first exception thrown by any task is rethrown.
template <class Fn>
auto parallel_map(int n, int jobs, Fn&& fn) -> std::vector<decltype(fn(0))> {
  std::vector<decltype(fn(0))> out(static_cast<std::size_t>(std::max(n, 0)));
  if (n <= 0) return out;
  jobs = std::max(1, std::min(jobs, n));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rlmarket
