#include "rlmarket/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "rlmarket/stats.hpp"

namespace rlmarket {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_or_nan(const std::vector<double>& xs) {
  return xs.empty() ? kNaN : stats::mean(xs);
}

double mean_abs_log_return(const SimResult& r) {
  if (r.prices.size() < 2) return kNaN;
  auto rets = metrics::log_returns(r.prices);
  for (double& x : rets) x = std::abs(x);
  return stats::mean(rets);
}

double mean_volatility(const SimResult& r, int lag) {
  return mean_or_nan(metrics::rolling_volatility(r.prices, static_cast<std::size_t>(lag)));
}

double mean_spread_pct(const SimResult& r) {
  if (r.prices.empty()) return kNaN;
  double s = 0.0;
  for (std::size_t i = 0; i < r.prices.size(); ++i) s += 100.0 * r.spreads[i] / r.prices[i];
  return s / static_cast<double>(r.prices.size());
}

double mean_volume_bps(const SimResult& r) {
  return mean_or_nan(metrics::volume_bps(r.volumes, r.shares_outstanding));
}

double mean_volume(const SimResult& r) {
  if (r.volumes.empty()) return kNaN;
  double s = 0.0;
  for (auto v : r.volumes) s += static_cast<double>(v);
  return s / static_cast<double>(r.volumes.size());
}

double mean_terminal_nav(const SimResult& r) {
  return r.mean_navs.empty() ? kNaN : r.mean_navs.back();
}

void add_normalized(metrics::MetricTable& table, const ExperimentSpec& spec) {
  if (spec.normalization.empty()) return;
  const auto rows = table.rows;
  for (const auto& row : rows) {
    const auto it = spec.normalization.find(row.metric);
    if (it == spec.normalization.end() || it->second == 0.0) continue;
    table.add(row.grid_value, row.run, row.metric + "_pct_of_reference", 100.0 * row.value / it->second);
  }
}

// Runs every (grid point, run) pair, summarizing each run in its worker,
// and writes rows grouped by grid point in run order.
metrics::MetricTable run_grid(const ExperimentSpec& spec,
                              const std::function<SimConfig(double)>& configure) {
  const int points = static_cast<int>(spec.grid.size());
  const int runs = spec.runs_per_point;
  std::vector<SimConfig> configs;
  for (double g : spec.grid) {
    SimConfig c = configure(g);
    validate(c);
    configs.push_back(c);
  }
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  const auto summaries = parallel_map(points * runs, spec.jobs, [&](int i) {
    const SimConfig& c = configs[static_cast<std::size_t>(i / runs)];
    RunSummary s = summarize_run(spec.kind, run_simulation(c, i % runs));
    const int finished = ++done;
    if (spec.progress) {
      std::lock_guard lock(progress_mutex);
      spec.progress(std::string(to_string(spec.kind)) + ": " + std::to_string(finished) + "/" +
                    std::to_string(points * runs) + " runs");
    }
    return s;
  });
  metrics::MetricTable table;
  for (int p = 0; p < points; ++p) {
    const double g = spec.grid[static_cast<std::size_t>(p)];
    std::map<int, std::int64_t> pooled;
    for (int run = 0; run < runs; ++run) {
      const RunSummary& s = summaries[static_cast<std::size_t>(p * runs + run)];
      for (const auto& [name, value] : s.metrics) table.add(g, run, name, value);
      for (const auto& [k, n] : s.run_lengths) pooled[k] += n;
    }
    for (const auto& [k, n] : pooled) table.run_lengths.push_back({g, k, n});
  }
  add_normalized(table, spec);
  return table;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::tick_size: return "tick";
    case ExperimentKind::metaorder: return "metaorder";
    case ExperimentKind::frequency: return "frequency";
  }
  return "unknown";
}

ExperimentSpec make_spec(ExperimentKind kind, const ConfigFile& config) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.base = config.sim;
  spec.runs_per_point = config.sim.num_runs;
  spec.impact_horizons = config.experiments.impact_horizons;
  switch (kind) {
    case ExperimentKind::tick_size:
      for (int d : config.experiments.tick_digits_grid) spec.grid.push_back(d);
      break;
    case ExperimentKind::frequency:
      spec.grid = config.experiments.hft_fraction_grid;
      break;
    case ExperimentKind::metaorder:
      spec.runs_per_point = config.experiments.metaorder_runs;
      break;
  }
  return spec;
}

RunSummary summarize_run(ExperimentKind kind, const SimResult& r) {
  RunSummary s;
  auto add = [&](std::string name, double v) { s.metrics.emplace_back(std::move(name), v); };
  add("mean_abs_log_return", mean_abs_log_return(r));
  const std::vector<int> lags = kind == ExperimentKind::frequency ? std::vector<int>{5, 21, 126}
                                                                  : std::vector<int>{10, 63, 281};
  for (int lag : lags) add("volatility_" + std::to_string(lag), mean_volatility(r, lag));
  add("mean_spread_pct", mean_spread_pct(r));
  add("mean_volume", mean_volume(r));
  add("mean_volume_bps", mean_volume_bps(r));
  add("crashes", static_cast<double>(r.crash_steps.size()));
  add("bankruptcies", static_cast<double>(r.bankruptcy_steps.size()));
  add("mean_terminal_nav", mean_terminal_nav(r));
  if (r.prices.size() >= 2) s.run_lengths = metrics::run_lengths(r.prices);
  return s;
}

metrics::MetricTable run_tick_size_experiment(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::tick_size) throw std::invalid_argument("expected a tick-size spec");
  return run_grid(spec, [&](double digits) {
    SimConfig c = spec.base;
    c.tick_digits = static_cast<int>(digits);
    return c;
  });
}

metrics::MetricTable run_frequency_experiment(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::frequency) throw std::invalid_argument("expected a frequency spec");
  return run_grid(spec, [&](double p) {
    SimConfig c = spec.base;
    c.hft_fraction = p;
    return c;
  });
}

const std::vector<std::string> kImpactBucketNames{"rho_0_5", "rho_5_10", "rho_10_15"};

int impact_bucket(double ratio_percent) {
  if (!(ratio_percent >= 0.0) || ratio_percent > 15.0) return -1;
  if (ratio_percent < 5.0) return 0;
  if (ratio_percent < 10.0) return 1;
  return 2;
}

std::vector<ImpactRecord> measure_impacts(const SimResult& result, int run,
                                          const std::vector<int>& horizons) {
  std::vector<ImpactRecord> out;
  for (const MetaorderEvent& e : result.metaorder_events) {
    ImpactRecord rec;
    rec.run = run;
    rec.event = e;
    for (int tau : horizons)
      rec.impacts.push_back(metrics::volatility_impact(result.prices, static_cast<std::size_t>(e.step),
                                                       static_cast<std::size_t>(tau)));
    out.push_back(std::move(rec));
  }
  return out;
}

metrics::MetricTable summarize_impacts(const std::vector<ImpactRecord>& events,
                                       const std::vector<int>& horizons) {
  metrics::MetricTable table;
  if (events.empty()) return table;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const double tau = horizons[h];
    for (int b = 0; b < 3; ++b) {
      std::vector<double> pooled, buys, sells;
      int flagged = 0;
      for (const auto& rec : events) {
        if (impact_bucket(rec.event.ratio) != b) continue;
        const double v = rec.impacts[h];
        if (std::isnan(v)) {
          ++flagged;
          continue;
        }
        pooled.push_back(v);
        (rec.event.side == Side::bid ? buys : sells).push_back(v);
      }
      const std::string name = kImpactBucketNames[static_cast<std::size_t>(b)];
      table.add(tau, -1, "impact_" + name, mean_or_nan(pooled));
      table.add(tau, -1, "impact_" + name + "_buy", mean_or_nan(buys));
      table.add(tau, -1, "impact_" + name + "_sell", mean_or_nan(sells));
      table.add(tau, -1, "events_" + name, static_cast<double>(pooled.size()));
      table.add(tau, -1, "undefined_" + name, static_cast<double>(flagged));
    }
  }
  return table;
}

MetaorderStudy run_metaorder_experiment(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::metaorder) throw std::invalid_argument("expected a metaorder spec");
  SimConfig c = spec.base;
  c.metaorders_enabled = true;
  validate(c);
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  const auto per_run = parallel_map(spec.runs_per_point, spec.jobs, [&](int run) {
    auto recs = measure_impacts(run_simulation(c, run), run, spec.impact_horizons);
    const int finished = ++done;
    if (spec.progress) {
      std::lock_guard lock(progress_mutex);
      spec.progress("metaorder: " + std::to_string(finished) + "/" + std::to_string(spec.runs_per_point) + " runs");
    }
    return recs;
  });
  MetaorderStudy study;
  study.impact_horizons = spec.impact_horizons;
  for (const auto& recs : per_run) study.events.insert(study.events.end(), recs.begin(), recs.end());
  study.table = summarize_impacts(study.events, spec.impact_horizons);
  return study;
}

}  // namespace rlmarket
