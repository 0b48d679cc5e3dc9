#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "rlmarket/experiments.hpp"
#include "rlmarket/metrics.hpp"
#include "rlmarket/simulation.hpp"

namespace rlmarket::io {

// Shortest round-trip decimal form of a double ("nan" for NaN).
std::string format_number(double x);

// step,P,V,S,fundamental,mean_nav
std::string run_csv(const SimResult& result);

// Crash and bankruptcy steps, metaorder events, headline counts.
std::string run_summary_json(const SimResult& result, const SimConfig& config, int run_index);

// grid_value,run,metric,value
std::string results_csv(const metrics::MetricTable& table);

// grid_value,run_length,count
std::string runlengths_csv(const metrics::MetricTable& table);

// run,step,agent,side,quantity,filled,target_ratio,ratio,tau,impact
std::string metaorder_events_csv(const MetaorderStudy& study);

// agent,table,state,action,preference
std::string policy_snapshot_csv(std::span<const Agent> agents);

void write_file(const std::filesystem::path& path, const std::string& contents);

// Writes <kind>_results.csv and <kind>_runlengths.csv into `dir`.
void write_experiment(const std::filesystem::path& dir, ExperimentKind kind,
                      const metrics::MetricTable& table);

}  // namespace rlmarket::io
