#include "rlmarket/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rlmarket::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string run_csv(const SimResult& r) {
  std::ostringstream out;
  out << "step,P,V,S,fundamental,mean_nav\n";
  for (std::size_t t = 0; t < r.prices.size(); ++t) {
    out << t << ',' << format_number(r.prices[t]) << ',' << r.volumes[t] << ','
        << format_number(r.spreads[t]) << ',' << format_number(r.fundamentals[t]) << ','
        << format_number(r.mean_navs[t]) << '\n';
  }
  return out.str();
}

std::string run_summary_json(const SimResult& r, const SimConfig& config, int run_index) {
  nlohmann::ordered_json doc;
  doc["run"] = run_index;
  doc["master_seed"] = config.master_seed;
  doc["reported_steps"] = r.prices.size();
  doc["shares_outstanding"] = r.shares_outstanding;
  doc["crashes"] = r.crash_steps.size();
  doc["crash_steps"] = r.crash_steps;
  doc["bankruptcies"] = r.bankruptcy_steps.size();
  doc["bankruptcy_steps"] = r.bankruptcy_steps;
  auto events = nlohmann::ordered_json::array();
  for (const auto& e : r.metaorder_events) {
    events.push_back({{"step", e.step},
                      {"agent", e.agent},
                      {"side", e.side == Side::bid ? "buy" : "sell"},
                      {"quantity", e.quantity},
                      {"filled", e.filled},
                      {"target_ratio_pct", e.target_ratio},
                      {"ratio_pct", e.ratio}});
  }
  doc["metaorder_events"] = events;
  if (!r.prices.empty()) {
    doc["final_price"] = r.prices.back();
    doc["final_mean_nav"] = r.mean_navs.back();
  }
  return doc.dump(2) + "\n";
}

std::string results_csv(const metrics::MetricTable& table) {
  std::ostringstream out;
  out << "grid_value,run,metric,value\n";
  for (const auto& row : table.rows) {
    out << format_number(row.grid_value) << ',' << row.run << ',' << row.metric << ','
        << format_number(row.value) << '\n';
  }
  return out.str();
}

std::string runlengths_csv(const metrics::MetricTable& table) {
  std::ostringstream out;
  out << "grid_value,run_length,count\n";
  for (const auto& row : table.run_lengths)
    out << format_number(row.grid_value) << ',' << row.run_length << ',' << row.count << '\n';
  return out.str();
}

std::string metaorder_events_csv(const MetaorderStudy& study) {
  std::ostringstream out;
  out << "run,step,agent,side,quantity,filled,target_ratio,ratio,tau,impact\n";
  for (const auto& rec : study.events) {
    const auto& e = rec.event;
    for (std::size_t h = 0; h < study.impact_horizons.size(); ++h) {
      out << rec.run << ',' << e.step << ',' << e.agent << ',' << (e.side == Side::bid ? "buy" : "sell")
          << ',' << e.quantity << ',' << e.filled << ',' << format_number(e.target_ratio) << ','
          << format_number(e.ratio) << ',' << study.impact_horizons[h] << ','
          << format_number(rec.impacts[h]) << '\n';
    }
  }
  return out.str();
}

std::string policy_snapshot_csv(std::span<const Agent> agents) {
  std::ostringstream out;
  out << "agent,table,state,action,preference\n";
  for (const Agent& a : agents) {
    for (const auto& [name, policy] : {std::pair<const char*, const Policy*>{"forecast", &a.forecaster},
                                       std::pair<const char*, const Policy*>{"trade", &a.trader}}) {
      for (int s = 0; s < policy->num_states(); ++s)
        for (int act = 0; act < policy->num_actions(); ++act)
          out << a.id << ',' << name << ',' << s << ',' << act << ','
              << format_number(policy->preference(s, act)) << '\n';
    }
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_experiment(const std::filesystem::path& dir, ExperimentKind kind,
                      const metrics::MetricTable& table) {
  const std::string stem = to_string(kind);
  write_file(dir / (stem + "_results.csv"), results_csv(table));
  write_file(dir / (stem + "_runlengths.csv"), runlengths_csv(table));
}

}  // namespace rlmarket::io
