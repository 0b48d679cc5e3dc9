#include "rlmarket/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rlmarket {

using nlohmann::json;

double SimConfig::per_step_rate(double annual) const {
  return std::pow(1.0 + annual, 1.0 / year_length) - 1.0;
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void require_ratio(double v, const char* field) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0, field, "must lie in [0, 1]");
}

}  // namespace

void validate(const SimConfig& c) {
  require(c.num_agents >= 2, "sim.num_agents", "must be at least 2");
  require(c.horizon_steps >= 0, "sim.horizon_steps", "must be non-negative");
  require(c.learning_steps >= 0, "sim.learning_steps", "must be non-negative");
  require(c.num_runs >= 1, "sim.num_runs", "must be at least 1");
  require(c.tick_digits >= 0 && c.tick_digits <= 5, "sim.tick_digits", "must be in 0..5");
  require_ratio(c.hft_fraction, "sim.hft_fraction");
  require_ratio(c.broker_fee, "sim.broker_fee");
  require_ratio(c.annual_risk_free, "sim.annual_risk_free");
  require_ratio(c.annual_dividend, "sim.annual_dividend");
  require(c.week_length >= 1, "sim.week_length", "must be positive");
  require(c.week_length < c.month_length, "sim.month_length", "must exceed week_length");
  require(c.month_length < c.year_length, "sim.year_length", "must exceed month_length");
  require(std::isfinite(c.initial_price) && c.initial_price > 0.0, "sim.initial_price",
          "must be positive");
  require(std::isfinite(c.initial_cash) && c.initial_cash >= 0.0, "sim.initial_cash",
          "must be non-negative");
  require(c.initial_shares >= 0, "sim.initial_shares", "must be non-negative");
  require(c.initial_shares > 0 || c.initial_cash > 0.0, "sim.initial_cash",
          "agents need cash or shares");
  require_ratio(c.order_fraction, "sim.order_fraction");
  require(c.order_fraction < 1.0, "sim.order_fraction", "must be below 1 so fees stay funded");
  require(std::isfinite(c.fundamental_vol) && c.fundamental_vol >= 0.0, "sim.fundamental_vol",
          "must be non-negative");
  require(c.belief_max_delay >= 0, "sim.belief_max_delay", "must be non-negative");
  require(c.belief_max_bias >= 0.0 && c.belief_max_bias < 1.0, "sim.belief_max_bias",
          "must lie in [0, 1)");
  require_ratio(c.metaorder_max_ratio, "sim.metaorder_max_ratio");
  require(c.metaorder_limit_offset >= 0.0 && c.metaorder_limit_offset < 1.0,
          "sim.metaorder_limit_offset", "must lie in [0, 1)");
}

void validate(const ExperimentSettings& s) {
  require(!s.tick_digits_grid.empty(), "experiments.tick_digits_grid", "must not be empty");
  for (int d : s.tick_digits_grid)
    require(d >= 0 && d <= 5, "experiments.tick_digits_grid", "entries must be in 0..5");
  require(!s.hft_fraction_grid.empty(), "experiments.hft_fraction_grid", "must not be empty");
  for (double p : s.hft_fraction_grid) require_ratio(p, "experiments.hft_fraction_grid");
  require(!s.impact_horizons.empty(), "experiments.impact_horizons", "must not be empty");
  for (int tau : s.impact_horizons)
    require(tau >= 1, "experiments.impact_horizons", "entries must be positive");
  require(s.metaorder_runs >= 1, "experiments.metaorder_runs", "must be at least 1");
}

namespace {

// Reads optional `key` from `obj` into `out`, with type errors reported by path.
template <class T>
void read(const json& obj, const std::string& section, const char* key, T& out,
          std::set<std::string>& seen) {
  seen.insert(key);
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string path = section + "." + key;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(path, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(path, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(path, "expected a number");
    } else {
      if (!it->is_array()) throw ConfigError(path, "expected an array");
    }
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& seen) {
  for (const auto& [key, value] : obj.items()) {
    if (!seen.contains(key)) throw ConfigError(section + "." + key, "unknown key");
  }
}

}  // namespace

ConfigFile parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");

  ConfigFile cfg;
  std::set<std::string> top;
  if (auto it = doc.find("sim"); it != doc.end()) {
    top.insert("sim");
    if (!it->is_object()) throw ConfigError("sim", "expected an object");
    const json& s = *it;
    SimConfig& c = cfg.sim;
    std::set<std::string> seen;
    read(s, "sim", "num_agents", c.num_agents, seen);
    read(s, "sim", "horizon_steps", c.horizon_steps, seen);
    read(s, "sim", "learning_steps", c.learning_steps, seen);
    read(s, "sim", "num_runs", c.num_runs, seen);
    read(s, "sim", "tick_digits", c.tick_digits, seen);
    read(s, "sim", "hft_fraction", c.hft_fraction, seen);
    read(s, "sim", "metaorders_enabled", c.metaorders_enabled, seen);
    read(s, "sim", "broker_fee", c.broker_fee, seen);
    read(s, "sim", "annual_risk_free", c.annual_risk_free, seen);
    read(s, "sim", "annual_dividend", c.annual_dividend, seen);
    read(s, "sim", "year_length", c.year_length, seen);
    read(s, "sim", "month_length", c.month_length, seen);
    read(s, "sim", "week_length", c.week_length, seen);
    read(s, "sim", "initial_price", c.initial_price, seen);
    read(s, "sim", "initial_cash", c.initial_cash, seen);
    read(s, "sim", "initial_shares", c.initial_shares, seen);
    read(s, "sim", "order_fraction", c.order_fraction, seen);
    read(s, "sim", "fundamental_vol", c.fundamental_vol, seen);
    read(s, "sim", "belief_max_delay", c.belief_max_delay, seen);
    read(s, "sim", "belief_max_bias", c.belief_max_bias, seen);
    read(s, "sim", "metaorder_max_ratio", c.metaorder_max_ratio, seen);
    read(s, "sim", "metaorder_limit_offset", c.metaorder_limit_offset, seen);
    read(s, "sim", "master_seed", c.master_seed, seen);
    reject_unknown(s, "sim", seen);
  }
  if (auto it = doc.find("experiments"); it != doc.end()) {
    top.insert("experiments");
    if (!it->is_object()) throw ConfigError("experiments", "expected an object");
    const json& e = *it;
    ExperimentSettings& x = cfg.experiments;
    std::set<std::string> seen;
    read(e, "experiments", "tick_digits_grid", x.tick_digits_grid, seen);
    read(e, "experiments", "hft_fraction_grid", x.hft_fraction_grid, seen);
    read(e, "experiments", "impact_horizons", x.impact_horizons, seen);
    read(e, "experiments", "metaorder_runs", x.metaorder_runs, seen);
    reject_unknown(e, "experiments", seen);
  }
  for (const auto& [key, value] : doc.items()) {
    if (!top.contains(key)) throw ConfigError(key, "unknown key");
  }
  validate(cfg.sim);
  validate(cfg.experiments);
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const ConfigFile& cfg, int indent) {
  const SimConfig& c = cfg.sim;
  const ExperimentSettings& x = cfg.experiments;
  json doc;
  doc["sim"] = {
      {"num_agents", c.num_agents},
      {"horizon_steps", c.horizon_steps},
      {"learning_steps", c.learning_steps},
      {"num_runs", c.num_runs},
      {"tick_digits", c.tick_digits},
      {"hft_fraction", c.hft_fraction},
      {"metaorders_enabled", c.metaorders_enabled},
      {"broker_fee", c.broker_fee},
      {"annual_risk_free", c.annual_risk_free},
      {"annual_dividend", c.annual_dividend},
      {"year_length", c.year_length},
      {"month_length", c.month_length},
      {"week_length", c.week_length},
      {"initial_price", c.initial_price},
      {"initial_cash", c.initial_cash},
      {"initial_shares", c.initial_shares},
      {"order_fraction", c.order_fraction},
      {"fundamental_vol", c.fundamental_vol},
      {"belief_max_delay", c.belief_max_delay},
      {"belief_max_bias", c.belief_max_bias},
      {"metaorder_max_ratio", c.metaorder_max_ratio},
      {"metaorder_limit_offset", c.metaorder_limit_offset},
      {"master_seed", c.master_seed},
  };
  doc["experiments"] = {
      {"tick_digits_grid", x.tick_digits_grid},
      {"hft_fraction_grid", x.hft_fraction_grid},
      {"impact_horizons", x.impact_horizons},
      {"metaorder_runs", x.metaorder_runs},
  };
  return doc.dump(indent);
}

}  // namespace rlmarket
