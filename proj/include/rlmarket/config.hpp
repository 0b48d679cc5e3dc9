#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlmarket {

// Raised for invalid configuration values; `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// Raised when a simulation invariant is broken at run time.
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct SimConfig {
  int num_agents = 500;
  int horizon_steps = 2875;  // reported steps, after the learning phase
  int learning_steps = 1000;
  int num_runs = 20;
  int tick_digits = 2;
  double hft_fraction = 0.0;
  bool metaorders_enabled = false;

  double broker_fee = 0.001;
  double annual_risk_free = 0.01;
  double annual_dividend = 0.02;

  int year_length = 281;
  int month_length = 21;
  int week_length = 5;

  double initial_price = 100.0;
  double initial_cash = 100'000.0;
  std::int64_t initial_shares = 1'000;
  double order_fraction = 0.2;

  double fundamental_vol = 0.01;
  int belief_max_delay = 5;
  double belief_max_bias = 0.05;

  // Metaorder injection.
  double metaorder_max_ratio = 0.15;
  double metaorder_limit_offset = 0.05;

  std::uint64_t master_seed = 42;

  int total_steps() const { return learning_steps + horizon_steps; }
  std::int64_t shares_outstanding() const {
    return static_cast<std::int64_t>(num_agents) * initial_shares;
  }
  // Per-step rate equivalent to an annual rate compounded over a trading year.
  double per_step_rate(double annual) const;
  double max_horizon() const { return 6.0 * month_length; }
};

// Throws ConfigError on the first violated bound.
void validate(const SimConfig& config);

// Grid and run counts of the three studies.
struct ExperimentSettings {
  std::vector<int> tick_digits_grid{0, 1, 2, 3, 4, 5};
  std::vector<double> hft_fraction_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<int> impact_horizons{5, 10, 21, 63};
  int metaorder_runs = 150;
};

void validate(const ExperimentSettings& settings);

struct ConfigFile {
  SimConfig sim;
  ExperimentSettings experiments;
};

// Parses a JSON configuration document. Unknown keys are rejected.
ConfigFile parse_config(const std::string& json_text);
ConfigFile load_config(const std::string& path);

// Resolved configuration as JSON text (every field, defaults filled in).
std::string to_json(const ConfigFile& config, int indent = 2);

}  // namespace rlmarket
