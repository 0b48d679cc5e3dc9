#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rlmarket/io.hpp"
#include "rlmarket/simulation.hpp"

using namespace rlmarket;

namespace {

SimConfig tiny() {
  SimConfig c;
  c.num_agents = 10;
  c.horizon_steps = 40;
  c.learning_steps = 20;
  return c;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("numbers round-trip") {
  CHECK(io::format_number(100.25) == "100.25");
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(std::nan("")) == "nan");
  CHECK(std::stod(io::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("run CSV has the documented header and one row per step") {
  const auto r = run_simulation(tiny(), 0);
  const auto csv = io::run_csv(r);
  CHECK(first_line(csv) == "step,P,V,S,fundamental,mean_nav");
  CHECK(line_count(csv) == 41);
  CHECK(csv == io::run_csv(run_simulation(tiny(), 0)));
}

TEST_CASE("run summary JSON") {
  const auto r = run_simulation(tiny(), 1);
  const auto doc = nlohmann::json::parse(io::run_summary_json(r, tiny(), 1));
  CHECK(doc["run"] == 1);
  CHECK(doc["crashes"] == r.crash_steps.size());
  CHECK(doc["bankruptcies"] == r.bankruptcy_steps.size());
  CHECK(doc["metaorder_events"].is_array());
}

TEST_CASE("long-format experiment CSVs") {
  metrics::MetricTable t;
  t.add(2, 0, "crashes", 1);
  t.add(2, 1, "crashes", 3);
  t.run_lengths.push_back({2, -3, 7});
  CHECK(io::results_csv(t) == "grid_value,run,metric,value\n2,0,crashes,1\n2,1,crashes,3\n");
  CHECK(io::runlengths_csv(t) == "grid_value,run_length,count\n2,-3,7\n");
}

TEST_CASE("policy snapshot covers both tables") {
  Simulation sim(tiny(), 3);
  const auto csv = io::policy_snapshot_csv(sim.agents());
  CHECK(first_line(csv) == "agent,table,state,action,preference");
  CHECK(line_count(csv) == 1 + 10 * (27 * 27 + 108 * 9));
}

TEST_CASE("experiment files land in the output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "rlmarket_io_test";
  std::filesystem::remove_all(dir);
  metrics::MetricTable t;
  t.add(0, 0, "x", 1);
  io::write_experiment(dir, ExperimentKind::frequency, t);
  CHECK(std::filesystem::exists(dir / "frequency_results.csv"));
  CHECK(std::filesystem::exists(dir / "frequency_runlengths.csv"));
  std::ifstream in(dir / "frequency_results.csv");
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == io::results_csv(t));
  std::filesystem::remove_all(dir);
}
