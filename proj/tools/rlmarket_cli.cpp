// Command-line front end: single runs, the three studies, and config checks.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rlmarket/config.hpp"
#include "rlmarket/experiments.hpp"
#include "rlmarket/io.hpp"
#include "rlmarket/simulation.hpp"

namespace fs = std::filesystem;
using namespace rlmarket;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<int> runs;
  int run_index = 0;
  bool dump_policies = false;
  bool quiet = false;
};

ConfigFile resolve_config(const Options& opt) {
  ConfigFile cfg = opt.config_path.empty() ? ConfigFile{} : load_config(opt.config_path);
  if (opt.seed) cfg.sim.master_seed = *opt.seed;
  if (opt.runs) {
    cfg.sim.num_runs = *opt.runs;
    cfg.experiments.metaorder_runs = *opt.runs;
  }
  validate(cfg.sim);
  validate(cfg.experiments);
  return cfg;
}

fs::path output_dir(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("RLMARKET_OUT"); env && *env) return env;
  return "out";
}

void progress(const Options& opt, const std::string& msg) {
  if (!opt.quiet) std::cerr << msg << '\n';
}

int cmd_validate(const Options& opt) {
  const ConfigFile cfg = resolve_config(opt);
  std::cout << to_json(cfg) << '\n';
  std::cout << "I=" << cfg.sim.num_agents << " T=" << cfg.sim.horizon_steps
            << " S=" << cfg.sim.num_runs << " learning=" << cfg.sim.learning_steps
            << " digits=" << cfg.sim.tick_digits << " p=" << cfg.sim.hft_fraction << '\n';
  return 0;
}

int cmd_run(const Options& opt) {
  const ConfigFile cfg = resolve_config(opt);
  const fs::path dir = output_dir(opt);
  Simulation sim(cfg.sim, derive_run_seed(cfg.sim.master_seed, static_cast<std::uint64_t>(opt.run_index)));
  const int total = cfg.sim.total_steps();
  while (!sim.finished()) {
    sim.step();
    if (!opt.quiet && sim.current_step() % 500 == 0)
      std::cerr << "step " << sim.current_step() << "/" << total << '\n';
  }
  const std::string stem = "run_" + std::to_string(opt.run_index);
  io::write_file(dir / (stem + ".csv"), io::run_csv(sim.result()));
  io::write_file(dir / (stem + "_summary.json"), io::run_summary_json(sim.result(), cfg.sim, opt.run_index));
  if (opt.dump_policies) io::write_file(dir / (stem + "_policies.csv"), io::policy_snapshot_csv(sim.agents()));
  progress(opt, "wrote " + (dir / (stem + ".csv")).string());
  return 0;
}

int cmd_experiment(const Options& opt, ExperimentKind kind) {
  const ConfigFile cfg = resolve_config(opt);
  const fs::path dir = output_dir(opt);
  ExperimentSpec spec = make_spec(kind, cfg);
  spec.jobs = opt.jobs;
  spec.progress = [&](const std::string& msg) { progress(opt, msg); };
  if (kind == ExperimentKind::metaorder) {
    const MetaorderStudy study = run_metaorder_experiment(spec);
    io::write_experiment(dir, kind, study.table);
    io::write_file(dir / "metaorder_events.csv", io::metaorder_events_csv(study));
  } else {
    const auto table = kind == ExperimentKind::tick_size ? run_tick_size_experiment(spec)
                                                         : run_frequency_experiment(spec);
    io::write_experiment(dir, kind, table);
  }
  progress(opt, std::string("wrote ") + to_string(kind) + " results to " + dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent reinforcement-learning stock market simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--out", opt.out_dir, "Output directory (default $RLMARKET_OUT or ./out)");
    sub->add_option("--seed", opt.seed, "Override the master seed");
    sub->add_flag("--quiet", opt.quiet, "Suppress progress on stderr");
  };
  auto add_parallel = [&](CLI::App* sub) {
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--runs", opt.runs, "Override the number of runs per grid point");
  };

  auto* run = app.add_subcommand("run", "Simulate one run; writes run CSV and JSON summary");
  add_common(run);
  run->add_option("--run-index", opt.run_index, "Monte-Carlo run index used for seeding");
  run->add_flag("--dump-policies", opt.dump_policies, "Also write every agent's preference tables");
  auto* tick = app.add_subcommand("tick", "Tick-size study");
  add_common(tick);
  add_parallel(tick);
  auto* meta = app.add_subcommand("metaorder", "Metaorder impact study");
  add_common(meta);
  add_parallel(meta);
  auto* freq = app.add_subcommand("frequency", "High-frequency population study");
  add_common(freq);
  add_parallel(freq);
  auto* val = app.add_subcommand("validate", "Check a config and print the resolved values");
  add_common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(opt);
    if (*tick) return cmd_experiment(opt, ExperimentKind::tick_size);
    if (*meta) return cmd_experiment(opt, ExperimentKind::metaorder);
    if (*freq) return cmd_experiment(opt, ExperimentKind::frequency);
    if (*val) return cmd_validate(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 1;
}
