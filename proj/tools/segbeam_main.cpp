// Command-line front end: canned presets, config-driven runs, oracle
// self-checks, and bearing-time records.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "segbeam/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

void apply_overrides(segbeam::ExperimentConfig& cfg, int trials,
                     long long seed, const std::string& out_dir, int horizon,
                     bool traces) {
  if (trials > 0) cfg.trials = trials;
  if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
  if (!out_dir.empty()) cfg.outputs.dir = out_dir;
  if (horizon > 0) {
    cfg.scenario.horizon = horizon;
    // Explicit switch times may now fall outside the record.
    std::vector<int> kept;
    for (int s : cfg.scenario.switch_times)
      if (s <= horizon) kept.push_back(s);
    cfg.scenario.switch_times = std::move(kept);
  }
  if (traces) cfg.outputs.write_traces = true;
}

void print_summary(const segbeam::ResultBundle& bundle) {
  std::printf("trials=%d horizon=%d\n", bundle.trials, bundle.horizon);
  std::printf("%-22s %14s %14s %12s %10s\n", "label", "final_cum_mse",
              "mean_sinr_db", "n_chgpts", "cum_cost");
  for (const segbeam::AlgorithmSummary& s : bundle.summary)
    std::printf("%-22s %14.6g %14.4f %12.2f %10.4g\n", s.label.c_str(),
                s.final_cum_mse.mean, s.mean_sinr_db.mean,
                s.n_changepoints_mean, s.final_cum_cost_mean);
}

int run_config(const segbeam::ExperimentConfig& cfg) {
  std::fprintf(stderr, "running %d trial(s), horizon %d, %zu algorithm(s)\n",
               cfg.trials, cfg.scenario.horizon, cfg.beamformers.size());
  const segbeam::ResultBundle bundle = segbeam::run_experiment(cfg);
  print_summary(bundle);
  std::fprintf(stderr, "outputs under %s\n", cfg.outputs.dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segbeam: segmented distortionless beamforming simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  int trials = 0;
  long long seed = -1;
  int horizon = 0;
  bool traces = false;
  bool emit_config = false;
  int grid_points = 91;
  int avg_block = 16;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "path to a JSON experiment config")
      ->required();
  run->add_option("--trials", trials, "override trial count");
  run->add_option("--seed", seed, "override base seed");
  run->add_option("--out-dir", out_dir, "override output directory");
  run->add_option("--horizon", horizon, "override scenario horizon");
  run->add_flag("--traces", traces, "write per-snapshot traces.csv");

  std::string names;
  for (const std::string& n : segbeam::preset_names())
    names += (names.empty() ? "" : ", ") + n;
  CLI::App* pre =
      app.add_subcommand("preset", "run a canned experiment (" + names + ")");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_flag("--emit-config", emit_config,
                "print the preset's JSON config instead of running");
  pre->add_option("--trials", trials, "override trial count");
  pre->add_option("--seed", seed, "override base seed");
  pre->add_option("--out-dir", out_dir, "override output directory");
  pre->add_option("--horizon", horizon, "override scenario horizon");
  pre->add_flag("--traces", traces, "write per-snapshot traces.csv");

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "self-check the recursions against direct solvers");
  (void)oracle;

  CLI::App* btr = app.add_subcommand("btr", "write a bearing-time record");
  btr->add_option("config", config_path, "path to a JSON experiment config")
      ->required();
  btr->add_option("--grid", grid_points, "bearing grid points over [0,180]");
  btr->add_option("--block", avg_block, "snapshots averaged per time cell");
  btr->add_option("--out-dir", out_dir, "override output directory");
  btr->add_option("--seed", seed, "override base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      segbeam::ExperimentConfig cfg =
          segbeam::load_experiment_config(config_path);
      apply_overrides(cfg, trials, seed, out_dir, horizon, traces);
      return run_config(cfg);
    }
    if (pre->parsed()) {
      segbeam::ExperimentConfig cfg = segbeam::preset(preset_name);
      apply_overrides(cfg, trials, seed, out_dir, horizon, traces);
      if (emit_config) {
        std::printf("%s", segbeam::experiment_config_json(cfg).c_str());
        return kExitOk;
      }
      return run_config(cfg);
    }
    if (oracle->parsed()) {
      std::string report;
      const bool ok = segbeam::run_oracle_checks(report);
      std::printf("%s", report.c_str());
      return ok ? kExitOk : kExitNumeric;
    }
    if (btr->parsed()) {
      segbeam::ExperimentConfig cfg =
          segbeam::load_experiment_config(config_path);
      apply_overrides(cfg, 0, seed, out_dir, 0, false);
      segbeam::run_btr(cfg, grid_points, avg_block);
      std::fprintf(stderr, "btr.csv under %s\n", cfg.outputs.dir.c_str());
      return kExitOk;
    }
  } catch (const segbeam::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const segbeam::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const segbeam::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const segbeam::ContractViolation& e) {
    std::fprintf(stderr, "contract violation: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitOk;
}
