#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segbeam/metrics.hpp"
#include "segbeam/segmentation.hpp"

namespace segbeam {

// One roster entry of an experiment.
//
// loading < 0 selects the automatic rule (default_loading over the trial's
// snapshots). penalty is the per-segment cost C in raw output-power units
// unless penalty_rel is set, in which case C = penalty * p * (early sample
// power estimate), letting one number work across scene scales.
struct BeamformerSpec {
  std::string kind;   // cbf, batch_capon, adaptive_mvdr, gsc, sliding_mpdr,
                      // omniscient, bsb, osb, osrls
  std::string label;  // unique; defaults to kind, windowed kinds get _<window>
  double loading = -1.0;
  double penalty = 1.0;
  bool penalty_rel = false;
  int min_seg = 0;
  int max_candidates = 64;
  int window = 64;  // sliding_mpdr only
};

struct OutputOptions {
  std::string dir = "out";
  bool write_traces = false;
  bool write_summary = true;
  bool write_changepoints = true;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<BeamformerSpec> beamformers;
  int trials = 20;
  std::uint64_t base_seed = 1;
  int sinr_stride = 0;  // 0 = auto: every snapshot up to 5000, else every 10th
  OutputOptions outputs;
};

// Strict parsing: unknown keys anywhere, keys that do not apply to the
// declared scenario kind or beamformer kind, duplicate labels, and type
// mismatches all raise ConfigError with the offending path.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_json(const ExperimentConfig& cfg);

// Canned experiments at desk scale: abrupt_a, pw_bearing, pw_time,
// birth_death.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single trial
};

struct AlgorithmSummary {
  std::string label;
  std::string kind;
  MetricStat final_cum_mse;
  MetricStat mean_sinr_db;
  double n_changepoints_mean = 0.0;
  double final_cum_cost_mean = 0.0;
};

struct ResultBundle {
  int trials = 0;
  int horizon = 0;
  std::vector<AlgorithmSummary> summary;               // roster order
  std::vector<std::vector<double>> final_mse;          // [alg][trial]
  std::vector<std::vector<double>> mean_sinr_db;       // [alg][trial]
  std::vector<std::vector<std::vector<ChangepointEvent>>>
      changepoints;                                    // [alg][trial]
  std::vector<std::vector<int>> true_changepoints;     // [trial]
};

// Runs one algorithm over one realized scenario. Weight samples are taken
// post-update at the given stride (diagnostics, SINR).
RunTrace run_beamformer(const BeamformerSpec& spec, const ScenarioDraw& draw,
                        int sinr_stride);

// Seeded Monte Carlo over the roster: trial seeds are base_seed + trial,
// trials run across the worker pool, and aggregation is an ordered
// reduction over trial index, so the worker count never changes results.
// Writes the configured output files under outputs.dir.
ResultBundle run_experiment(const ExperimentConfig& cfg);

// Worker count: SEGBEAM_WORKERS when set, else hardware concurrency.
int worker_count_from_env();

// Oracle self-checks behind the `oracle-check` subcommand: exhaustive
// enumeration vs both DP engines, and the recursive inverse vs dense
// inversion. Prints one line per suite to out; returns true when all pass.
bool run_oracle_checks(std::string& report);

// Bearing-time record driven by a config: scans the first trial's data with
// a conventional scanner and writes btr.csv under outputs.dir.
void run_btr(const ExperimentConfig& cfg, int grid_points = 91,
             int avg_block = 16);

}  // namespace segbeam
