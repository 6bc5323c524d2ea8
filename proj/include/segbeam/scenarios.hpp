#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "segbeam/rng.hpp"
#include "segbeam/steering.hpp"

namespace segbeam {

// The four simulated interference environments.
//
//   AbruptBlocks     interferer bearings and powers redrawn every block
//   PiecewiseBearing one interferer whose bearing jumps between blocks
//   PiecewiseTime    a fixed-size active subset redrawn between blocks
//   BirthDeath       per-snapshot Markov appearance/disappearance
enum class ScenarioKind {
  AbruptBlocks,
  PiecewiseBearing,
  PiecewiseTime,
  BirthDeath,
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::AbruptBlocks;
  int horizon = 1000;
  ArrayGeometry geometry;
  double target_angle_deg = 90.0;
  double target_snr_db = -5.0;  // relative to unit sensor noise

  // Interferer bearing pool. When the explicit list is empty, pool_size
  // bearings are rejection-sampled so their quiescent-pattern suppression
  // lands inside [band_lo_db, band_hi_db].
  std::vector<double> interferer_pool_deg;
  int pool_size = 6;
  double band_lo_db = 4.0;
  double band_hi_db = 15.0;

  double inr_db = 12.0;     // fixed-INR kinds
  double inr_lo_db = 20.0;  // AbruptBlocks draws per-source INR in this range
  double inr_hi_db = 25.0;

  int block_len = 150;
  int block_jitter = 0;  // block lengths drawn uniformly in len +- jitter
  int num_active = 2;    // simultaneous interferers (AbruptBlocks, PiecewiseTime)

  // Explicit block starts (each > 1, ascending). Overrides block_len/jitter
  // for the block-structured kinds.
  std::vector<int> switch_times;

  // BirthDeath chain. Expected on-duration is 1/p_death snapshots.
  double p_birth = 0.02;
  double p_death = 0.001;
  int max_active = 2;
};

// One stationary stretch of the schedule.
struct ScheduleBlock {
  int start = 1;  // 1-based, inclusive
  int end = 1;
  std::vector<int> active;       // pool indices, ascending
  std::vector<double> powers;    // per active source, linear
  CMatrix interference_cov;      // sum_k p_k a_k a_k^H + I, noise included
};

struct ScenarioTruth {
  ArrayGeometry geometry;
  SteeringVector target;
  double target_power = 0.0;  // linear
  std::vector<double> pool_deg;
  std::vector<SteeringVector> pool_steering;
  std::vector<ScheduleBlock> blocks;   // tile [1, horizon] contiguously
  std::vector<int> true_changepoints;  // start of every block after the first
  int horizon = 0;

  const ScheduleBlock& block_at(int t) const;  // 1-based
  // Active (bearing, power) pairs at snapshot t.
  std::vector<std::pair<double, double>> active_at(int t) const;
  const CMatrix& interference_cov_at(int t) const;
  CMatrix ensemble_cov_at(int t) const;  // adds the target rank-one part
};

struct ScenarioDraw {
  CMatrix snapshots;        // p x T
  CVector target_waveform;  // length T, the signal the estimators chase
  ScenarioTruth truth;
};

void validate_scenario(const ScenarioConfig& cfg);

// Deterministic given (cfg, seed); parallel trials use seed = base + trial.
ScenarioDraw generate(const ScenarioConfig& cfg, std::uint64_t seed);

// Suppression of bearing phi in the conventional pattern steered at the
// target: -20 log10 |w_q^H v(phi)| with w_q = v_t / (v_t^H v_t). Always
// >= 0; large values mean deep in the sidelobe floor.
double quiescent_suppression_db(const ArrayGeometry& geom, double target_deg,
                                double phi_deg);

}  // namespace segbeam
