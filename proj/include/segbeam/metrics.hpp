#pragma once

#include <functional>
#include <string>
#include <vector>

#include "segbeam/scenarios.hpp"

namespace segbeam {

// Everything one algorithm produced over one trial, as the metrics and
// writers consume it.
struct RunTrace {
  std::string label;
  CVector z;
  std::vector<int> weight_times;   // 1-based sample times of weights below
  std::vector<CVector> weights;
  std::vector<int> changepoints;   // detection times, empty for static runs
  RVector cumulative_cost;         // running sum of |z|^2, nondecreasing
};

// Builds cumulative_cost from z; weight samples attached by the caller.
RunTrace make_run_trace(std::string label, CVector z);

// Element t-1 is (1/t) * sum_{k<=t} |z[k]-target[k]|^2.
RVector mse_trace(const CVector& z, const CVector& target);

// |w^H v|^2 / ||w||^2; equals 1/||w||^2 for distortionless w.
double wng(const CVector& w, const SteeringVector& look);

// 20 log10 |w^H v(theta)| per grid bearing.
RVector beampattern(const CVector& w, const ArrayGeometry& geom,
                    const std::vector<double>& grid_deg);

// Output SINR in dB at each sampled weight time:
//   target_power |w^H v|^2 / (w^H R_in w)
// against the true interference-plus-noise covariance. Zero signal power or
// zero weights floor at the sentinel.
constexpr double kSinrFloorDb = -400.0;
RVector sinr_trace(const std::vector<CVector>& weights,
                   const std::vector<int>& times, const ScenarioTruth& truth);

// Runs a beamformer once per steering bearing over the same snapshots and
// returns z for that bearing.
using BeamformerRunner =
    std::function<CVector(const CMatrix& x, const SteeringVector& look)>;

// Bearing-time record: power(a, b) = |z_a[t]|^2 averaged over time block b
// of avg_block snapshots, in dB with a floor for silent cells.
struct BtrResult {
  std::vector<double> angles_deg;
  Eigen::MatrixXd power_db;  // grid x num_blocks
  int avg_block = 1;
};

constexpr double kBtrFloorDb = -300.0;
BtrResult btr(const CMatrix& x, const ArrayGeometry& geom,
              const std::vector<double>& grid_deg,
              const BeamformerRunner& runner, int avg_block = 1);

}  // namespace segbeam
