#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "segbeam/beamformers.hpp"

namespace segbeam {

struct Segment {
  int start = 0;  // 1-based, inclusive
  int end = 0;    // inclusive
  CVector weights;
  double cost = 0.0;  // unpenalized cost of this segment under its weights
};

struct Partition {
  std::vector<Segment> segments;  // contiguous, first starts at 1
  double total_cost = 0.0;        // sum of segment costs + penalty per segment
};

// Forward-pass state of the penalized partition recursion.
// potential[j] is the best penalized cost of [1..j], potential[0] = 0.
// split[j] = i-1 where [i..j] is the last segment of that best partition.
// weights[j] holds the winning last-segment filter for end index j, which
// is all the traceback ever needs.
struct DpTable {
  RVector potential;
  std::vector<int> split;
  std::vector<CVector> weights;
  std::vector<double> seg_cost;  // unpenalized cost of the winning [i..j]
};

// Walks split pointers back from the horizon; segments in time order.
std::vector<std::pair<int, int>> traceback(const DpTable& table);

using IntervalCost = std::function<double(int start, int end)>;  // 1-based

// Penalized partition recursion over an arbitrary interval cost. Ties break
// toward the earliest start (the longest final segment). O(T^2) cost calls.
DpTable penalized_dp(const IntervalCost& cost, int horizon, double penalty);

// Exhaustive minimum over all 2^(T-1) contiguous partitions. Test oracle
// only; refuses horizons past 20. Ties break toward the lexicographically
// earliest boundary list.
struct OraclePartition {
  double total_cost = 0.0;
  std::vector<std::pair<int, int>> segments;
};

OraclePartition exhaustive_partition_search(const IntervalCost& cost,
                                            int horizon, double penalty);

// Direct batch interval costs, solved from scratch per call. These define
// the segment costs the DP engines must reproduce and back the oracle.
double capon_interval_cost(const CMatrix& x, const SteeringVector& look,
                           double loading, int start, int end);
double ridge_interval_cost(const CMatrix& x, const CVector& d, double loading,
                           int start, int end);

// Batch segmented regression: globally optimal penalized partition with one
// ridge fit per segment; d_hat stitched from per-segment fits.
struct SlsResult {
  CVector d_hat;
  Partition partition;
  DpTable table;
};

SlsResult sls_batch(const CMatrix& x, const CVector& d, double penalty,
                    double loading);

// Batch segmented beamformer: same recursion with the per-segment cost equal
// to the minimum distortionless output power; z stitched per segment.
struct BsbResult {
  CVector z;
  Partition partition;
  DpTable table;
};

BsbResult bsb(const CMatrix& x, const SteeringVector& look, double penalty,
              double loading);

// A detected segment boundary: the anchor moved to new_start at step time.
struct ChangepointEvent {
  int time = 0;       // 1-based snapshot index of the decision
  int new_start = 0;  // start index of the newly active segment
};

struct OnlineSegmenterOptions {
  double penalty = 1.0;  // per-segment cost C, raw output-power units
  double loading = 1e-3;
  int min_seg = 0;        // candidate must lead the anchor by more than this
  int max_candidates = 64;
};

// Causal greedy approximation of the batch recursion. One candidate filter
// per hypothesized segment start inside the bank; the anchor (earliest
// candidate) produces the output. Anchor moves are irrevocable and only
// forward. The bank is capped: beyond max_candidates the oldest non-anchor
// hypothesis is dropped.
//
// Per step: output from the anchor's current weights, spawn a candidate at
// the new snapshot, update every candidate, store the potential
// E[n] = min_i (E[i-1] + penalty + J_i) with J_i the candidate's running
// post-update output power, and move the anchor when the best candidate
// leads it by more than min_seg.
class OnlineSegmenter {
 public:
  struct StepResult {
    Complex z;
    std::optional<ChangepointEvent> event;
  };

  struct Candidate {
    MvdrFilterState filter;
  };

  OnlineSegmenter(const SteeringVector& look, OnlineSegmenterOptions opts);

  StepResult step(const CVector& x);

  int time() const { return time_; }
  int anchor_start() const { return anchor_start_; }
  const MvdrFilterState& anchor() const { return bank_.front().filter; }
  // potentials()[t] = E[t]; index 0 is the empty-prefix zero.
  const std::vector<double>& potentials() const { return potentials_; }
  const std::vector<ChangepointEvent>& changepoints() const { return events_; }
  const std::deque<Candidate>& candidates() const { return bank_; }

 private:
  SteeringVector look_;
  OnlineSegmenterOptions opts_;
  std::deque<Candidate> bank_;  // ascending start; front is the anchor
  std::vector<double> potentials_;
  std::vector<ChangepointEvent> events_;
  int anchor_start_ = 1;
  int time_ = 0;
};

// One step of the online segmented beamformer; thin wrapper so callers can
// drive the state functionally.
OnlineSegmenter::StepResult osb_step(OnlineSegmenter& state, const CVector& x);

struct OsbResult {
  CVector z;
  std::vector<ChangepointEvent> changepoints;
  std::vector<double> potentials;  // E[0..T]
  int final_anchor = 1;
};

OsbResult osb_run(const CMatrix& x, const SteeringVector& look,
                  OnlineSegmenterOptions opts);

// Online segmented regression, same candidate-bank mechanics with RLS
// filters: causal output from the active candidate's current weights,
// per-candidate cost rho - r^H w (the loaded residual), same anchor rule.
struct OsrlsResult {
  CVector d_hat;
  std::vector<ChangepointEvent> changepoints;
  std::vector<double> potentials;
};

OsrlsResult osrls(const CMatrix& x, const CVector& d, double penalty,
                  double loading, int min_seg, int max_candidates = 64);

// Sequential interval cost: grow one filter from scratch across [start,end],
// summing post-update output power per snapshot. This is the convention the
// online potential accrues costs in, so online-vs-batch comparisons use it
// on both sides.
double sequential_capon_cost(const CMatrix& x, const SteeringVector& look,
                             double loading, int start, int end);

// Best penalized partition of x under the sequential cost convention,
// computed in O(T^2 p^2) with one growing filter per start index.
// potential[j] gives the optimum for every prefix horizon j.
RVector sequential_capon_dp(const CMatrix& x, const SteeringVector& look,
                            double loading, double penalty);

}  // namespace segbeam
