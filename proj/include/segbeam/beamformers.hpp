#pragma once

#include <vector>

#include "segbeam/scenarios.hpp"
#include "segbeam/steering.hpp"

namespace segbeam {

// Every weight vector returned by this module satisfies w^H v = 1 (the
// distortionless constraint toward the look direction).

// Conventional (delay-and-sum) weights: v / (v^H v).
CVector conventional_weights(const SteeringVector& look);

// Diagonal loading rule used when a config says "auto": rel times the mean
// per-channel power of the first ten snapshots, or abs_floor with no data.
double default_loading(const CMatrix& x, double rel = 1e-2,
                       double abs_floor = 1e-3);

// Minimum-power weights from a maintained inverse: inv*v / (v^H inv*v).
CVector mvdr_weights(const HermitianState& state, const SteeringVector& look);

// Batch loaded solve over the whole record of x (sample-matrix inversion).
CVector batch_capon_weights(const CMatrix& x, const SteeringVector& look,
                            double loading);

// Snapshot-recursive distortionless filter on a growing window.
struct MvdrFilterState {
  HermitianState cov;    // inverse of (loading I + sum x x^H)
  CVector num;           // cov.inv * v
  double den = 0.0;      // v^H cov.inv v, real and positive
  int start = 1;         // snapshot index the window began at (1-based)
  double cum_cost = 0.0; // accumulated |w^H x|^2 with post-update weights

  CVector weights() const { return num / den; }
};

MvdrFilterState make_mvdr_state(const SteeringVector& look, double loading,
                                int start = 1);

// Emits z = w_prior^H x, then folds x into the state. cum_cost accrues the
// post-update output power |w_post^H x|^2, the running segment cost the
// online segmenter ranks candidates by.
Complex adaptive_mvdr_step(MvdrFilterState& state, const CVector& x,
                           const SteeringVector& look);

// Sidelobe-canceller decomposition: fixed quiescent path plus an adaptive
// path behind a projector that blocks the look direction, so the constraint
// holds no matter what the adaptive weights do.
struct GscState {
  CVector quiescent;    // v / (v^H v)
  CMatrix blocking;     // I - v v^H/(v^H v), Hermitian, annihilates v
  CVector adaptive;     // wa, starts at zero
  HermitianState cov;   // inverse of loaded covariance of the blocked channel
};

GscState make_gsc_state(const SteeringVector& look, double loading);

// Emits z = (wq - B wa_prior)^H x, then RLS-updates wa against the blocked
// snapshot with the main-beam output as the reference.
Complex gsc_step(GscState& state, const CVector& x);

// Composite weights wq - B wa of the current adaptive state.
CVector gsc_weights(const GscState& state);

// Batch ridge solution for the adaptive path: wa minimizing
// sum |wq^H x - wa^H B x|^2 + loading ||wa||^2 over the whole record.
CVector gsc_batch_adaptive(const CMatrix& x, const SteeringVector& look,
                           double loading);

// Causal sliding-window filter: z[t] uses the batch loaded solve over the
// window of snapshots ending at t-1 (prior weights). An empty window gives
// the conventional weights.
struct SlidingMpdrResult {
  CVector z;
  std::vector<CVector> weights;  // per step when requested, else empty
};

SlidingMpdrResult sliding_mpdr_run(const CMatrix& x, const SteeringVector& look,
                                   int window, double loading,
                                   bool keep_weights = false);

// Clairvoyant reference: per-block loaded solve against the true ensemble
// covariance, applied to the same snapshots.
struct OmniscientResult {
  CVector z;
  std::vector<CVector> block_weights;  // one per schedule block
};

OmniscientResult omniscient_capon_run(const ScenarioTruth& truth,
                                      const CMatrix& x,
                                      const SteeringVector& look,
                                      double loading);

}  // namespace segbeam
