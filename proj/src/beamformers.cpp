#include "segbeam/beamformers.hpp"

#include <algorithm>

namespace segbeam {

namespace {

void check_look(const SteeringVector& look) {
  if (look.dim() < 1) throw ContractViolation("empty steering vector");
  if (!look.v.allFinite()) throw NumericError("non-finite steering vector");
}

}  // namespace

CVector conventional_weights(const SteeringVector& look) {
  check_look(look);
  const double n2 = look.v.squaredNorm();
  return look.v / n2;
}

double default_loading(const CMatrix& x, double rel, double abs_floor) {
  if (x.cols() == 0 || x.rows() == 0) return abs_floor;
  const Eigen::Index n = std::min<Eigen::Index>(10, x.cols());
  const double power =
      x.leftCols(n).squaredNorm() / static_cast<double>(n * x.rows());
  if (!(power > 0.0)) return abs_floor;
  return rel * power;
}

CVector mvdr_weights(const HermitianState& state, const SteeringVector& look) {
  check_look(look);
  if (look.dim() != state.dim())
    throw ContractViolation("steering dimension does not match state");
  CVector num = state.inv * look.v;
  const double den = look.v.dot(num).real();
  if (!(den > 0.0))
    throw SingularityError("steering vector annihilated by covariance state");
  return num / den;
}

CVector batch_capon_weights(const CMatrix& x, const SteeringVector& look,
                            double loading) {
  check_look(look);
  CVector num = regularized_gram_solve(x, look.v, loading);
  const double den = look.v.dot(num).real();
  if (!(den > 0.0))
    throw SingularityError("steering vector annihilated by sample covariance");
  return num / den;
}

MvdrFilterState make_mvdr_state(const SteeringVector& look, double loading,
                                int start) {
  check_look(look);
  MvdrFilterState s;
  s.cov = make_hermitian_state(look.dim(), loading);
  s.num = look.v / loading;
  s.den = look.v.squaredNorm() / loading;
  s.start = start;
  return s;
}

Complex adaptive_mvdr_step(MvdrFilterState& state, const CVector& x,
                           const SteeringVector& look) {
  const Complex z = state.num.dot(x) / state.den;  // w^H x with prior weights

  const Rank1Update upd = rank1_update(state.cov, x);
  // num = inv*v tracks the inverse: num -= k (x^H num)/gamma.
  state.num.noalias() -= upd.k * (x.dot(state.num) / upd.gamma);
  state.den = look.v.dot(state.num).real();
  if (!(state.den > 0.0))
    throw SingularityError("distortionless denominator collapsed");

  const Complex z_post = state.num.dot(x) / state.den;
  state.cum_cost += std::norm(z_post);
  return z;
}

GscState make_gsc_state(const SteeringVector& look, double loading) {
  check_look(look);
  GscState s;
  const double n2 = look.v.squaredNorm();
  s.quiescent = look.v / n2;
  s.blocking = CMatrix::Identity(look.dim(), look.dim()) -
               (look.v * look.v.adjoint()) / n2;
  s.adaptive = CVector::Zero(look.dim());
  s.cov = make_hermitian_state(look.dim(), loading);
  return s;
}

Complex gsc_step(GscState& state, const CVector& x) {
  if (x.size() != state.quiescent.size())
    throw ContractViolation("snapshot dimension does not match state");
  const Complex d = state.quiescent.dot(x);
  CVector xb = state.blocking * x;
  const Complex z = d - state.adaptive.dot(xb);

  const Rank1Update upd = rank1_update(state.cov, xb);
  state.adaptive.noalias() += upd.k * (std::conj(z) / upd.gamma);
  return z;
}

CVector gsc_weights(const GscState& state) {
  return state.quiescent - state.blocking * state.adaptive;
}

CVector gsc_batch_adaptive(const CMatrix& x, const SteeringVector& look,
                           double loading) {
  check_look(look);
  GscState s = make_gsc_state(look, loading);
  CMatrix xb = s.blocking * x;
  // Reference is the quiescent output; normal equations of the ridge fit.
  CVector d = x.adjoint() * s.quiescent;  // conj(d_t) stacked
  CVector r = xb * d;
  return regularized_gram_solve(xb, r, loading);
}

SlidingMpdrResult sliding_mpdr_run(const CMatrix& x, const SteeringVector& look,
                                   int window, double loading,
                                   bool keep_weights) {
  check_look(look);
  if (window < 1) throw ContractViolation("window must be at least 1");
  if (x.rows() != look.dim())
    throw ContractViolation("snapshot dimension does not match steering");
  if (!(loading > 0.0)) throw ContractViolation("loading must be positive");

  const int p = look.dim();
  const int horizon = static_cast<int>(x.cols());
  SlidingMpdrResult out;
  out.z.resize(horizon);
  if (keep_weights) out.weights.reserve(horizon);

  // Gram of the trailing window is slid by add/subtract of rank-one terms;
  // rebuilt from scratch periodically so drift cannot accumulate.
  constexpr int kRebuildEvery = 512;
  CMatrix gram = CMatrix::Identity(p, p) * loading;
  CVector w = conventional_weights(look);

  for (int t = 1; t <= horizon; ++t) {
    // Window covers snapshots [t-window, t-1]; prior weights stay causal.
    out.z[t - 1] = w.dot(x.col(t - 1));
    if (keep_weights) out.weights.push_back(w);

    gram.noalias() += x.col(t - 1) * x.col(t - 1).adjoint();
    const int drop = t - window;  // leaves snapshots [drop+1 .. t]
    if (drop >= 1) gram.noalias() -= x.col(drop - 1) * x.col(drop - 1).adjoint();

    if (t % kRebuildEvery == 0) {
      const int lo = std::max(1, t - window + 1);
      gram = CMatrix::Identity(p, p) * loading;
      gram.noalias() +=
          x.middleCols(lo - 1, t - lo + 1) * x.middleCols(lo - 1, t - lo + 1).adjoint();
    }

    CVector num = hermitian_solve(gram, look.v);
    const double den = look.v.dot(num).real();
    if (!(den > 0.0))
      throw SingularityError("sliding window covariance lost definiteness");
    w = num / den;
  }
  return out;
}

OmniscientResult omniscient_capon_run(const ScenarioTruth& truth,
                                      const CMatrix& x,
                                      const SteeringVector& look,
                                      double loading) {
  check_look(look);
  if (x.cols() != truth.horizon)
    throw ContractViolation("snapshot count does not match schedule");
  if (!(loading > 0.0)) throw ContractViolation("loading must be positive");

  const int p = look.dim();
  OmniscientResult out;
  out.z.resize(truth.horizon);
  out.block_weights.reserve(truth.blocks.size());

  for (const ScheduleBlock& blk : truth.blocks) {
    CMatrix r = truth.ensemble_cov_at(blk.start);
    r += CMatrix::Identity(p, p) * loading;
    CVector num = hermitian_solve(r, look.v);
    const double den = look.v.dot(num).real();
    if (!(den > 0.0))
      throw SingularityError("ensemble covariance annihilated the steering");
    CVector w = num / den;
    for (int t = blk.start; t <= blk.end; ++t)
      out.z[t - 1] = w.dot(x.col(t - 1));
    out.block_weights.push_back(std::move(w));
  }
  return out;
}

}  // namespace segbeam
