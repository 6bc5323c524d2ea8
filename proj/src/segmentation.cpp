#include "segbeam/segmentation.hpp"

#include <algorithm>
#include <limits>

namespace segbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_horizon(int horizon) {
  if (horizon < 1) throw ContractViolation("horizon must be at least 1");
}

// The recursion below always accumulates totals as
//   prefix + (penalty + segment_cost)
// so equal partitions produce bit-identical sums across every engine and
// the oracle, keeping tie behavior consistent.

}  // namespace

std::vector<std::pair<int, int>> traceback(const DpTable& table) {
  std::vector<std::pair<int, int>> segs;
  int j = static_cast<int>(table.split.size()) - 1;
  while (j > 0) {
    const int i = table.split[j] + 1;
    segs.emplace_back(i, j);
    j = table.split[j];
  }
  std::reverse(segs.begin(), segs.end());
  return segs;
}

DpTable penalized_dp(const IntervalCost& cost, int horizon, double penalty) {
  check_horizon(horizon);
  if (penalty < 0.0) throw ContractViolation("penalty must be nonnegative");

  DpTable table;
  table.potential = RVector::Zero(horizon + 1);
  table.split.assign(horizon + 1, -1);
  table.weights.resize(horizon + 1);
  table.seg_cost.assign(horizon + 1, 0.0);

  for (int j = 1; j <= horizon; ++j) {
    double best = kInf;
    int best_i = 1;
    double best_cost = 0.0;
    for (int i = 1; i <= j; ++i) {
      const double c = cost(i, j);
      const double total = table.potential[i - 1] + (penalty + c);
      if (total < best) {
        best = total;
        best_i = i;
        best_cost = c;
      }
    }
    table.potential[j] = best;
    table.split[j] = best_i - 1;
    table.seg_cost[j] = best_cost;
  }
  return table;
}

OraclePartition exhaustive_partition_search(const IntervalCost& cost,
                                            int horizon, double penalty) {
  check_horizon(horizon);
  if (horizon > 20)
    throw ContractViolation("exhaustive search refuses horizons past 20");

  // Bit k of the mask places a boundary after position k+1. Ties on cost
  // keep the lexicographically earliest boundary list.
  OraclePartition best;
  best.total_cost = kInf;
  std::vector<int> best_bounds;

  const std::uint32_t masks = 1u << (horizon - 1);
  std::vector<int> bounds;
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    bounds.clear();
    for (int k = 0; k < horizon - 1; ++k)
      if (mask & (1u << k)) bounds.push_back(k + 1);
    bounds.push_back(horizon);

    double total = 0.0;
    int start = 1;
    for (int end : bounds) {
      total += penalty + cost(start, end);
      start = end + 1;
    }

    const bool better =
        total < best.total_cost ||
        (total == best.total_cost &&
         std::lexicographical_compare(bounds.begin(), bounds.end(),
                                      best_bounds.begin(), best_bounds.end()));
    if (better) {
      best.total_cost = total;
      best_bounds = bounds;
    }
  }

  int start = 1;
  for (int end : best_bounds) {
    best.segments.emplace_back(start, end);
    start = end + 1;
  }
  return best;
}

double capon_interval_cost(const CMatrix& x, const SteeringVector& look,
                           double loading, int start, int end) {
  if (start < 1 || end > x.cols() || start > end)
    throw ContractViolation("interval out of range");
  const CMatrix seg = x.middleCols(start - 1, end - start + 1);
  CVector w = batch_capon_weights(seg, look, loading);
  return (w.adjoint() * seg).squaredNorm();
}

double ridge_interval_cost(const CMatrix& x, const CVector& d, double loading,
                           int start, int end) {
  if (start < 1 || end > x.cols() || start > end)
    throw ContractViolation("interval out of range");
  const int len = end - start + 1;
  const CMatrix seg = x.middleCols(start - 1, len);
  const CVector dseg = d.segment(start - 1, len);
  CVector r = seg * dseg.conjugate();
  CVector w = regularized_gram_solve(seg, r, loading);
  return (dseg.transpose() - w.adjoint() * seg).squaredNorm();
}

namespace {

void check_batch_inputs(const CMatrix& x, double penalty, double loading) {
  if (x.cols() < 1 || x.rows() < 1)
    throw ContractViolation("empty snapshot matrix");
  if (penalty < 0.0) throw ContractViolation("penalty must be nonnegative");
  if (!(loading > 0.0)) throw ContractViolation("loading must be positive");
}

Partition build_partition(const DpTable& table) {
  Partition part;
  for (auto [i, j] : traceback(table)) {
    Segment s;
    s.start = i;
    s.end = j;
    s.weights = table.weights[j];
    s.cost = table.seg_cost[j];
    part.segments.push_back(std::move(s));
  }
  part.total_cost = table.potential[table.potential.size() - 1];
  return part;
}

}  // namespace

BsbResult bsb(const CMatrix& x, const SteeringVector& look, double penalty,
              double loading) {
  check_batch_inputs(x, penalty, loading);
  if (x.rows() != look.dim())
    throw ContractViolation("snapshot dimension does not match steering");

  const int horizon = static_cast<int>(x.cols());
  DpTable table;
  table.potential = RVector::Zero(horizon + 1);
  table.split.assign(horizon + 1, -1);
  table.weights.resize(horizon + 1);
  table.seg_cost.assign(horizon + 1, 0.0);

  // For fixed end j the filter state is grown leftward: folding x[i] into
  // the state for [i+1, j] yields the state for [i, j], so all j interval
  // costs come out of one rank-one sweep. The cost identity
  //   E(i,j) = 1/den - loading * ||w||^2
  // equals the realized output power ||w^H X_seg||^2 of the loaded solve.
  const double look_norm2 = look.v.squaredNorm();
  HermitianState inv = make_hermitian_state(look.dim(), loading);
  CVector num(look.dim());
  CVector best_w(look.dim());

  for (int j = 1; j <= horizon; ++j) {
    inv.inv = CMatrix::Identity(look.dim(), look.dim()) / loading;
    num = look.v / loading;
    double den = look_norm2 / loading;

    double best = kInf;
    int best_i = 1;
    double best_cost = 0.0;

    for (int i = j; i >= 1; --i) {
      const auto xi = x.col(i - 1);
      const Rank1Update upd = rank1_update(inv, xi);
      num.noalias() -= upd.k * (xi.dot(num) / upd.gamma);
      den = look.v.dot(num).real();
      if (!(den > 0.0))
        throw SingularityError("distortionless denominator collapsed");

      const double cost = 1.0 / den - loading * num.squaredNorm() / (den * den);
      const double total = table.potential[i - 1] + (penalty + cost);
      // <= under the descending sweep keeps the earliest start on ties,
      // matching the ascending strict < of the reference recursion.
      if (total <= best) {
        best = total;
        best_i = i;
        best_cost = cost;
        best_w = num / den;
      }
    }

    table.potential[j] = best;
    table.split[j] = best_i - 1;
    table.seg_cost[j] = best_cost;
    table.weights[j] = best_w;
  }

  BsbResult res;
  res.table = std::move(table);
  res.partition = build_partition(res.table);
  res.z.resize(horizon);
  for (const Segment& s : res.partition.segments)
    for (int t = s.start; t <= s.end; ++t)
      res.z[t - 1] = s.weights.dot(x.col(t - 1));
  return res;
}

SlsResult sls_batch(const CMatrix& x, const CVector& d, double penalty,
                    double loading) {
  check_batch_inputs(x, penalty, loading);
  if (d.size() != x.cols())
    throw ContractViolation("target length does not match snapshot count");

  const int horizon = static_cast<int>(x.cols());
  const int p = static_cast<int>(x.rows());
  DpTable table;
  table.potential = RVector::Zero(horizon + 1);
  table.split.assign(horizon + 1, -1);
  table.weights.resize(horizon + 1);
  table.seg_cost.assign(horizon + 1, 0.0);

  // Same leftward growth as the beamforming recursion, with ridge states.
  // The residual identity
  //   ||d_seg - w^H X_seg||^2 = energy - Re(r^H w) - loading ||w||^2
  // evaluates each interval cost without touching the segment again.
  HermitianState inv = make_hermitian_state(p, loading);
  CVector r(p);
  CVector w(p);
  CVector best_w(p);

  for (int j = 1; j <= horizon; ++j) {
    inv.inv = CMatrix::Identity(p, p) / loading;
    r.setZero();
    double energy = 0.0;

    double best = kInf;
    int best_i = 1;
    double best_cost = 0.0;

    for (int i = j; i >= 1; --i) {
      const auto xi = x.col(i - 1);
      const Rank1Update upd = rank1_update(inv, xi);
      r.noalias() += xi * std::conj(d[i - 1]);
      energy += std::norm(d[i - 1]);
      w.noalias() = inv.inv * r;

      const double cost =
          energy - r.dot(w).real() - loading * w.squaredNorm();
      const double total = table.potential[i - 1] + (penalty + cost);
      if (total <= best) {
        best = total;
        best_i = i;
        best_cost = cost;
        best_w = w;
      }
    }

    table.potential[j] = best;
    table.split[j] = best_i - 1;
    table.seg_cost[j] = best_cost;
    table.weights[j] = best_w;
  }

  SlsResult res;
  res.table = std::move(table);
  res.partition = build_partition(res.table);
  res.d_hat.resize(horizon);
  for (const Segment& s : res.partition.segments)
    for (int t = s.start; t <= s.end; ++t)
      res.d_hat[t - 1] = s.weights.dot(x.col(t - 1));
  return res;
}

OnlineSegmenter::OnlineSegmenter(const SteeringVector& look,
                                 OnlineSegmenterOptions opts)
    : look_(look), opts_(opts) {
  if (look.dim() < 1) throw ContractViolation("empty steering vector");
  if (opts.penalty < 0.0) throw ContractViolation("penalty must be nonnegative");
  if (!(opts.loading > 0.0)) throw ContractViolation("loading must be positive");
  if (opts.min_seg < 0) throw ContractViolation("min segment guard must be >= 0");
  if (opts.max_candidates < 1)
    throw ContractViolation("candidate cap must be at least 1");
  potentials_.push_back(0.0);
}

OnlineSegmenter::StepResult OnlineSegmenter::step(const CVector& x) {
  if (x.size() != look_.dim())
    throw ContractViolation("snapshot dimension does not match steering");
  const int n = ++time_;

  bank_.push_back({make_mvdr_state(look_, opts_.loading, n)});
  if (static_cast<int>(bank_.size()) > opts_.max_candidates)
    bank_.erase(bank_.begin() + 1);  // oldest non-anchor hypothesis

  const MvdrFilterState& af = bank_.front().filter;
  StepResult res;
  res.z = af.num.dot(x) / af.den;  // anchor's current weights, causal

  double emin = kInf;
  std::size_t best_idx = 0;
  for (std::size_t idx = 0; idx < bank_.size(); ++idx) {
    MvdrFilterState& f = bank_[idx].filter;
    adaptive_mvdr_step(f, x, look_);
    const double total =
        potentials_[f.start - 1] + (opts_.penalty + f.cum_cost);
    if (total < emin) {
      emin = total;
      best_idx = idx;
    }
  }
  potentials_.push_back(emin);

  const int best_start = bank_[best_idx].filter.start;
  if (best_start - anchor_start_ > opts_.min_seg) {
    while (bank_.front().filter.start < best_start) bank_.pop_front();
    anchor_start_ = best_start;
    events_.push_back({n, best_start});
    res.event = events_.back();
  }
  return res;
}

OnlineSegmenter::StepResult osb_step(OnlineSegmenter& state, const CVector& x) {
  return state.step(x);
}

OsbResult osb_run(const CMatrix& x, const SteeringVector& look,
                  OnlineSegmenterOptions opts) {
  if (x.cols() < 1 || x.rows() < 1)
    throw ContractViolation("empty snapshot matrix");
  OnlineSegmenter seg(look, opts);
  OsbResult res;
  res.z.resize(x.cols());
  for (Eigen::Index t = 0; t < x.cols(); ++t)
    res.z[t] = seg.step(x.col(t)).z;
  res.changepoints = seg.changepoints();
  res.potentials = seg.potentials();
  res.final_anchor = seg.anchor_start();
  return res;
}

OsrlsResult osrls(const CMatrix& x, const CVector& d, double penalty,
                  double loading, int min_seg, int max_candidates) {
  if (x.cols() < 1 || x.rows() < 1)
    throw ContractViolation("empty snapshot matrix");
  if (d.size() != x.cols())
    throw ContractViolation("target length does not match snapshot count");
  if (penalty < 0.0) throw ContractViolation("penalty must be nonnegative");
  if (!(loading > 0.0)) throw ContractViolation("loading must be positive");
  if (min_seg < 0) throw ContractViolation("min segment guard must be >= 0");
  if (max_candidates < 1)
    throw ContractViolation("candidate cap must be at least 1");

  struct Cand {
    HermitianState inv;
    CVector r;
    CVector w;
    double energy = 0.0;
    int start = 1;
  };

  const int p = static_cast<int>(x.rows());
  const int horizon = static_cast<int>(x.cols());

  OsrlsResult res;
  res.d_hat.resize(horizon);
  res.potentials.assign(1, 0.0);

  std::deque<Cand> bank;
  int anchor_start = 1;

  for (int n = 1; n <= horizon; ++n) {
    Cand fresh;
    fresh.inv = make_hermitian_state(p, loading);
    fresh.r = CVector::Zero(p);
    fresh.w = CVector::Zero(p);
    fresh.start = n;
    bank.push_back(std::move(fresh));
    if (static_cast<int>(bank.size()) > max_candidates)
      bank.erase(bank.begin() + 1);

    const auto xn = x.col(n - 1);
    res.d_hat[n - 1] = bank.front().w.dot(xn);  // prior anchor weights

    double emin = kInf;
    std::size_t best_idx = 0;
    for (std::size_t idx = 0; idx < bank.size(); ++idx) {
      Cand& c = bank[idx];
      rank1_update(c.inv, xn);
      c.r.noalias() += xn * std::conj(d[n - 1]);
      c.energy += std::norm(d[n - 1]);
      c.w.noalias() = c.inv.inv * c.r;

      const double cost = c.energy - c.r.dot(c.w).real();
      const double total =
          res.potentials[c.start - 1] + (penalty + cost);
      if (total < emin) {
        emin = total;
        best_idx = idx;
      }
    }
    res.potentials.push_back(emin);

    const int best_start = bank[best_idx].start;
    if (best_start - anchor_start > min_seg) {
      while (bank.front().start < best_start) bank.pop_front();
      anchor_start = best_start;
      res.changepoints.push_back({n, best_start});
    }
  }
  return res;
}

double sequential_capon_cost(const CMatrix& x, const SteeringVector& look,
                             double loading, int start, int end) {
  if (start < 1 || end > x.cols() || start > end)
    throw ContractViolation("interval out of range");
  MvdrFilterState f = make_mvdr_state(look, loading, start);
  for (int t = start; t <= end; ++t)
    adaptive_mvdr_step(f, x.col(t - 1), look);
  return f.cum_cost;
}

RVector sequential_capon_dp(const CMatrix& x, const SteeringVector& look,
                            double loading, double penalty) {
  if (x.cols() < 1 || x.rows() < 1)
    throw ContractViolation("empty snapshot matrix");
  if (penalty < 0.0) throw ContractViolation("penalty must be nonnegative");

  const int horizon = static_cast<int>(x.cols());
  RVector potential = RVector::Zero(horizon + 1);

  // One growing filter per start index; candidate i's accumulated cost at
  // step n is exactly the sequential interval cost over [i, n].
  std::vector<MvdrFilterState> states;
  states.reserve(horizon);

  for (int n = 1; n <= horizon; ++n) {
    states.push_back(make_mvdr_state(look, loading, n));
    const auto xn = x.col(n - 1);
    double best = kInf;
    for (MvdrFilterState& f : states) {
      adaptive_mvdr_step(f, xn, look);
      const double total = potential[f.start - 1] + (penalty + f.cum_cost);
      if (total < best) best = total;
    }
    potential[n] = best;
  }
  return potential;
}

}  // namespace segbeam
