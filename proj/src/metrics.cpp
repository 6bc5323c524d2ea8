#include "segbeam/metrics.hpp"

#include <cmath>

namespace segbeam {

RunTrace make_run_trace(std::string label, CVector z) {
  RunTrace tr;
  tr.label = std::move(label);
  tr.cumulative_cost.resize(z.size());
  double acc = 0.0;
  for (Eigen::Index t = 0; t < z.size(); ++t) {
    acc += std::norm(z[t]);
    tr.cumulative_cost[t] = acc;
  }
  tr.z = std::move(z);
  return tr;
}

RVector mse_trace(const CVector& z, const CVector& target) {
  if (z.size() != target.size())
    throw ContractViolation("trace lengths do not match");
  RVector out(z.size());
  double acc = 0.0;
  for (Eigen::Index t = 0; t < z.size(); ++t) {
    acc += std::norm(z[t] - target[t]);
    out[t] = acc / static_cast<double>(t + 1);
  }
  return out;
}

double wng(const CVector& w, const SteeringVector& look) {
  if (w.size() != look.v.size())
    throw ContractViolation("weight dimension does not match steering");
  const double n2 = w.squaredNorm();
  if (!(n2 > 0.0)) throw ContractViolation("zero weight vector");
  return std::norm(w.dot(look.v)) / n2;
}

RVector beampattern(const CVector& w, const ArrayGeometry& geom,
                    const std::vector<double>& grid_deg) {
  if (grid_deg.empty()) throw ContractViolation("empty bearing grid");
  if (w.size() != geom.num_elements)
    throw ContractViolation("weight dimension does not match geometry");
  RVector out(static_cast<Eigen::Index>(grid_deg.size()));
  for (std::size_t a = 0; a < grid_deg.size(); ++a) {
    const SteeringVector v = ula_steering(geom, grid_deg[a]);
    const double resp = std::abs(w.dot(v.v));
    out[static_cast<Eigen::Index>(a)] =
        resp > 0.0 ? 20.0 * std::log10(resp) : kBtrFloorDb;
  }
  return out;
}

RVector sinr_trace(const std::vector<CVector>& weights,
                   const std::vector<int>& times, const ScenarioTruth& truth) {
  if (weights.size() != times.size())
    throw ContractViolation("weight and time lists differ in length");
  if (truth.blocks.empty() || truth.horizon < 1)
    throw ContractViolation("scenario truth carries no schedule");

  RVector out(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const CVector& w = weights[k];
    const double gain = std::norm(w.dot(truth.target.v));
    const double noise =
        (w.adjoint() * truth.interference_cov_at(times[k]) * w).value().real();
    const double sig = truth.target_power * gain;
    out[static_cast<Eigen::Index>(k)] =
        (sig > 0.0 && noise > 0.0) ? 10.0 * std::log10(sig / noise)
                                   : kSinrFloorDb;
  }
  return out;
}

BtrResult btr(const CMatrix& x, const ArrayGeometry& geom,
              const std::vector<double>& grid_deg,
              const BeamformerRunner& runner, int avg_block) {
  if (grid_deg.empty()) throw ContractViolation("empty bearing grid");
  if (avg_block < 1) throw ContractViolation("averaging block must be >= 1");

  const int horizon = static_cast<int>(x.cols());
  const int blocks = (horizon + avg_block - 1) / avg_block;

  BtrResult res;
  res.angles_deg = grid_deg;
  res.avg_block = avg_block;
  res.power_db.resize(static_cast<Eigen::Index>(grid_deg.size()), blocks);

  for (std::size_t a = 0; a < grid_deg.size(); ++a) {
    const SteeringVector look = ula_steering(geom, grid_deg[a]);
    const CVector z = horizon > 0 ? runner(x, look) : CVector();
    for (int b = 0; b < blocks; ++b) {
      const int lo = b * avg_block;
      const int hi = std::min(horizon, lo + avg_block);
      double acc = 0.0;
      for (int t = lo; t < hi; ++t) acc += std::norm(z[t]);
      const double mean = acc / static_cast<double>(hi - lo);
      res.power_db(static_cast<Eigen::Index>(a), b) =
          mean > 0.0 ? 10.0 * std::log10(mean) : kBtrFloorDb;
    }
  }
  return res;
}

}  // namespace segbeam
