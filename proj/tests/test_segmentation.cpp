#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "doctest.h"
#include "segbeam/scenarios.hpp"
#include "segbeam/segmentation.hpp"

using namespace segbeam;

namespace {

const ArrayGeometry kGeom{3, 0.75, 1500.0, 1000.0};

CMatrix random_snapshots(RandomStream& rng, int p, int t, double var = 1.0) {
  CMatrix x(p, t);
  for (int j = 0; j < t; ++j)
    for (int m = 0; m < p; ++m) x(m, j) = rng.complex_gaussian(var);
  return x;
}

// Caches interval costs so the exhaustive oracle's repeated lookups stay
// cheap; values are identical to the uncached function's.
IntervalCost memoized(IntervalCost inner) {
  auto cache = std::make_shared<std::map<std::pair<int, int>, double>>();
  return [inner = std::move(inner), cache](int i, int j) {
    const auto key = std::make_pair(i, j);
    const auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    const double c = inner(i, j);
    (*cache)[key] = c;
    return c;
  };
}

// Two-regime beamforming record: a strong interferer whose bearing flips
// mid-record, plus weak target and unit noise. Segment engines should cut
// near the flip.
CMatrix two_regime(RandomStream& rng, const SteeringVector& look, int horizon,
                   int flip, double inr, double bearing_b = 124.0) {
  const SteeringVector a1 = ula_steering(kGeom, 55.0);
  const SteeringVector a2 = ula_steering(kGeom, bearing_b);
  CMatrix x(look.dim(), horizon);
  for (int t = 0; t < horizon; ++t) {
    const SteeringVector& a = t < flip ? a1 : a2;
    CVector col = a.v * rng.complex_gaussian(inr);
    col += look.v * rng.complex_gaussian(0.25);
    for (int m = 0; m < look.dim(); ++m) col[m] += rng.complex_gaussian(1.0);
    x.col(t) = col;
  }
  return x;
}

}  // namespace

TEST_SUITE("segmentation") {

TEST_CASE("recursion matches exhaustive search on arbitrary cost tables") {
  RandomStream rng(1001);
  for (int inst = 0; inst < 40; ++inst) {
    const int horizon = 2 + static_cast<int>(rng.index(9));
    std::map<std::pair<int, int>, double> table;
    for (int i = 1; i <= horizon; ++i)
      for (int j = i; j <= horizon; ++j)
        table[{i, j}] = rng.uniform(0.0, 10.0);
    const IntervalCost cost = [&table](int i, int j) {
      return table.at({i, j});
    };
    const double penalty = rng.uniform(0.0, 3.0);
    const DpTable dp = penalized_dp(cost, horizon, penalty);
    const OraclePartition oracle =
        exhaustive_partition_search(cost, horizon, penalty);
    CHECK(dp.potential[horizon] ==
          doctest::Approx(oracle.total_cost).epsilon(1e-12));
    CHECK(traceback(dp) == oracle.segments);
  }
}

TEST_CASE("zero costs collapse to a single segment on either engine") {
  const IntervalCost zero = [](int, int) { return 0.0; };
  const DpTable dp = penalized_dp(zero, 6, 1.0);
  const OraclePartition oracle = exhaustive_partition_search(zero, 6, 1.0);
  CHECK(dp.potential[6] == doctest::Approx(1.0));
  REQUIRE(traceback(dp).size() == 1);
  CHECK(traceback(dp) == oracle.segments);
}

TEST_CASE("beamforming recursion reproduces the exhaustive optimum") {
  RandomStream rng(1002);
  for (int inst = 0; inst < 25; ++inst) {
    const int horizon = 3 + static_cast<int>(rng.index(7));
    const CMatrix x = random_snapshots(rng, 3, horizon);
    const SteeringVector look = ula_steering(kGeom, 90.0);
    const double penalty = rng.uniform(0.05, 1.5);
    const double loading = rng.uniform(5e-3, 5e-2);

    const BsbResult res = bsb(x, look, penalty, loading);
    const OraclePartition oracle = exhaustive_partition_search(
        memoized([&](int i, int j) {
          return capon_interval_cost(x, look, loading, i, j);
        }),
        horizon, penalty);
    CHECK(std::abs(res.partition.total_cost - oracle.total_cost) <=
          1e-10 * std::max(1.0, std::abs(oracle.total_cost)));
    std::vector<std::pair<int, int>> got;
    for (const Segment& s : res.partition.segments)
      got.emplace_back(s.start, s.end);
    CHECK(got == oracle.segments);
  }
}

TEST_CASE("regression recursion reproduces the exhaustive optimum") {
  RandomStream rng(1003);
  for (int inst = 0; inst < 25; ++inst) {
    const int horizon = 3 + static_cast<int>(rng.index(7));
    const CMatrix x = random_snapshots(rng, 3, horizon);
    CVector d(horizon);
    for (int t = 0; t < horizon; ++t) d[t] = rng.complex_gaussian(1.0);
    const double penalty = rng.uniform(0.05, 1.5);
    const double loading = rng.uniform(5e-3, 5e-2);

    const SlsResult res = sls_batch(x, d, penalty, loading);
    const OraclePartition oracle = exhaustive_partition_search(
        memoized([&](int i, int j) {
          return ridge_interval_cost(x, d, loading, i, j);
        }),
        horizon, penalty);
    CHECK(std::abs(res.partition.total_cost - oracle.total_cost) <=
          1e-10 * std::max(1.0, std::abs(oracle.total_cost)));
  }
}

TEST_CASE("fused interval costs agree with fresh batch solves") {
  RandomStream rng(1004);
  const int horizon = 40;
  const CMatrix x = random_snapshots(rng, 3, horizon);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  const double loading = 2e-2;
  const double penalty = 0.4;
  const BsbResult res = bsb(x, look, penalty, loading);

  // Re-run the recursion from literal per-interval solves and compare the
  // whole potential table, not just the end point.
  const DpTable direct = penalized_dp(
      [&](int i, int j) { return capon_interval_cost(x, look, loading, i, j); },
      horizon, penalty);
  for (int j = 1; j <= horizon; ++j)
    CHECK(res.table.potential[j] ==
          doctest::Approx(direct.potential[j]).epsilon(1e-9));
  CHECK(traceback(res.table) == traceback(direct));
}

TEST_CASE("partition segments carry their own verifiable costs") {
  RandomStream rng(1005);
  const CMatrix x = two_regime(rng, ula_steering(kGeom, 90.0), 60, 30, 100.0);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  const BsbResult res = bsb(x, look, 0.5, 1e-2);
  double total = 0.0;
  for (const Segment& s : res.partition.segments) {
    const double direct = capon_interval_cost(x, look, 1e-2, s.start, s.end);
    CHECK(s.cost == doctest::Approx(direct).epsilon(1e-8));
    CHECK(std::abs(s.weights.dot(look.v) - Complex(1, 0)) < 1e-10);
    for (int t = s.start; t <= s.end; ++t)
      CHECK(std::abs(res.z[t - 1] - s.weights.dot(x.col(t - 1))) < 1e-12);
    total += 0.5 + s.cost;
  }
  CHECK(res.partition.total_cost == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("a large penalty forces one segment; a flip invites a cut") {
  RandomStream rng(1006);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  const CMatrix x = two_regime(rng, look, 120, 60, 100.0);

  const double record_power = x.squaredNorm();
  const BsbResult one = bsb(x, look, 1.1 * record_power, 1e-2);
  REQUIRE(one.partition.segments.size() == 1);
  CHECK(one.partition.segments[0].start == 1);
  CHECK(one.partition.segments[0].end == 120);

  const BsbResult cut = bsb(x, look, 2.0, 1e-2);
  REQUIRE(cut.partition.segments.size() >= 2);
  bool near_flip = false;
  for (const Segment& s : cut.partition.segments)
    if (std::abs(s.start - 61) <= 10) near_flip = true;
  CHECK(near_flip);
}

TEST_CASE("online bank with switching disabled is one growing filter") {
  RandomStream rng(1007);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  const int horizon = 80;
  const CMatrix x = two_regime(rng, look, horizon, 40, 50.0);

  OnlineSegmenterOptions opts;
  opts.penalty = 0.5;
  opts.loading = 1e-2;
  opts.min_seg = horizon;  // candidates can never lead by enough
  const OsbResult res = osb_run(x, look, opts);
  CHECK(res.changepoints.empty());
  CHECK(res.final_anchor == 1);

  MvdrFilterState f = make_mvdr_state(look, 1e-2);
  for (int t = 1; t <= horizon; ++t) {
    const Complex z = adaptive_mvdr_step(f, x.col(t - 1), look);
    CHECK(std::abs(res.z[t - 1] - z) < 1e-12);
  }
}

TEST_CASE("online potentials dominate the hindsight recursion") {
  RandomStream rng(1008);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  for (int inst = 0; inst < 5; ++inst) {
    const int horizon = 60 + static_cast<int>(rng.index(40));
    const CMatrix x =
        two_regime(rng, look, horizon, horizon / 2, rng.uniform(20.0, 120.0));
    OnlineSegmenterOptions opts;
    opts.penalty = rng.uniform(0.2, 2.0);
    opts.loading = 1e-2;
    opts.min_seg = 3;
    const OsbResult res = osb_run(x, look, opts);
    const RVector dp = sequential_capon_dp(x, look, 1e-2, opts.penalty);
    for (int t = 1; t <= horizon; ++t)
      CHECK(res.potentials[t] >= dp[t] - 1e-9 * std::max(1.0, dp[t]));
  }
}

TEST_CASE("hindsight recursion agrees with its brute-force form") {
  RandomStream rng(1009);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  for (int inst = 0; inst < 8; ++inst) {
    const int horizon = 4 + static_cast<int>(rng.index(9));
    const CMatrix x = random_snapshots(rng, 3, horizon);
    const double penalty = rng.uniform(0.1, 2.0);
    const RVector fused = sequential_capon_dp(x, look, 1e-2, penalty);
    const DpTable direct = penalized_dp(
        [&](int i, int j) {
          return sequential_capon_cost(x, look, 1e-2, i, j);
        },
        horizon, penalty);
    for (int j = 1; j <= horizon; ++j)
      CHECK(fused[j] == doctest::Approx(direct.potential[j]).epsilon(1e-12));
  }
}

TEST_CASE("anchor only moves forward and within the bank cap") {
  RandomStream rng(1010);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  const CMatrix x = two_regime(rng, look, 200, 100, 80.0);
  OnlineSegmenterOptions opts;
  opts.penalty = 1.0;
  opts.loading = 1e-2;
  opts.min_seg = 5;
  opts.max_candidates = 16;
  OnlineSegmenter seg(look, opts);
  int last_anchor = 1;
  for (int t = 1; t <= 200; ++t) {
    seg.step(x.col(t - 1));
    CHECK(seg.anchor_start() >= last_anchor);
    last_anchor = seg.anchor_start();
    CHECK(static_cast<int>(seg.candidates().size()) <= 16);
    CHECK(seg.candidates().front().filter.start == seg.anchor_start());
  }
  for (const ChangepointEvent& e : seg.changepoints()) {
    CHECK(e.new_start > 1);
    CHECK(e.time >= e.new_start);
  }
}

TEST_CASE("online detector cuts near a strong bearing flip") {
  RandomStream rng(1011);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  // The interferer lands 15 degrees off the look direction after the flip,
  // so the stale filter leaks hard and a fresh segment wins decisively.
  const CMatrix x = two_regime(rng, look, 600, 300, 100.0, 105.0);
  OnlineSegmenterOptions opts;
  // Penalty sits well above the fluctuation of windowed cost sums (a few
  // sigma at unit-scale outputs) and far below the flip's leakage gain.
  opts.penalty = 25.0;
  opts.loading = 1e-2;
  opts.min_seg = 5;
  const OsbResult res = osb_run(x, look, opts);
  REQUIRE(!res.changepoints.empty());
  int nearest = 1 << 30;
  for (const ChangepointEvent& e : res.changepoints)
    nearest = std::min(nearest, std::abs(e.new_start - 301));
  CHECK(nearest <= 50);
  CHECK(static_cast<int>(res.changepoints.size()) <= 3);
}

TEST_CASE("online detector holds one segment when the scene never changes") {
  RandomStream rng(1014);
  const SteeringVector look = ula_steering(kGeom, 90.0);
  // Flip index at the horizon keeps the first regime throughout.
  const CMatrix x = two_regime(rng, look, 600, 600, 100.0);
  OnlineSegmenterOptions opts;
  opts.penalty = 25.0;
  opts.loading = 1e-2;
  opts.min_seg = 5;
  const OsbResult res = osb_run(x, look, opts);
  CHECK(res.changepoints.empty());
}

TEST_CASE("streaming regression keeps one segment on stationary data") {
  RandomStream rng(1012);
  const int p = 4, horizon = 300;
  CVector w_true(p);
  for (int m = 0; m < p; ++m) w_true[m] = rng.complex_gaussian(1.0);
  const CMatrix x = random_snapshots(rng, p, horizon);
  CVector d(horizon);
  for (int t = 0; t < horizon; ++t)
    d[t] = w_true.dot(x.col(t)) + rng.complex_gaussian(1e-4);
  const OsrlsResult res = osrls(x, d, 1.0, 1e-3, 10, 128);
  CHECK(res.changepoints.empty());
}

TEST_CASE("streaming regression cuts when the model flips") {
  RandomStream rng(1013);
  const int p = 4, horizon = 400, flip = 200;
  CVector w1(p), w2(p);
  for (int m = 0; m < p; ++m) {
    w1[m] = rng.complex_gaussian(1.0);
    w2[m] = rng.complex_gaussian(1.0);
  }
  const CMatrix x = random_snapshots(rng, p, horizon);
  CVector d(horizon);
  for (int t = 0; t < horizon; ++t)
    d[t] = (t < flip ? w1 : w2).dot(x.col(t)) + rng.complex_gaussian(1e-4);
  const OsrlsResult res = osrls(x, d, 1.0, 1e-3, 10, 128);
  REQUIRE(!res.changepoints.empty());
  int nearest = 1 << 30;
  for (const ChangepointEvent& e : res.changepoints)
    nearest = std::min(nearest, std::abs(e.new_start - (flip + 1)));
  CHECK(nearest <= 25);
  CHECK(static_cast<int>(res.changepoints.size()) <= 3);
}

TEST_CASE("splitting an interval never increases the unloaded cost") {
  // With no loading the interval cost is 1 / (v^H G^-1 v); any split of a
  // well-conditioned interval can only shed cost.
  RandomStream rng(1014);
  const int p = 3;
  const SteeringVector look = ula_steering(kGeom, 90.0);
  const auto unloaded = [&](const CMatrix& seg) {
    CMatrix g = seg * seg.adjoint();
    const CVector q = hermitian_solve(g, look.v);
    return 1.0 / look.v.dot(q).real();
  };
  for (int trial = 0; trial < 20; ++trial) {
    const int la = p + static_cast<int>(rng.index(12));
    const int lb = p + static_cast<int>(rng.index(12));
    const CMatrix x = random_snapshots(rng, p, la + lb);
    const double whole = unloaded(x);
    const double left = unloaded(x.leftCols(la));
    const double right = unloaded(x.rightCols(lb));
    CHECK(whole >= left + right - 1e-9);
  }
}

TEST_CASE("input contracts hold across the module") {
  const SteeringVector look = ula_steering(kGeom, 90.0);
  RandomStream rng(1015);
  const CMatrix x = random_snapshots(rng, 3, 8);
  CHECK_THROWS_AS(penalized_dp([](int, int) { return 0.0; }, 0, 1.0),
                  ContractViolation);
  CHECK_THROWS_AS(penalized_dp([](int, int) { return 0.0; }, 4, -0.5),
                  ContractViolation);
  CHECK_THROWS_AS(
      exhaustive_partition_search([](int, int) { return 0.0; }, 21, 1.0),
      ContractViolation);
  CHECK_THROWS_AS(bsb(CMatrix(3, 0), look, 1.0, 1e-2), ContractViolation);
  CHECK_THROWS_AS(bsb(x, look, -1.0, 1e-2), ContractViolation);
  CHECK_THROWS_AS(bsb(x, look, 1.0, 0.0), ContractViolation);
  CHECK_THROWS_AS(capon_interval_cost(x, look, 1e-2, 0, 3), ContractViolation);
  CHECK_THROWS_AS(capon_interval_cost(x, look, 1e-2, 3, 9), ContractViolation);
  CHECK_THROWS_AS(osrls(x, CVector::Zero(5), 1.0, 1e-2, 0, 64),
                  ContractViolation);
  OnlineSegmenterOptions bad;
  bad.max_candidates = 0;
  CHECK_THROWS_AS(OnlineSegmenter(look, bad), ContractViolation);
}

}  // TEST_SUITE
