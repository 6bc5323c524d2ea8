#include "segbeam/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace segbeam {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

bool block_structured(ScenarioKind k) {
  return k != ScenarioKind::BirthDeath;
}

}  // namespace

double quiescent_suppression_db(const ArrayGeometry& geom, double target_deg,
                                double phi_deg) {
  const SteeringVector vt = ula_steering(geom, target_deg);
  const SteeringVector vp = ula_steering(geom, phi_deg);
  const double resp = std::abs(vt.v.dot(vp.v)) / vt.v.squaredNorm();
  if (resp <= 0.0) return 400.0;
  return -20.0 * std::log10(resp);
}

void validate_scenario(const ScenarioConfig& cfg) {
  validate_geometry(cfg.geometry);
  if (cfg.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!std::isfinite(cfg.target_snr_db)) throw ConfigError("bad target SNR");
  if (!std::isfinite(cfg.target_angle_deg)) throw ConfigError("bad target bearing");

  const int pool = cfg.interferer_pool_deg.empty()
                       ? cfg.pool_size
                       : static_cast<int>(cfg.interferer_pool_deg.size());
  if (pool < 1) throw ConfigError("interferer pool is empty");
  if (cfg.interferer_pool_deg.empty() && !(cfg.band_lo_db < cfg.band_hi_db))
    throw ConfigError("suppression band is empty");

  switch (cfg.kind) {
    case ScenarioKind::AbruptBlocks:
      if (cfg.num_active < 1 || cfg.num_active > pool)
        throw ConfigError("active count must be in [1, pool size]");
      if (!(cfg.inr_lo_db <= cfg.inr_hi_db))
        throw ConfigError("INR range is inverted");
      break;
    case ScenarioKind::PiecewiseBearing:
      if (pool < 2)
        throw ConfigError("bearing jumps need a pool of at least 2");
      break;
    case ScenarioKind::PiecewiseTime:
      if (cfg.num_active < 1 || cfg.num_active > pool)
        throw ConfigError("active count must be in [1, pool size]");
      break;
    case ScenarioKind::BirthDeath:
      if (cfg.p_birth < 0.0 || cfg.p_birth > 1.0 || cfg.p_death < 0.0 ||
          cfg.p_death > 1.0)
        throw ConfigError("birth/death probabilities must be in [0, 1]");
      if (cfg.max_active < 1 || cfg.max_active > pool)
        throw ConfigError("max active must be in [1, pool size]");
      break;
  }

  if (block_structured(cfg.kind)) {
    if (cfg.switch_times.empty()) {
      if (cfg.block_len < 1) throw ConfigError("block length must be positive");
      if (cfg.block_jitter < 0 || cfg.block_jitter >= cfg.block_len)
        throw ConfigError("jitter must be in [0, block length)");
    } else {
      int prev = 1;
      for (int s : cfg.switch_times) {
        if (s <= prev || s > cfg.horizon)
          throw ConfigError("switch times must be ascending inside (1, horizon]");
        prev = s;
      }
    }
  }
}

const ScheduleBlock& ScenarioTruth::block_at(int t) const {
  if (t < 1 || t > horizon) throw ContractViolation("snapshot index out of range");
  // Blocks tile [1, horizon]; find the one containing t.
  auto it = std::upper_bound(
      blocks.begin(), blocks.end(), t,
      [](int value, const ScheduleBlock& b) { return value < b.start; });
  return *(it - 1);
}

std::vector<std::pair<double, double>> ScenarioTruth::active_at(int t) const {
  const ScheduleBlock& b = block_at(t);
  std::vector<std::pair<double, double>> out;
  out.reserve(b.active.size());
  for (std::size_t k = 0; k < b.active.size(); ++k)
    out.emplace_back(pool_deg[b.active[k]], b.powers[k]);
  return out;
}

const CMatrix& ScenarioTruth::interference_cov_at(int t) const {
  return block_at(t).interference_cov;
}

CMatrix ScenarioTruth::ensemble_cov_at(int t) const {
  CMatrix r = block_at(t).interference_cov;
  r.noalias() += target_power * (target.v * target.v.adjoint());
  return r;
}

namespace {

std::vector<double> draw_pool(const ScenarioConfig& cfg, RandomStream& rng) {
  if (!cfg.interferer_pool_deg.empty()) return cfg.interferer_pool_deg;
  std::vector<double> pool;
  pool.reserve(cfg.pool_size);
  int attempts = 0;
  while (static_cast<int>(pool.size()) < cfg.pool_size) {
    if (++attempts > 20000)
      throw ConfigError("could not sample a pool inside the suppression band");
    const double phi = rng.uniform(1.0, 179.0);
    const double supp =
        quiescent_suppression_db(cfg.geometry, cfg.target_angle_deg, phi);
    if (supp < cfg.band_lo_db || supp > cfg.band_hi_db) continue;
    pool.push_back(phi);
  }
  return pool;
}

// Distinct pool indices, ascending, drawn without replacement.
std::vector<int> draw_subset(int pool, int count, RandomStream& rng) {
  std::vector<int> avail(pool);
  for (int i = 0; i < pool; ++i) avail[i] = i;
  std::vector<int> picked;
  picked.reserve(count);
  for (int k = 0; k < count; ++k) {
    const std::size_t j = rng.index(avail.size());
    picked.push_back(avail[j]);
    avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(j));
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<int> block_starts(const ScenarioConfig& cfg, RandomStream& rng) {
  std::vector<int> starts{1};
  if (!cfg.switch_times.empty()) {
    starts.insert(starts.end(), cfg.switch_times.begin(),
                  cfg.switch_times.end());
    return starts;
  }
  int t = 1;
  while (true) {
    int len = cfg.block_len;
    if (cfg.block_jitter > 0)
      len = cfg.block_len - cfg.block_jitter +
            static_cast<int>(rng.index(2 * cfg.block_jitter + 1));
    t += len;
    if (t > cfg.horizon) break;
    starts.push_back(t);
  }
  return starts;
}

CMatrix interference_cov(const ScenarioTruth& truth,
                         const std::vector<int>& active,
                         const std::vector<double>& powers) {
  const int p = truth.geometry.num_elements;
  CMatrix r = CMatrix::Identity(p, p);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const CVector& a = truth.pool_steering[active[k]].v;
    r.noalias() += powers[k] * (a * a.adjoint());
  }
  return r;
}

void fill_blocks(const ScenarioConfig& cfg, ScenarioTruth& truth,
                 RandomStream& rng) {
  if (cfg.kind == ScenarioKind::BirthDeath) {
    // Per-snapshot Markov chain on the active set; deaths are resolved
    // before a possible birth, and at most one birth occurs per snapshot.
    const int pool = static_cast<int>(truth.pool_deg.size());
    std::vector<int> active;
    std::vector<double> powers;
    const double inr = db_to_linear(cfg.inr_db);

    int block_start = 1;
    std::vector<int> block_active;
    std::vector<double> block_powers;
    for (int t = 1; t <= cfg.horizon; ++t) {
      for (std::size_t k = active.size(); k-- > 0;) {
        if (rng.bernoulli(cfg.p_death)) {
          active.erase(active.begin() + static_cast<std::ptrdiff_t>(k));
          powers.erase(powers.begin() + static_cast<std::ptrdiff_t>(k));
        }
      }
      if (static_cast<int>(active.size()) < cfg.max_active &&
          rng.bernoulli(cfg.p_birth)) {
        std::vector<int> inactive;
        for (int i = 0; i < pool; ++i)
          if (std::find(active.begin(), active.end(), i) == active.end())
            inactive.push_back(i);
        if (!inactive.empty()) {
          const int born = inactive[rng.index(inactive.size())];
          const auto pos = std::lower_bound(active.begin(), active.end(), born);
          powers.insert(powers.begin() + (pos - active.begin()), inr);
          active.insert(pos, born);
        }
      }

      if (t == 1) {
        block_active = active;
        block_powers = powers;
      } else if (active != block_active) {
        truth.blocks.push_back({block_start, t - 1, block_active, block_powers,
                                interference_cov(truth, block_active,
                                                 block_powers)});
        truth.true_changepoints.push_back(t);
        block_start = t;
        block_active = active;
        block_powers = powers;
      }
    }
    truth.blocks.push_back({block_start, cfg.horizon, block_active,
                            block_powers,
                            interference_cov(truth, block_active,
                                             block_powers)});
    return;
  }

  const std::vector<int> starts = block_starts(cfg, rng);
  const int pool = static_cast<int>(truth.pool_deg.size());
  std::vector<int> prev_active;

  for (std::size_t b = 0; b < starts.size(); ++b) {
    const int start = starts[b];
    const int end =
        (b + 1 < starts.size()) ? starts[b + 1] - 1 : cfg.horizon;
    std::vector<int> active;
    std::vector<double> powers;

    switch (cfg.kind) {
      case ScenarioKind::AbruptBlocks: {
        active = draw_subset(pool, cfg.num_active, rng);
        powers.reserve(active.size());
        for (std::size_t k = 0; k < active.size(); ++k)
          powers.push_back(
              db_to_linear(rng.uniform(cfg.inr_lo_db, cfg.inr_hi_db)));
        break;
      }
      case ScenarioKind::PiecewiseBearing: {
        int pick;
        do {
          pick = static_cast<int>(rng.index(pool));
        } while (!prev_active.empty() && pick == prev_active[0]);
        active = {pick};
        powers = {db_to_linear(cfg.inr_db)};
        break;
      }
      case ScenarioKind::PiecewiseTime: {
        active = draw_subset(pool, cfg.num_active, rng);
        powers.assign(active.size(), db_to_linear(cfg.inr_db));
        break;
      }
      case ScenarioKind::BirthDeath:
        break;  // handled above
    }

    prev_active = active;
    if (b > 0) truth.true_changepoints.push_back(start);
    truth.blocks.push_back({start, end, active, powers,
                            interference_cov(truth, active, powers)});
  }
}

}  // namespace

ScenarioDraw generate(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate_scenario(cfg);
  RandomStream rng(seed);

  ScenarioDraw draw;
  ScenarioTruth& truth = draw.truth;
  truth.geometry = cfg.geometry;
  truth.horizon = cfg.horizon;
  truth.target = ula_steering(cfg.geometry, cfg.target_angle_deg);
  truth.target_power = db_to_linear(cfg.target_snr_db);

  truth.pool_deg = draw_pool(cfg, rng);
  truth.pool_steering.reserve(truth.pool_deg.size());
  for (double phi : truth.pool_deg)
    truth.pool_steering.push_back(ula_steering(cfg.geometry, phi));

  fill_blocks(cfg, truth, rng);

  const int p = cfg.geometry.num_elements;
  draw.snapshots.resize(p, cfg.horizon);
  draw.target_waveform.resize(cfg.horizon);

  // Fixed draw order per snapshot: target amplitude, active interferer
  // amplitudes in pool order, then the noise components.
  for (const ScheduleBlock& blk : truth.blocks) {
    for (int t = blk.start; t <= blk.end; ++t) {
      const Complex s = rng.complex_gaussian(truth.target_power);
      draw.target_waveform[t - 1] = s;
      CVector x = s * truth.target.v;
      for (std::size_t k = 0; k < blk.active.size(); ++k) {
        const Complex a = rng.complex_gaussian(blk.powers[k]);
        x.noalias() += a * truth.pool_steering[blk.active[k]].v;
      }
      for (int m = 0; m < p; ++m) x[m] += rng.complex_gaussian(1.0);
      draw.snapshots.col(t - 1) = x;
    }
  }
  return draw;
}

}  // namespace segbeam
