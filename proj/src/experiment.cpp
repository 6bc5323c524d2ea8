#include "segbeam/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace segbeam {

namespace {

using Json = nlohmann::ordered_json;

int resolve_stride(const ExperimentConfig& cfg) {
  if (cfg.sinr_stride > 0) return cfg.sinr_stride;
  return cfg.scenario.horizon <= 5000 ? 1 : 10;
}

double resolve_loading(const BeamformerSpec& spec, const CMatrix& x) {
  return spec.loading > 0.0 ? spec.loading : default_loading(x);
}

// penalty_rel scales by the same early-power estimate the loading rule uses.
double resolve_penalty(const BeamformerSpec& spec, const CMatrix& x) {
  if (!spec.penalty_rel) return spec.penalty;
  const double power = default_loading(x, 1.0, 1.0);
  return spec.penalty * static_cast<double>(x.rows()) * power;
}

std::vector<int> sample_times(int horizon, int stride) {
  std::vector<int> times;
  for (int t = stride; t <= horizon; t += stride) times.push_back(t);
  if (times.empty()) times.push_back(horizon);
  return times;
}

struct AlgRun {
  RunTrace trace;
  std::vector<ChangepointEvent> events;
};

AlgRun run_one(const BeamformerSpec& spec, const ScenarioDraw& draw,
               int stride) {
  const CMatrix& x = draw.snapshots;
  const SteeringVector& look = draw.truth.target;
  const int horizon = draw.truth.horizon;
  const double loading = resolve_loading(spec, x);
  const std::vector<int> times = sample_times(horizon, stride);

  AlgRun run;
  std::vector<CVector> weights;
  weights.reserve(times.size());

  if (spec.kind == "cbf" || spec.kind == "batch_capon") {
    const CVector w = spec.kind == "cbf"
                          ? conventional_weights(look)
                          : batch_capon_weights(x, look, loading);
    CVector z(horizon);
    for (int t = 1; t <= horizon; ++t) z[t - 1] = w.dot(x.col(t - 1));
    weights.assign(times.size(), w);
    run.trace = make_run_trace(spec.label, std::move(z));
  } else if (spec.kind == "adaptive_mvdr") {
    MvdrFilterState st = make_mvdr_state(look, loading);
    CVector z(horizon);
    std::size_t next = 0;
    for (int t = 1; t <= horizon; ++t) {
      z[t - 1] = adaptive_mvdr_step(st, x.col(t - 1), look);
      if (next < times.size() && times[next] == t) {
        weights.push_back(st.weights());
        ++next;
      }
    }
    run.trace = make_run_trace(spec.label, std::move(z));
  } else if (spec.kind == "gsc") {
    GscState st = make_gsc_state(look, loading);
    CVector z(horizon);
    std::size_t next = 0;
    for (int t = 1; t <= horizon; ++t) {
      z[t - 1] = gsc_step(st, x.col(t - 1));
      if (next < times.size() && times[next] == t) {
        weights.push_back(gsc_weights(st));
        ++next;
      }
    }
    run.trace = make_run_trace(spec.label, std::move(z));
  } else if (spec.kind == "sliding_mpdr") {
    SlidingMpdrResult res =
        sliding_mpdr_run(x, look, spec.window, loading, true);
    for (int t : times) weights.push_back(res.weights[t - 1]);
    run.trace = make_run_trace(spec.label, std::move(res.z));
  } else if (spec.kind == "omniscient") {
    OmniscientResult res = omniscient_capon_run(draw.truth, x, look, loading);
    for (int t : times) {
      const ScheduleBlock& blk = draw.truth.block_at(t);
      const std::size_t b = &blk - draw.truth.blocks.data();
      weights.push_back(res.block_weights[b]);
    }
    run.trace = make_run_trace(spec.label, std::move(res.z));
  } else if (spec.kind == "bsb") {
    BsbResult res = bsb(x, look, resolve_penalty(spec, x), loading);
    for (int t : times) {
      for (const Segment& s : res.partition.segments)
        if (t >= s.start && t <= s.end) {
          weights.push_back(s.weights);
          break;
        }
    }
    for (std::size_t k = 1; k < res.partition.segments.size(); ++k) {
      const int s = res.partition.segments[k].start;
      run.events.push_back({s, s});
    }
    run.trace = make_run_trace(spec.label, std::move(res.z));
  } else if (spec.kind == "osb") {
    OnlineSegmenterOptions opts;
    opts.penalty = resolve_penalty(spec, x);
    opts.loading = loading;
    opts.min_seg = spec.min_seg;
    opts.max_candidates = spec.max_candidates;
    OnlineSegmenter seg(look, opts);
    CVector z(horizon);
    std::size_t next = 0;
    for (int t = 1; t <= horizon; ++t) {
      auto step = seg.step(x.col(t - 1));
      z[t - 1] = step.z;
      if (next < times.size() && times[next] == t) {
        weights.push_back(seg.anchor().weights());
        ++next;
      }
    }
    run.events = seg.changepoints();
    run.trace = make_run_trace(spec.label, std::move(z));
  } else if (spec.kind == "osrls") {
    OsrlsResult res = osrls(x, draw.target_waveform, resolve_penalty(spec, x),
                            loading, spec.min_seg, spec.max_candidates);
    run.events = res.changepoints;
    run.trace = make_run_trace(spec.label, std::move(res.d_hat));
    // No distortionless weights to sample; the estimator is unconstrained.
  } else {
    throw ConfigError("unknown beamformer kind '" + spec.kind + "'");
  }

  run.trace.weight_times = weights.empty() ? std::vector<int>{} : times;
  run.trace.weights = std::move(weights);
  for (const ChangepointEvent& e : run.events)
    run.trace.changepoints.push_back(e.new_start);
  return run;
}

struct TrialOut {
  std::vector<double> final_mse;
  std::vector<double> mean_sinr_db;
  std::vector<double> final_cost;
  std::vector<std::vector<ChangepointEvent>> events;
  std::vector<int> true_changepoints;
  std::string trace_csv;
};

void append_trace_rows(std::string& csv, int trial, const RunTrace& trace,
                       const RVector& mse) {
  char buf[192];
  for (Eigen::Index t = 0; t < trace.z.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%d,%lld,%s,%.12g,%.12g,%.12g,%.12g\n",
                  trial, static_cast<long long>(t + 1), trace.label.c_str(),
                  trace.z[t].real(), trace.z[t].imag(),
                  trace.cumulative_cost[t], mse[t]);
    csv += buf;
  }
}

TrialOut run_trial(const ExperimentConfig& cfg, int trial) {
  const ScenarioDraw draw =
      generate(cfg.scenario, cfg.base_seed + static_cast<std::uint64_t>(trial));
  const int stride = resolve_stride(cfg);

  TrialOut out;
  out.true_changepoints = draw.truth.true_changepoints;
  for (const BeamformerSpec& spec : cfg.beamformers) {
    AlgRun run = run_one(spec, draw, stride);
    const RVector mse = mse_trace(run.trace.z, draw.target_waveform);
    out.final_mse.push_back(mse[mse.size() - 1]);
    if (!run.trace.weights.empty()) {
      const RVector sinr =
          sinr_trace(run.trace.weights, run.trace.weight_times, draw.truth);
      out.mean_sinr_db.push_back(sinr.mean());
    } else {
      out.mean_sinr_db.push_back(kSinrFloorDb);
    }
    out.final_cost.push_back(
        run.trace.cumulative_cost[run.trace.cumulative_cost.size() - 1]);
    out.events.push_back(run.events);
    if (cfg.outputs.write_traces)
      append_trace_rows(out.trace_csv, trial, run.trace, mse);
  }
  return out;
}

MetricStat stat_of(const std::vector<double>& v) {
  MetricStat s;
  if (v.empty()) return s;
  double acc = 0.0;
  for (double e : v) acc += e;
  s.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double e : v) ss += (e - s.mean) * (e - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << body;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_outputs(const ExperimentConfig& cfg, const ResultBundle& bundle,
                   const std::vector<TrialOut>& trials) {
  const std::filesystem::path dir(cfg.outputs.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");

  if (cfg.outputs.write_summary) {
    Json root;
    root["trials"] = bundle.trials;
    root["horizon"] = bundle.horizon;
    root["base_seed"] = cfg.base_seed;
    Json algs = Json::array();
    for (const AlgorithmSummary& s : bundle.summary) {
      Json e;
      e["label"] = s.label;
      e["kind"] = s.kind;
      e["final_cum_mse"] = {{"mean", s.final_cum_mse.mean},
                            {"std", s.final_cum_mse.stddev}};
      e["mean_sinr_db"] = {{"mean", s.mean_sinr_db.mean},
                           {"std", s.mean_sinr_db.stddev}};
      e["n_changepoints"] = {{"mean", s.n_changepoints_mean}};
      e["final_cum_cost"] = {{"mean", s.final_cum_cost_mean}};
      algs.push_back(std::move(e));
    }
    root["algorithms"] = std::move(algs);
    write_file(dir / "summary.json", root.dump(2) + "\n");
  }

  if (cfg.outputs.write_changepoints) {
    Json root;
    Json truth = Json::array();
    for (const auto& cps : bundle.true_changepoints) truth.push_back(cps);
    root["true_changepoints"] = std::move(truth);
    Json algs = Json::array();
    for (std::size_t a = 0; a < bundle.summary.size(); ++a) {
      Json e;
      e["label"] = bundle.summary[a].label;
      Json per_trial = Json::array();
      for (const auto& evs : bundle.changepoints[a]) {
        Json list = Json::array();
        for (const ChangepointEvent& ev : evs)
          list.push_back({{"time", ev.time}, {"start", ev.new_start}});
        per_trial.push_back(std::move(list));
      }
      e["per_trial"] = std::move(per_trial);
      algs.push_back(std::move(e));
    }
    root["algorithms"] = std::move(algs);
    write_file(dir / "changepoints.json", root.dump(2) + "\n");
  }

  if (cfg.outputs.write_traces) {
    std::string csv = "trial,t,algorithm,z_re,z_im,cum_cost,cum_mse\n";
    for (const TrialOut& t : trials) csv += t.trace_csv;
    write_file(dir / "traces.csv", csv);
  }
}

}  // namespace

RunTrace run_beamformer(const BeamformerSpec& spec, const ScenarioDraw& draw,
                        int sinr_stride) {
  return run_one(spec, draw, sinr_stride).trace;
}

int worker_count_from_env() {
  if (const char* env = std::getenv("SEGBEAM_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  validate_scenario(cfg.scenario);
  if (cfg.beamformers.empty()) throw ConfigError("empty beamformer roster");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");

  std::vector<TrialOut> trials(cfg.trials);
  std::vector<std::exception_ptr> errors(cfg.trials);

  const int workers = std::min(worker_count_from_env(), cfg.trials);
  // Static contiguous split; every trial owns its RNG stream and slot, so
  // the outcome is identical for any worker count.
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const int base = cfg.trials / workers;
      const int extra = cfg.trials % workers;
      const int lo = w * base + std::min(w, extra);
      const int hi = lo + base + (w < extra ? 1 : 0);
      for (int k = lo; k < hi; ++k) {
        try {
          trials[k] = run_trial(cfg, k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (int k = 0; k < cfg.trials; ++k)
    if (errors[k]) std::rethrow_exception(errors[k]);

  ResultBundle bundle;
  bundle.trials = cfg.trials;
  bundle.horizon = cfg.scenario.horizon;
  const std::size_t n_alg = cfg.beamformers.size();
  bundle.final_mse.assign(n_alg, {});
  bundle.mean_sinr_db.assign(n_alg, {});
  bundle.changepoints.assign(n_alg, {});
  for (const TrialOut& t : trials)
    bundle.true_changepoints.push_back(t.true_changepoints);

  for (std::size_t a = 0; a < n_alg; ++a) {
    std::vector<double> costs;
    double cps = 0.0;
    for (const TrialOut& t : trials) {
      bundle.final_mse[a].push_back(t.final_mse[a]);
      bundle.mean_sinr_db[a].push_back(t.mean_sinr_db[a]);
      bundle.changepoints[a].push_back(t.events[a]);
      costs.push_back(t.final_cost[a]);
      cps += static_cast<double>(t.events[a].size());
    }
    AlgorithmSummary s;
    s.label = cfg.beamformers[a].label;
    s.kind = cfg.beamformers[a].kind;
    s.final_cum_mse = stat_of(bundle.final_mse[a]);
    s.mean_sinr_db = stat_of(bundle.mean_sinr_db[a]);
    s.n_changepoints_mean = cps / static_cast<double>(cfg.trials);
    s.final_cum_cost_mean = stat_of(costs).mean;
    bundle.summary.push_back(std::move(s));
  }

  write_outputs(cfg, bundle, trials);
  return bundle;
}

bool run_oracle_checks(std::string& report) {
  bool all_ok = true;
  char line[160];

  {  // Exhaustive enumeration against both recursion engines.
    RandomStream rng(414243);
    double worst = 0.0;
    for (int inst = 0; inst < 30; ++inst) {
      const int horizon = 4 + static_cast<int>(rng.index(6));
      const int p = 2 + static_cast<int>(rng.index(2));
      CMatrix x(p, horizon);
      CVector d(horizon);
      for (int t = 0; t < horizon; ++t) {
        for (int m = 0; m < p; ++m) x(m, t) = rng.complex_gaussian(1.0);
        d[t] = rng.complex_gaussian(1.0);
      }
      ArrayGeometry geom{p, 0.5, 1500.0, 1500.0};
      const SteeringVector look = ula_steering(geom, 90.0);
      const double penalty = rng.uniform(0.1, 2.0);
      const double loading = 1e-2;

      const BsbResult b = bsb(x, look, penalty, loading);
      const OraclePartition ob = exhaustive_partition_search(
          [&](int i, int j) {
            return capon_interval_cost(x, look, loading, i, j);
          },
          horizon, penalty);
      worst = std::max(worst, std::abs(b.partition.total_cost - ob.total_cost) /
                                  std::max(1.0, std::abs(ob.total_cost)));

      const SlsResult s = sls_batch(x, d, penalty, loading);
      const OraclePartition os = exhaustive_partition_search(
          [&](int i, int j) { return ridge_interval_cost(x, d, loading, i, j); },
          horizon, penalty);
      worst = std::max(worst, std::abs(s.partition.total_cost - os.total_cost) /
                                  std::max(1.0, std::abs(os.total_cost)));
    }
    const bool ok = worst < 1e-10;
    all_ok = all_ok && ok;
    std::snprintf(line, sizeof(line),
                  "%s exhaustive-vs-recursion: worst relative gap %.3e "
                  "(bound 1e-10)\n",
                  ok ? "PASS" : "FAIL", worst);
    report += line;
  }

  {  // Recursive inverse against dense inversion.
    RandomStream rng(515253);
    double worst = 0.0;
    for (int stream = 0; stream < 20; ++stream) {
      const int p = 2 + static_cast<int>(rng.index(9));
      const int horizon = 20 + static_cast<int>(rng.index(181));
      const double loading = rng.uniform(1e-3, 1e-1);
      HermitianState st = make_hermitian_state(p, loading);
      CMatrix gram = CMatrix::Identity(p, p) * loading;
      CVector x(p);
      for (int t = 0; t < horizon; ++t) {
        for (int m = 0; m < p; ++m) x[m] = rng.complex_gaussian(1.0);
        rank1_update(st, x);
        gram.noalias() += x * x.adjoint();
      }
      const CMatrix direct =
          Eigen::LDLT<CMatrix>(gram).solve(CMatrix::Identity(p, p));
      worst = std::max(worst, (st.inv - direct).norm() / direct.norm());
    }
    const bool ok = worst < 1e-8;
    all_ok = all_ok && ok;
    std::snprintf(line, sizeof(line),
                  "%s recursive-inverse-vs-dense: worst relative error %.3e "
                  "(bound 1e-8)\n",
                  ok ? "PASS" : "FAIL", worst);
    report += line;
  }
  return all_ok;
}

void run_btr(const ExperimentConfig& cfg, int grid_points, int avg_block) {
  if (grid_points < 2) throw ConfigError("bearing grid needs >= 2 points");
  const ScenarioDraw draw = generate(cfg.scenario, cfg.base_seed);

  std::vector<double> grid(grid_points);
  for (int k = 0; k < grid_points; ++k)
    grid[k] = 180.0 * static_cast<double>(k) / (grid_points - 1);

  const BeamformerRunner scanner = [](const CMatrix& x,
                                      const SteeringVector& look) {
    const CVector w = conventional_weights(look);
    CVector z(x.cols());
    for (Eigen::Index t = 0; t < x.cols(); ++t) z[t] = w.dot(x.col(t));
    return z;
  };

  const BtrResult res =
      btr(draw.snapshots, cfg.scenario.geometry, grid, scanner, avg_block);

  std::string csv = "angle,t,power_db\n";
  char buf[96];
  for (Eigen::Index a = 0; a < res.power_db.rows(); ++a)
    for (Eigen::Index b = 0; b < res.power_db.cols(); ++b) {
      std::snprintf(buf, sizeof(buf), "%.12g,%lld,%.12g\n", res.angles_deg[a],
                    static_cast<long long>(b * avg_block + 1),
                    res.power_db(a, b));
      csv += buf;
    }

  const std::filesystem::path dir(cfg.outputs.dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  write_file(dir / "btr.csv", csv);
}

}  // namespace segbeam
