#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "segbeam/experiment.hpp"

namespace segbeam {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const Json& member(const Json& obj, const std::string& path,
                   const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required key");
  return *it;
}

void require_object(const Json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

// Unknown keys are rejected outright; a typo must not silently change an
// experiment.
void restrict_keys(const Json& obj, const std::string& path,
                   const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(path + "/" + it.key(), "unknown key");
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool as_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

double opt_number(const Json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, path + "/" + key);
}

int opt_int(const Json& obj, const std::string& path, const std::string& key,
            int fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_int(*it, path + "/" + key);
}

ScenarioKind parse_kind(const std::string& text, const std::string& path) {
  if (text == "abrupt_blocks") return ScenarioKind::AbruptBlocks;
  if (text == "piecewise_bearing") return ScenarioKind::PiecewiseBearing;
  if (text == "piecewise_time") return ScenarioKind::PiecewiseTime;
  if (text == "birth_death") return ScenarioKind::BirthDeath;
  fail(path, "unknown scenario kind '" + text + "'");
}

std::string kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::AbruptBlocks: return "abrupt_blocks";
    case ScenarioKind::PiecewiseBearing: return "piecewise_bearing";
    case ScenarioKind::PiecewiseTime: return "piecewise_time";
    case ScenarioKind::BirthDeath: return "birth_death";
  }
  return "";
}

ArrayGeometry parse_geometry(const Json& v, const std::string& path) {
  require_object(v, path);
  restrict_keys(v, path,
                {"num_elements", "spacing_m", "wave_speed_mps", "frequency_hz"});
  ArrayGeometry g;
  g.num_elements = as_int(member(v, path, "num_elements"), path + "/num_elements");
  g.spacing = as_number(member(v, path, "spacing_m"), path + "/spacing_m");
  g.wave_speed =
      as_number(member(v, path, "wave_speed_mps"), path + "/wave_speed_mps");
  g.frequency =
      as_number(member(v, path, "frequency_hz"), path + "/frequency_hz");
  return g;
}

ScenarioConfig parse_scenario(const Json& v, const std::string& path) {
  require_object(v, path);
  ScenarioConfig cfg;
  cfg.kind = parse_kind(as_string(member(v, path, "kind"), path + "/kind"),
                        path + "/kind");

  // Keys that apply to every kind, then the kind-specific vocabulary.
  // Anything else, including a key valid only for another kind, is rejected.
  std::set<std::string> allowed = {"kind",
                                   "horizon",
                                   "geometry",
                                   "target_angle_deg",
                                   "target_snr_db",
                                   "interferer_pool_deg",
                                   "pool_size",
                                   "suppression_band_db"};
  switch (cfg.kind) {
    case ScenarioKind::AbruptBlocks:
      allowed.insert({"block_len", "block_jitter", "num_active",
                      "inr_range_db", "switch_times"});
      break;
    case ScenarioKind::PiecewiseBearing:
      allowed.insert({"block_len", "block_jitter", "inr_db", "switch_times"});
      break;
    case ScenarioKind::PiecewiseTime:
      allowed.insert(
          {"block_len", "block_jitter", "num_active", "inr_db", "switch_times"});
      break;
    case ScenarioKind::BirthDeath:
      allowed.insert({"p_birth", "p_death", "max_active", "inr_db"});
      break;
  }
  restrict_keys(v, path, allowed);

  cfg.horizon = as_int(member(v, path, "horizon"), path + "/horizon");
  cfg.geometry = parse_geometry(member(v, path, "geometry"), path + "/geometry");
  cfg.target_angle_deg =
      opt_number(v, path, "target_angle_deg", cfg.target_angle_deg);
  cfg.target_snr_db =
      as_number(member(v, path, "target_snr_db"), path + "/target_snr_db");

  if (auto it = v.find("interferer_pool_deg"); it != v.end()) {
    if (!it->is_array()) fail(path + "/interferer_pool_deg", "expected an array");
    for (const auto& e : *it)
      cfg.interferer_pool_deg.push_back(
          as_number(e, path + "/interferer_pool_deg"));
  }
  cfg.pool_size = opt_int(v, path, "pool_size", cfg.pool_size);
  if (auto it = v.find("suppression_band_db"); it != v.end()) {
    if (!it->is_array() || it->size() != 2)
      fail(path + "/suppression_band_db", "expected [lo, hi]");
    cfg.band_lo_db = as_number((*it)[0], path + "/suppression_band_db");
    cfg.band_hi_db = as_number((*it)[1], path + "/suppression_band_db");
  }

  cfg.block_len = opt_int(v, path, "block_len", cfg.block_len);
  cfg.block_jitter = opt_int(v, path, "block_jitter", cfg.block_jitter);
  cfg.num_active = opt_int(v, path, "num_active", cfg.num_active);
  cfg.inr_db = opt_number(v, path, "inr_db", cfg.inr_db);
  if (auto it = v.find("inr_range_db"); it != v.end()) {
    if (!it->is_array() || it->size() != 2)
      fail(path + "/inr_range_db", "expected [lo, hi]");
    cfg.inr_lo_db = as_number((*it)[0], path + "/inr_range_db");
    cfg.inr_hi_db = as_number((*it)[1], path + "/inr_range_db");
  }
  if (auto it = v.find("switch_times"); it != v.end()) {
    if (!it->is_array()) fail(path + "/switch_times", "expected an array");
    for (const auto& e : *it)
      cfg.switch_times.push_back(as_int(e, path + "/switch_times"));
  }
  cfg.p_birth = opt_number(v, path, "p_birth", cfg.p_birth);
  cfg.p_death = opt_number(v, path, "p_death", cfg.p_death);
  cfg.max_active = opt_int(v, path, "max_active", cfg.max_active);

  try {
    validate_scenario(cfg);
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  return cfg;
}

const std::set<std::string> kBeamformerKinds = {
    "cbf",        "batch_capon", "adaptive_mvdr", "gsc", "sliding_mpdr",
    "omniscient", "bsb",         "osb",           "osrls"};

BeamformerSpec parse_beamformer(const Json& v, const std::string& path) {
  require_object(v, path);
  BeamformerSpec spec;
  spec.kind = as_string(member(v, path, "kind"), path + "/kind");
  if (!kBeamformerKinds.count(spec.kind))
    fail(path + "/kind", "unknown beamformer kind '" + spec.kind + "'");

  std::set<std::string> allowed = {"kind", "label"};
  const bool segmented =
      spec.kind == "bsb" || spec.kind == "osb" || spec.kind == "osrls";
  if (spec.kind != "cbf") allowed.insert("loading");
  if (spec.kind == "sliding_mpdr") allowed.insert("window");
  if (segmented) allowed.insert({"penalty", "penalty_rel"});
  if (spec.kind == "osb" || spec.kind == "osrls")
    allowed.insert({"min_seg", "max_candidates"});
  restrict_keys(v, path, allowed);

  if (auto it = v.find("label"); it != v.end())
    spec.label = as_string(*it, path + "/label");

  if (auto it = v.find("loading"); it != v.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "auto")
        fail(path + "/loading", "expected a number or \"auto\"");
      spec.loading = -1.0;
    } else {
      spec.loading = as_number(*it, path + "/loading");
      if (!(spec.loading > 0.0)) fail(path + "/loading", "must be positive");
    }
  }

  if (segmented) {
    const bool has_abs = v.contains("penalty");
    const bool has_rel = v.contains("penalty_rel");
    if (has_abs == has_rel)
      fail(path, "segmented kinds need exactly one of penalty/penalty_rel");
    spec.penalty_rel = has_rel;
    spec.penalty = as_number(member(v, path, has_rel ? "penalty_rel" : "penalty"),
                             path + (has_rel ? "/penalty_rel" : "/penalty"));
    if (spec.penalty < 0.0)
      fail(path + (has_rel ? "/penalty_rel" : "/penalty"),
           "must be nonnegative");
  }

  spec.min_seg = opt_int(v, path, "min_seg", spec.min_seg);
  if (spec.min_seg < 0) fail(path + "/min_seg", "must be nonnegative");
  spec.max_candidates = opt_int(v, path, "max_candidates", spec.max_candidates);
  if (spec.max_candidates < 1) fail(path + "/max_candidates", "must be >= 1");

  if (spec.kind == "sliding_mpdr") {
    spec.window = as_int(member(v, path, "window"), path + "/window");
    if (spec.window < 1) fail(path + "/window", "must be >= 1");
  }

  if (spec.label.empty())
    spec.label = spec.kind == "sliding_mpdr"
                     ? spec.kind + "_" + std::to_string(spec.window)
                     : spec.kind;
  return spec;
}

OutputOptions parse_outputs(const Json& v, const std::string& path) {
  require_object(v, path);
  restrict_keys(
      v, path, {"dir", "write_traces", "write_summary", "write_changepoints"});
  OutputOptions out;
  if (auto it = v.find("dir"); it != v.end())
    out.dir = as_string(*it, path + "/dir");
  if (auto it = v.find("write_traces"); it != v.end())
    out.write_traces = as_bool(*it, path + "/write_traces");
  if (auto it = v.find("write_summary"); it != v.end())
    out.write_summary = as_bool(*it, path + "/write_summary");
  if (auto it = v.find("write_changepoints"); it != v.end())
    out.write_changepoints = as_bool(*it, path + "/write_changepoints");
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  require_object(root, "");
  restrict_keys(root, "",
                {"scenario", "beamformers", "trials", "base_seed",
                 "sinr_stride", "outputs"});

  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(member(root, "", "scenario"), "/scenario");

  const Json& roster = member(root, "", "beamformers");
  if (!roster.is_array() || roster.empty())
    fail("/beamformers", "expected a nonempty array");
  std::set<std::string> labels;
  for (std::size_t k = 0; k < roster.size(); ++k) {
    BeamformerSpec spec = parse_beamformer(
        roster[k], "/beamformers/" + std::to_string(k));
    if (!labels.insert(spec.label).second)
      fail("/beamformers/" + std::to_string(k),
           "duplicate label '" + spec.label + "'");
    cfg.beamformers.push_back(std::move(spec));
  }

  cfg.trials = opt_int(root, "", "trials", cfg.trials);
  if (cfg.trials < 1) fail("/trials", "must be >= 1");
  if (auto it = root.find("base_seed"); it != root.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      fail("/base_seed", "expected an integer");
    cfg.base_seed = it->get<std::uint64_t>();
  }
  cfg.sinr_stride = opt_int(root, "", "sinr_stride", cfg.sinr_stride);
  if (cfg.sinr_stride < 0) fail("/sinr_stride", "must be >= 0");
  if (auto it = root.find("outputs"); it != root.end())
    cfg.outputs = parse_outputs(*it, "/outputs");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  Json root;
  Json sc;
  const ScenarioConfig& s = cfg.scenario;
  sc["kind"] = kind_name(s.kind);
  sc["horizon"] = s.horizon;
  sc["geometry"] = {{"num_elements", s.geometry.num_elements},
                    {"spacing_m", s.geometry.spacing},
                    {"wave_speed_mps", s.geometry.wave_speed},
                    {"frequency_hz", s.geometry.frequency}};
  sc["target_angle_deg"] = s.target_angle_deg;
  sc["target_snr_db"] = s.target_snr_db;
  if (!s.interferer_pool_deg.empty())
    sc["interferer_pool_deg"] = s.interferer_pool_deg;
  else
    sc["pool_size"] = s.pool_size;
  sc["suppression_band_db"] = {s.band_lo_db, s.band_hi_db};

  const bool blocky = s.kind != ScenarioKind::BirthDeath;
  if (blocky) {
    if (s.switch_times.empty()) {
      sc["block_len"] = s.block_len;
      sc["block_jitter"] = s.block_jitter;
    } else {
      sc["switch_times"] = s.switch_times;
    }
  }
  if (s.kind == ScenarioKind::AbruptBlocks) {
    sc["num_active"] = s.num_active;
    sc["inr_range_db"] = {s.inr_lo_db, s.inr_hi_db};
  } else if (s.kind == ScenarioKind::PiecewiseTime) {
    sc["num_active"] = s.num_active;
    sc["inr_db"] = s.inr_db;
  } else if (s.kind == ScenarioKind::PiecewiseBearing) {
    sc["inr_db"] = s.inr_db;
  } else {
    sc["inr_db"] = s.inr_db;
    sc["p_birth"] = s.p_birth;
    sc["p_death"] = s.p_death;
    sc["max_active"] = s.max_active;
  }
  root["scenario"] = std::move(sc);

  Json roster = Json::array();
  for (const BeamformerSpec& b : cfg.beamformers) {
    Json e;
    e["kind"] = b.kind;
    e["label"] = b.label;
    if (b.kind != "cbf") {
      if (b.loading < 0.0)
        e["loading"] = "auto";
      else
        e["loading"] = b.loading;
    }
    if (b.kind == "sliding_mpdr") e["window"] = b.window;
    if (b.kind == "bsb" || b.kind == "osb" || b.kind == "osrls")
      e[b.penalty_rel ? "penalty_rel" : "penalty"] = b.penalty;
    if (b.kind == "osb" || b.kind == "osrls") {
      e["min_seg"] = b.min_seg;
      e["max_candidates"] = b.max_candidates;
    }
    roster.push_back(std::move(e));
  }
  root["beamformers"] = std::move(roster);
  root["trials"] = cfg.trials;
  root["base_seed"] = cfg.base_seed;
  if (cfg.sinr_stride > 0) root["sinr_stride"] = cfg.sinr_stride;
  root["outputs"] = {{"dir", cfg.outputs.dir},
                     {"write_traces", cfg.outputs.write_traces},
                     {"write_summary", cfg.outputs.write_summary},
                     {"write_changepoints", cfg.outputs.write_changepoints}};
  return root.dump(2) + "\n";
}

}  // namespace segbeam
