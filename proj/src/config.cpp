#include "clband/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace clband {

using nlohmann::json;

namespace {

// Reads `key` into `out` when present, with a schema error on type mismatch.
template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("schema violation at " + where + "." + key + ": " + e.what());
  }
}

void require_object(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("schema violation: " + where + " must be an object");
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown configuration key " + where + "." + key);
  }
}

json grid_json(const GridSettings& g) {
  return {{"c_channels", g.c_channels},         {"l_channels", g.l_channels},
          {"c_start_thz", g.c_start_thz},       {"slot_width_ghz", g.slot_width_ghz},
          {"slots_per_channel", g.slots_per_channel}, {"guard_band_ghz", g.guard_band_ghz},
          {"symbol_rate_gbaud", g.symbol_rate_gbaud}};
}

GridSettings grid_from(const json& j, GridSettings g) {
  const std::string w = "physics.grid";
  require_object(j, w);
  reject_unknown(j, {"name", "c_channels", "l_channels", "c_start_thz", "slot_width_ghz",
                     "slots_per_channel", "guard_band_ghz", "symbol_rate_gbaud"},
                 w);
  if (j.contains("name")) g = named_grid(j.at("name").get<std::string>());
  read(j, "c_channels", g.c_channels, w);
  read(j, "l_channels", g.l_channels, w);
  read(j, "c_start_thz", g.c_start_thz, w);
  read(j, "slot_width_ghz", g.slot_width_ghz, w);
  read(j, "slots_per_channel", g.slots_per_channel, w);
  read(j, "guard_band_ghz", g.guard_band_ghz, w);
  read(j, "symbol_rate_gbaud", g.symbol_rate_gbaud, w);
  return g;
}

json fiber_json(const FiberParams& f) {
  return {{"attenuation_db_per_km", f.attenuation_db_per_km},
          {"attenuation_l_db_per_km", f.attenuation_l_db_per_km},
          {"beta2_ps2_per_km", f.beta2_ps2_per_km},
          {"beta3_ps3_per_km", f.beta3_ps3_per_km},
          {"gamma_per_w_per_km", f.gamma_per_w_per_km},
          {"raman_slope_per_w_per_km_per_thz", f.raman_slope_per_w_per_km_per_thz},
          {"span_length_km", f.span_length_km}};
}

FiberParams fiber_from(const json& j, FiberParams f) {
  const std::string w = "physics.fiber";
  require_object(j, w);
  reject_unknown(j, {"attenuation_db_per_km", "attenuation_l_db_per_km", "beta2_ps2_per_km",
                     "beta3_ps3_per_km", "gamma_per_w_per_km", "raman_slope_per_w_per_km_per_thz",
                     "span_length_km"},
                 w);
  const bool l_given = j.contains("attenuation_l_db_per_km");
  read(j, "attenuation_db_per_km", f.attenuation_db_per_km, w);
  if (!l_given) f.attenuation_l_db_per_km = f.attenuation_db_per_km;
  read(j, "attenuation_l_db_per_km", f.attenuation_l_db_per_km, w);
  read(j, "beta2_ps2_per_km", f.beta2_ps2_per_km, w);
  read(j, "beta3_ps3_per_km", f.beta3_ps3_per_km, w);
  read(j, "gamma_per_w_per_km", f.gamma_per_w_per_km, w);
  read(j, "raman_slope_per_w_per_km_per_thz", f.raman_slope_per_w_per_km_per_thz, w);
  read(j, "span_length_km", f.span_length_km, w);
  return f;
}

json nli_json(const NliOptions& n) {
  return {{"rel_tol", n.rel_tol},
          {"tail_fraction", n.tail_fraction},
          {"max_tail_fraction", n.max_tail_fraction},
          {"z_segments", n.z_segments},
          {"far_phase_rad", n.far_phase_rad},
          {"max_outer_intervals", n.max_outer_intervals},
          {"max_inner_depth", n.max_inner_depth},
          {"noise_bandwidth_ghz", n.noise_bandwidth_hz * 1e-9},
          {"xci_kurtosis_weight", n.xci_kurtosis_weight}};
}

NliOptions nli_from(const json& j, NliOptions n) {
  const std::string w = "physics.nli";
  require_object(j, w);
  reject_unknown(j, {"rel_tol", "tail_fraction", "max_tail_fraction", "z_segments", "far_phase_rad",
                     "max_outer_intervals", "max_inner_depth", "noise_bandwidth_ghz",
                     "xci_kurtosis_weight"},
                 w);
  read(j, "rel_tol", n.rel_tol, w);
  read(j, "tail_fraction", n.tail_fraction, w);
  read(j, "max_tail_fraction", n.max_tail_fraction, w);
  read(j, "z_segments", n.z_segments, w);
  read(j, "far_phase_rad", n.far_phase_rad, w);
  read(j, "max_outer_intervals", n.max_outer_intervals, w);
  read(j, "max_inner_depth", n.max_inner_depth, w);
  double bw_ghz = n.noise_bandwidth_hz * 1e-9;
  read(j, "noise_bandwidth_ghz", bw_ghz, w);
  n.noise_bandwidth_hz = bw_ghz * 1e9;
  read(j, "xci_kurtosis_weight", n.xci_kurtosis_weight, w);
  return n;
}

json formats_json(const std::vector<ModulationFormat>& formats) {
  json arr = json::array();
  for (const auto& f : formats) {
    arr.push_back({{"m", f.m},
                   {"name", f.name},
                   {"subchannel_bitrate_gbps", f.subchannel_bitrate_gbps},
                   {"snr_threshold_db", f.snr_threshold_db},
                   {"excess_kurtosis", f.excess_kurtosis}});
  }
  return arr;
}

std::vector<ModulationFormat> formats_from(const json& j, std::vector<ModulationFormat> formats) {
  const std::string w = "physics.formats";
  if (!j.is_array()) throw ConfigError("schema violation: " + w + " must be an array");
  // Entries override by m; only excess kurtosis is tunable, thresholds are fixed constants.
  for (const auto& entry : j) {
    require_object(entry, w + "[]");
    reject_unknown(entry,
                   {"m", "name", "subchannel_bitrate_gbps", "snr_threshold_db", "excess_kurtosis"},
                   w + "[]");
    int m = 0;
    read(entry, "m", m, w);
    if (m < 1 || m > kFormatCount) throw ConfigError("schema violation: format m out of range");
    ModulationFormat& f = formats[static_cast<std::size_t>(m - 1)];
    ModulationFormat given = f;
    read(entry, "name", given.name, w);
    read(entry, "subchannel_bitrate_gbps", given.subchannel_bitrate_gbps, w);
    read(entry, "snr_threshold_db", given.snr_threshold_db, w);
    if (given.name != f.name || given.subchannel_bitrate_gbps != f.subchannel_bitrate_gbps ||
        given.snr_threshold_db != f.snr_threshold_db) {
      throw ConfigError("schema violation: format m=" + std::to_string(m) +
                        " may only change excess_kurtosis");
    }
    read(entry, "excess_kurtosis", f.excess_kurtosis, w);
  }
  return formats;
}

}  // namespace

GridSettings named_grid(const std::string& name) {
  GridSettings g;
  if (name == "cl-64x64" || name == "default") return g;
  if (name == "cl-16x16") {
    g.c_channels = 16;
    g.l_channels = 16;
    return g;
  }
  if (name == "c-only-64") {
    g.l_channels = 0;
    return g;
  }
  throw ConfigError("unknown grid plan '" + name + "' (known: cl-64x64, cl-16x16, c-only-64)");
}

json physics_to_json(const PhysicsSettings& p) {
  return {{"grid", grid_json(p.grid)},
          {"fiber", fiber_json(p.fiber)},
          {"amplifier",
           {{"noise_figure_c_db", p.amplifier.noise_figure_c_db},
            {"noise_figure_l_db", p.amplifier.noise_figure_l_db}}},
          {"transceiver", {{"snr_trx_db", p.transceiver.snr_trx_db}}},
          {"nli", nli_json(p.nli)},
          {"formats", formats_json(p.formats)},
          {"eta_power_grid_dbm", p.eta_power_grid_dbm}};
}

void to_json(json& j, const RunConfig& c) {
  const auto& o = c.optimizer;
  const auto& s = c.simulation;
  j = {{"physics", physics_to_json(c.physics)},
       {"optimizer",
        {{"particles", o.particles},
         {"iterations", o.iterations},
         {"inertia", o.inertia},
         {"cognitive", o.cognitive},
         {"social", o.social},
         {"velocity_clamp_fraction", o.velocity_clamp_fraction},
         {"penalty_per_db", o.penalty_per_db},
         {"search_min_dbm", o.search_min_dbm},
         {"search_max_dbm", o.search_max_dbm},
         {"golden_tolerance_db", o.golden_tolerance_db},
         {"aging_margin_db", o.aging_margin_db},
         {"max_reach_spans", o.max_reach_spans}}},
       {"simulation",
        {{"topology", s.topology},
         {"otl_grid", s.otl_grid},
         {"demands", s.demands},
         {"replications", s.replications},
         {"k_paths", s.k_paths},
         {"node_disjoint", s.node_disjoint},
         {"warmup_fraction", s.warmup_fraction},
         {"mean_holding_time", s.mean_holding_time}}},
       {"seed", c.seed}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  require_object(j, "config");
  reject_unknown(j, {"physics", "optimizer", "simulation", "seed", "jobs", "cache_enabled",
                     "cache_dir"},
                 "config");
  if (const auto it = j.find("physics"); it != j.end()) {
    const json& p = *it;
    require_object(p, "physics");
    reject_unknown(p, {"grid", "fiber", "amplifier", "transceiver", "nli", "formats",
                       "eta_power_grid_dbm"},
                   "physics");
    if (p.contains("grid")) c.physics.grid = grid_from(p.at("grid"), c.physics.grid);
    if (p.contains("fiber")) c.physics.fiber = fiber_from(p.at("fiber"), c.physics.fiber);
    if (p.contains("amplifier")) {
      const json& a = p.at("amplifier");
      require_object(a, "physics.amplifier");
      reject_unknown(a, {"noise_figure_c_db", "noise_figure_l_db"}, "physics.amplifier");
      read(a, "noise_figure_c_db", c.physics.amplifier.noise_figure_c_db, "physics.amplifier");
      read(a, "noise_figure_l_db", c.physics.amplifier.noise_figure_l_db, "physics.amplifier");
    }
    if (p.contains("transceiver")) {
      const json& t = p.at("transceiver");
      require_object(t, "physics.transceiver");
      reject_unknown(t, {"snr_trx_db"}, "physics.transceiver");
      read(t, "snr_trx_db", c.physics.transceiver.snr_trx_db, "physics.transceiver");
    }
    if (p.contains("nli")) c.physics.nli = nli_from(p.at("nli"), c.physics.nli);
    if (p.contains("formats")) c.physics.formats = formats_from(p.at("formats"), c.physics.formats);
    read(p, "eta_power_grid_dbm", c.physics.eta_power_grid_dbm, "physics");
  }
  if (const auto it = j.find("optimizer"); it != j.end()) {
    const json& o = *it;
    const std::string w = "optimizer";
    require_object(o, w);
    reject_unknown(o, {"particles", "iterations", "inertia", "cognitive", "social",
                       "velocity_clamp_fraction", "penalty_per_db", "search_min_dbm",
                       "search_max_dbm", "golden_tolerance_db", "aging_margin_db",
                       "max_reach_spans"},
                   w);
    auto& s = c.optimizer;
    read(o, "particles", s.particles, w);
    read(o, "iterations", s.iterations, w);
    read(o, "inertia", s.inertia, w);
    read(o, "cognitive", s.cognitive, w);
    read(o, "social", s.social, w);
    read(o, "velocity_clamp_fraction", s.velocity_clamp_fraction, w);
    read(o, "penalty_per_db", s.penalty_per_db, w);
    read(o, "search_min_dbm", s.search_min_dbm, w);
    read(o, "search_max_dbm", s.search_max_dbm, w);
    read(o, "golden_tolerance_db", s.golden_tolerance_db, w);
    read(o, "aging_margin_db", s.aging_margin_db, w);
    read(o, "max_reach_spans", s.max_reach_spans, w);
  }
  if (const auto it = j.find("simulation"); it != j.end()) {
    const json& o = *it;
    const std::string w = "simulation";
    require_object(o, w);
    reject_unknown(o, {"topology", "otl_grid", "demands", "replications", "k_paths",
                       "node_disjoint", "warmup_fraction", "mean_holding_time"},
                   w);
    auto& s = c.simulation;
    read(o, "topology", s.topology, w);
    read(o, "otl_grid", s.otl_grid, w);
    read(o, "demands", s.demands, w);
    read(o, "replications", s.replications, w);
    read(o, "k_paths", s.k_paths, w);
    read(o, "node_disjoint", s.node_disjoint, w);
    read(o, "warmup_fraction", s.warmup_fraction, w);
    read(o, "mean_holding_time", s.mean_holding_time, w);
  }
  read(j, "seed", c.seed, "config");
  read(j, "jobs", c.jobs, "config");
  read(j, "cache_enabled", c.cache_enabled, "config");
  read(j, "cache_dir", c.cache_dir, "config");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string physics_hash(const PhysicsSettings& p) {
  json j = {{"grid", grid_json(p.grid)},
            {"fiber", fiber_json(p.fiber)},
            {"nli", nli_json(p.nli)},
            {"eta_power_grid_dbm", p.eta_power_grid_dbm}};
  // Format corrections and noise parameters are applied after tabulation.
  j["nli"].erase("xci_kurtosis_weight");
  return hex64(fnv1a64(j.dump()));
}

std::string config_hash(const RunConfig& c) {
  json j = c;
  return hex64(fnv1a64(j.dump()));
}

}  // namespace clband
