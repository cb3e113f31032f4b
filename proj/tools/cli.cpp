#include "clband/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "clband/config.hpp"
#include "clband/io.hpp"
#include "clband/optimizer.hpp"
#include "clband/physics_model.hpp"
#include "clband/raman.hpp"
#include "clband/simulation.hpp"
#include "clband/topology.hpp"
#include "clband/units.hpp"

#ifndef CLBAND_DATA_DIR
#define CLBAND_DATA_DIR "data"
#endif

namespace clband {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;
  bool no_cache = false;
  std::string cache_dir;
  std::string grid;
};

struct Context {
  RunConfig config;
  fs::path config_dir = ".";
};

Context resolve(const Common& c) {
  Context ctx;
  if (!c.config_path.empty()) {
    ctx.config = load_run_config(c.config_path);
    ctx.config_dir = fs::path(c.config_path).parent_path();
  }
  if (c.seed_given) ctx.config.seed = c.seed;
  if (c.jobs > 0) ctx.config.jobs = c.jobs;
  if (c.no_cache) ctx.config.cache_enabled = false;
  if (!c.cache_dir.empty()) ctx.config.cache_dir = c.cache_dir;
  if (!c.grid.empty()) ctx.config.physics.grid = named_grid(c.grid);
  return ctx;
}

fs::path output_path(const std::string& out) {
  fs::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("CLBAND_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  }
  return p;
}

json provenance(const RunConfig& config) {
  return {{"config_hash", config_hash(config)},
          {"seed", config.seed},
          {"version", kArtifactVersion}};
}

std::string provenance_comment(const RunConfig& config) {
  return "# config_hash=" + config_hash(config) + " seed=" + std::to_string(config.seed) +
         " version=" + kArtifactVersion + "\n";
}

void write_json(const std::string& out, const json& doc) {
  atomic_write(output_path(out), doc.dump(2) + "\n");
}

UniformPowerModel build_model(const RunConfig& config) {
  return make_uniform_power_model(config.physics, config.jobs,
                                  CacheOptions{config.cache_enabled, config.cache_dir});
}

fs::path find_input(const std::string& name, const fs::path& config_dir) {
  const fs::path p(name);
  if (fs::exists(p)) return p;
  if (p.is_relative()) {
    for (const fs::path& base : {config_dir, fs::path(CLBAND_DATA_DIR)}) {
      if (!base.empty() && fs::exists(base / p)) return base / p;
    }
  }
  throw InputError("input file not found: " + name);
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + " is not valid JSON: " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

json optimize_document(const RunConfig& config, const UniformPowerModel& model) {
  const ChannelByChannel cbc = channel_by_channel(model, config.optimizer, config.jobs);
  OptimizationProblem problem = default_problem(cbc, config.optimizer, config.seed, config.jobs);
  const MrdTable table = optimize_band_power(model, problem);
  json doc = provenance(config);
  doc.update(mrd_table_to_json(table));
  doc["search_bounds_dbm"] = {problem.p_min_dbm, problem.p_max_dbm};
  doc["channel_by_channel"] = {{"power_dbm", cbc.power_dbm},
                               {"reach_spans", cbc.reach},
                               {"n_span", cbc.n_span}};
  return doc;
}

int run_gsnr_profile(const Common& common, double power_dbm, int m, int spans,
                     const std::string& out) {
  const Context ctx = resolve(common);
  const RunConfig& config = ctx.config;
  const UniformPowerModel model = build_model(config);
  const UniformSpan s = model.span_state(power_dbm);
  const auto& fmt = model.format(m);
  const SpanTerms terms = model.span(power_dbm, fmt);
  const auto& grid = model.grid();
  std::ostringstream csv;
  csv << provenance_comment(config);
  csv << "channel_index,center_THz,band,p_rx_dBm,eta_per_W2,p_ase_dBm,channel_number,gsnr_db\n";
  char line[512];
  for (const Channel& ch : grid.channels()) {
    const auto i = static_cast<std::size_t>(ch.index);
    const double g = model.gsnr_db(power_dbm, fmt, ch.index, spans);
    std::snprintf(line, sizeof line, "%d,%.6f,%s,%.6f,%.9g,%.6f,%d,%.6f\n", ch.index,
                  ch.center_thz(), to_string(ch.band).c_str(), watt_to_dbm(s.received_w[i]),
                  terms.eta[i], watt_to_dbm(s.p_ase_w[i]), ch.label(), g);
    csv << line;
  }
  atomic_write(output_path(out), csv.str());
  return kExitOk;
}

int run_optimize(const Common& common, const std::string& out) {
  const Context ctx = resolve(common);
  const UniformPowerModel model = build_model(ctx.config);
  write_json(out, optimize_document(ctx.config, model));
  return kExitOk;
}

int run_mrd_table(const Common& common, double power_dbm, const std::string& out) {
  const Context ctx = resolve(common);
  const RunConfig& config = ctx.config;
  const UniformPowerModel model = build_model(config);
  const MrdTable table = mrd_table_at(model, power_dbm, config.optimizer.aging_margin_db,
                                      config.optimizer.max_reach_spans);
  json doc = provenance(config);
  doc.update(mrd_table_to_json(table));
  write_json(out, doc);
  return kExitOk;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + item + "' in list");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

struct SimulateArgs {
  std::string topology;
  std::string mrd_table;
  std::string policy = "both";
  std::string otl_grid;
  int seeds = 0;
  int demands = 0;
  std::string out = "report.json";
};

int run_simulate(const Common& common, const SimulateArgs& a) {
  Context ctx = resolve(common);
  RunConfig& config = ctx.config;
  if (!a.topology.empty()) config.simulation.topology = a.topology;
  if (!a.otl_grid.empty()) config.simulation.otl_grid = parse_list(a.otl_grid);
  if (a.seeds > 0) config.simulation.replications = a.seeds;
  if (a.demands > 0) config.simulation.demands = a.demands;

  // Inputs are validated before any computation or output.
  const Topology topology = [&] {
    const fs::path path = find_input(config.simulation.topology, ctx.config_dir);
    try {
      return load_topology(path);
    } catch (const TopologyError& e) {
      throw InputError(e.what());
    }
  }();
  std::vector<Policy> policies;
  if (a.policy == "both") {
    policies = {Policy::EFF, Policy::ELF};
  } else {
    try {
      policies = {policy_from_string(a.policy)};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  std::optional<MrdTable> mrd;
  if (!a.mrd_table.empty()) {
    const json doc = read_json_file(find_input(a.mrd_table, ctx.config_dir));
    try {
      mrd = mrd_table_from_json(doc);
    } catch (const ConfigError& e) {
      throw InputError(e.what());
    }
  }

  const UniformPowerModel model = build_model(config);
  if (!mrd) mrd = mrd_table_from_json(optimize_document(config, model));

  SimulationInput input;
  input.topology = &topology;
  input.grid = model.grid();
  input.mrd = *mrd;
  input.budget = link_budget(model, mrd->optimum_power_dbm);
  input.otl_grid = config.simulation.otl_grid;
  input.policies = policies;
  input.demands = config.simulation.demands;
  input.replications = config.simulation.replications;
  input.k_paths = config.simulation.k_paths;
  input.node_disjoint = config.simulation.node_disjoint;
  input.warmup_fraction = config.simulation.warmup_fraction;
  input.mean_holding = config.simulation.mean_holding_time;
  input.seed = config.seed;
  input.jobs = config.jobs;
  const SimReport report = run_simulation(input);
  json doc = provenance(config);
  doc.update(sim_report_to_json(report));
  write_json(a.out, doc);
  return kExitOk;
}

int run_report(const std::string& in, const std::string& out) {
  const json doc = read_json_file(find_input(in, "."));
  SimReport report;
  try {
    report = sim_report_from_json(doc);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  std::string header;
  if (doc.contains("config_hash")) {
    header = "# config_hash=" + doc.at("config_hash").get<std::string>() +
             " seed=" + std::to_string(doc.value("seed", std::uint64_t{0})) +
             " version=" + doc.value("version", std::string(kArtifactVersion)) + "\n";
  }
  atomic_write(output_path(out), header + sim_report_csv(report));
  return kExitOk;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"C+L band physical-layer and network simulation tool", "clband"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config_path, "JSON run configuration");
  app.add_option("--seed", common.seed, "root random seed")->each([&](const std::string&) {
    common.seed_given = true;
  });
  app.add_option("--jobs", common.jobs, "worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--no-cache", common.no_cache, "recompute NLI tables instead of using the cache");
  app.add_option("--cache-dir", common.cache_dir, "directory of the NLI table cache");
  app.add_option("--grid", common.grid, "named channel plan (cl-64x64, cl-16x16, c-only-64)");

  double profile_power = 0.0;
  int profile_m = 4;
  int profile_spans = 1;
  std::string profile_out = "gsnr_profile.csv";
  auto* profile = app.add_subcommand("gsnr-profile", "per-channel power, NLI and ASE table");
  profile->add_option("--power", profile_power, "uniform launch power (dBm)");
  profile->add_option("--format", profile_m, "modulation format m = 1..6")->check(CLI::Range(1, 6));
  profile->add_option("--spans", profile_spans, "span count for the GSNR column")
      ->check(CLI::PositiveNumber);
  profile->add_option("--out", profile_out, "output CSV");

  std::string optimize_out = "mrd_table.json";
  auto* optimize = app.add_subcommand("optimize-power", "band-wide launch power optimisation");
  optimize->add_option("--out", optimize_out, "output JSON");

  double mrd_power = 0.0;
  std::string mrd_out = "mrd_table.json";
  auto* mrd = app.add_subcommand("mrd-table", "reach table at a given launch power");
  mrd->add_option("--power", mrd_power, "uniform launch power (dBm)")->required();
  mrd->add_option("--out", mrd_out, "output JSON");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "dynamic traffic simulation");
  simulate->add_option("--topology", sim.topology, "topology JSON");
  simulate->add_option("--mrd-table", sim.mrd_table, "MRD table from optimize-power");
  simulate->add_option("--policy", sim.policy, "eff, elf or both")
      ->check(CLI::IsMember({"eff", "elf", "both"}));
  simulate->add_option("--otl-grid", sim.otl_grid, "comma-separated offered loads (Erlang)");
  simulate->add_option("--seeds", sim.seeds, "replications per offered load")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--demands", sim.demands, "demands per replication")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "output JSON");

  std::string report_in = "report.json";
  std::string report_out = "report.csv";
  auto* report = app.add_subcommand("report", "convert a simulation report to CSV");
  report->add_option("--in", report_in, "simulation report JSON");
  report->add_option("--out", report_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*profile) return run_gsnr_profile(common, profile_power, profile_m, profile_spans, profile_out);
    if (*optimize) return run_optimize(common, optimize_out);
    if (*mrd) return run_mrd_table(common, mrd_power, mrd_out);
    if (*simulate) return run_simulate(common, sim);
    if (*report) return run_report(report_in, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("clband");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return dispatch(static_cast<int>(storage.size()), argv.data());
}

}  // namespace clband
