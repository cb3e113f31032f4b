#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "clband/grid.hpp"
#include "clband/nli.hpp"

namespace clband {

inline constexpr const char* kArtifactVersion = "1.0.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhysicsSettings {
  GridSettings grid;
  FiberParams fiber;
  AmplifierParams amplifier;
  TransceiverParams transceiver;
  NliOptions nli;
  std::vector<ModulationFormat> formats = default_formats();
  // Launch powers at which NLI coefficients are tabulated; queries in between
  // are interpolated.
  std::vector<double> eta_power_grid_dbm = {-10.0, -7.5, -5.0, -3.75, -2.5, -1.25,
                                            0.0,   1.25, 2.5,  3.75,  5.0};
};

struct OptimizerSettings {
  int particles = 30;
  int iterations = 100;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp_fraction = 0.2;
  double penalty_per_db = 1e3;
  // Window searched by the channel-by-channel optimisation.
  double search_min_dbm = -5.0;
  double search_max_dbm = 5.0;
  double golden_tolerance_db = 0.01;
  // Aging margin added on top of every format threshold.
  double aging_margin_db = 2.0;
  int max_reach_spans = 4096;
};

struct SimulationSettings {
  std::string topology = "italian21_standin.json";
  std::vector<double> otl_grid = {200.0, 250.0, 300.0, 350.0, 400.0};
  int demands = 20000;
  int replications = 5;
  int k_paths = 3;
  bool node_disjoint = false;
  double warmup_fraction = 0.05;
  double mean_holding_time = 1.0;
};

struct RunConfig {
  PhysicsSettings physics;
  OptimizerSettings optimizer;
  SimulationSettings simulation;
  std::uint64_t seed = 1;
  int jobs = 0;
  bool cache_enabled = true;
  std::string cache_dir = ".clband-cache";
};

// Named channel plans selectable with --grid.
GridSettings named_grid(const std::string& name);

void to_json(nlohmann::json& j, const RunConfig& c);
// Missing keys keep their defaults; unknown keys raise ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json physics_to_json(const PhysicsSettings& p);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Hash of the physics inputs that determine tabulated NLI coefficients.
std::string physics_hash(const PhysicsSettings& p);
// Hash of the whole configuration, embedded in every output file.
std::string config_hash(const RunConfig& c);

}  // namespace clband
