#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clband/grid.hpp"
#include "clband/optimizer.hpp"
#include "clband/physics_model.hpp"
#include "clband/spectrum.hpp"
#include "clband/topology.hpp"

namespace clband {

inline constexpr int kBitrateStepGbps = 100;
inline constexpr int kMaxBitrateGbps = 600;

struct Demand {
  std::uint64_t id = 0;
  int source = 0;
  int destination = 0;
  int bitrate_gbps = 0;
  double arrival = 0.0;
  double holding = 0.0;
};

// Poisson arrivals at `arrival_rate`, exponential holding with mean
// `mean_holding`, uniform ordered node pairs and uniform bit rates.
std::vector<Demand> generate_traffic(std::uint64_t seed, double arrival_rate, double mean_holding,
                                     int count, int node_count);

// Offered load in Erlang: arrival rate times mean holding time.
inline double offered_load(double arrival_rate, double mean_holding) {
  return arrival_rate * mean_holding;
}

struct FormatChoice {
  int m = 0;
  int n_subchannels = 0;
};

// Highest format whose reach covers the route; nothing if even m = 1 fails.
std::optional<FormatChoice> select_format_and_width(int route_spans, const MrdTable& table,
                                                    int bitrate_gbps);

// Per-span SNR of every format and channel at the network launch power.
struct LinkBudget {
  std::vector<std::vector<double>> span_snr;  // [m - 1][channel], linear
  double snr_trx_db = 36.0;

  double gsnr_db(int m, int channel, int spans) const;
};

LinkBudget link_budget(const UniformPowerModel& model, double p_dbm);

struct SimulationInput {
  const Topology* topology = nullptr;
  ChannelGrid grid;
  MrdTable mrd;
  LinkBudget budget;
  std::vector<double> otl_grid;
  std::vector<Policy> policies = {Policy::EFF, Policy::ELF};
  int demands = 20000;
  int replications = 5;
  int k_paths = 3;
  bool node_disjoint = false;
  double warmup_fraction = 0.05;
  double mean_holding = 1.0;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  double bbp = 0.0;
  double mean_gsnr_db = 0.0;
  long long offered_gbps = 0;
  long long blocked_gbps = 0;
  long long established = 0;
  long long blocked_reach = 0;
  long long blocked_spectrum = 0;
};

struct PointResult {
  double otl = 0.0;
  Policy policy = Policy::EFF;
  std::vector<ReplicationResult> replications;
  double bbp_mean = 0.0;
  double bbp_ci = 0.0;  // 95% half-width
  double gsnr_mean_db = 0.0;
  double gsnr_ci_db = 0.0;
};

struct SimReport {
  std::vector<PointResult> points;
  int demands = 0;
  int replications = 0;
  double warmup_fraction = 0.0;
  std::uint64_t seed = 0;
  double launch_power_dbm = 0.0;
};

// Candidate routes for every ordered node pair, [source][destination].
using RouteTable = std::vector<std::vector<std::vector<Route>>>;
RouteTable build_route_table(const Topology& topology, int k, bool node_disjoint);

// Called after every arrival and departure with the current state.
using EventObserver = std::function<void(const SpectrumState&)>;

ReplicationResult run_replication(const SimulationInput& input, const RouteTable& routes,
                                  double otl, Policy policy, std::uint64_t seed,
                                  const EventObserver& observer = {});

// Seed of one replication; both policies share it.
std::uint64_t replication_seed(std::uint64_t root, std::size_t otl_index, std::size_t replication);

SimReport run_simulation(const SimulationInput& input);

// Mean and 95% Student-t half-width.
std::pair<double, double> mean_and_ci95(const std::vector<double>& values);

nlohmann::json sim_report_to_json(const SimReport& report);
SimReport sim_report_from_json(const nlohmann::json& j);
// Columns: otl, policy, bbp, bbp_ci, mean_gsnr_db, gsnr_ci.
std::string sim_report_csv(const SimReport& report);

}  // namespace clband
