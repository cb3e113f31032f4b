#include "clband/simulation.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "clband/parallel.hpp"
#include "clband/units.hpp"

namespace clband {

using nlohmann::json;

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int below(std::mt19937_64& rng, int n) {
  return static_cast<int>(unit(rng) * n);
}

double exponential(std::mt19937_64& rng, double mean) { return -std::log1p(-unit(rng)) * mean; }

}  // namespace

std::vector<Demand> generate_traffic(std::uint64_t seed, double arrival_rate, double mean_holding,
                                     int count, int node_count) {
  if (!(arrival_rate > 0.0) || !(mean_holding > 0.0)) {
    throw std::invalid_argument("arrival rate and holding time must be positive");
  }
  if (count < 0) throw std::invalid_argument("demand count must be non-negative");
  if (node_count < 2) throw std::invalid_argument("traffic needs at least two nodes");
  std::mt19937_64 rng(seed);
  std::vector<Demand> out(static_cast<std::size_t>(count));
  double t = 0.0;
  for (int i = 0; i < count; ++i) {
    Demand& d = out[static_cast<std::size_t>(i)];
    d.id = static_cast<std::uint64_t>(i);
    t += exponential(rng, 1.0 / arrival_rate);
    d.arrival = t;
    d.holding = exponential(rng, mean_holding);
    d.source = below(rng, node_count);
    d.destination = below(rng, node_count - 1);
    if (d.destination >= d.source) ++d.destination;
    d.bitrate_gbps = kBitrateStepGbps * (1 + below(rng, kMaxBitrateGbps / kBitrateStepGbps));
  }
  return out;
}

std::optional<FormatChoice> select_format_and_width(int route_spans, const MrdTable& table,
                                                    int bitrate_gbps) {
  if (bitrate_gbps <= 0) throw std::invalid_argument("bit rate must be positive");
  for (auto it = table.per_format.rbegin(); it != table.per_format.rend(); ++it) {
    if (it->reach_spans >= route_spans) {
      const int per_sub = kBitrateStepGbps * it->m;
      return FormatChoice{it->m, (bitrate_gbps + per_sub - 1) / per_sub};
    }
  }
  return std::nullopt;
}

double LinkBudget::gsnr_db(int m, int channel, int spans) const {
  return gsnr_of_identical_spans(
      span_snr.at(static_cast<std::size_t>(m - 1)).at(static_cast<std::size_t>(channel)), spans,
      snr_trx_db);
}

LinkBudget link_budget(const UniformPowerModel& model, double p_dbm) {
  return LinkBudget{model.span_snr_all_formats(p_dbm), model.settings().transceiver.snr_trx_db};
}

RouteTable build_route_table(const Topology& topology, int k, bool node_disjoint) {
  const auto n = static_cast<std::size_t>(topology.node_count());
  RouteTable table(n, std::vector<std::vector<Route>>(n));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t d = 0; d < n; ++d) {
      if (s == d) continue;
      table[s][d] = k_disjoint_shortest_paths(topology, static_cast<int>(s), static_cast<int>(d), k,
                                              node_disjoint);
    }
  }
  return table;
}

std::uint64_t replication_seed(std::uint64_t root, std::size_t otl_index, std::size_t replication) {
  return mix(mix(mix(root) ^ otl_index) ^ replication);
}

ReplicationResult run_replication(const SimulationInput& input, const RouteTable& routes,
                                  double otl, Policy policy, std::uint64_t seed,
                                  const EventObserver& observer) {
  if (!input.topology) throw std::invalid_argument("simulation has no topology");
  if (!(otl > 0.0)) throw std::invalid_argument("offered load must be positive");
  const Topology& topo = *input.topology;
  const ChannelGrid& grid = input.grid;
  const int per_channel = grid.slots_per_channel();
  const double arrival_rate = otl / input.mean_holding;
  const auto demands =
      generate_traffic(seed, arrival_rate, input.mean_holding, input.demands, topo.node_count());
  const auto warmup = static_cast<std::size_t>(std::floor(input.warmup_fraction * input.demands));

  SpectrumState spectrum(topo.link_count(), grid.c_slots(), grid.l_slots(), per_channel);
  using Departure = std::pair<double, std::uint64_t>;
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> departures;
  auto depart_until = [&](double t) {
    while (!departures.empty() && departures.top().first <= t) {
      spectrum.release(departures.top().second);
      departures.pop();
      if (observer) observer(spectrum);
    }
  };

  ReplicationResult r;
  r.seed = seed;
  double gsnr_sum = 0.0;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    const Demand& d = demands[i];
    depart_until(d.arrival);
    const bool counted = i >= warmup;
    bool reach_ok = false;
    bool placed = false;
    double gsnr_db = 0.0;
    for (const Route& route : routes[static_cast<std::size_t>(d.source)][static_cast<std::size_t>(d.destination)]) {
      const auto choice = select_format_and_width(route.spans, input.mrd, d.bitrate_gbps);
      if (!choice) continue;
      reach_ok = true;
      const int n_slots = choice->n_subchannels * per_channel;
      const auto first = spectrum.find(route.links, n_slots, policy);
      if (!first) continue;
      spectrum.allocate(d.id, route.links, *first, n_slots);
      departures.emplace(d.arrival + d.holding, d.id);
      double sum = 0.0;
      for (int k = 0; k < choice->n_subchannels; ++k) {
        const int channel = grid.index_of_slot(*first + k * per_channel);
        sum += input.budget.gsnr_db(choice->m, channel, route.spans);
      }
      gsnr_db = sum / choice->n_subchannels;
      placed = true;
      break;
    }
    if (observer) observer(spectrum);
    if (!counted) continue;
    r.offered_gbps += d.bitrate_gbps;
    if (placed) {
      ++r.established;
      gsnr_sum += gsnr_db;
    } else {
      r.blocked_gbps += d.bitrate_gbps;
      if (reach_ok) {
        ++r.blocked_spectrum;
      } else {
        ++r.blocked_reach;
      }
    }
  }
  depart_until(std::numeric_limits<double>::infinity());
  if (!spectrum.empty()) throw SpectrumError("spectrum not empty after all departures");
  r.bbp = r.offered_gbps > 0 ? static_cast<double>(r.blocked_gbps) / r.offered_gbps : 0.0;
  r.mean_gsnr_db = r.established > 0 ? gsnr_sum / r.established : 0.0;
  return r;
}

std::pair<double, double> mean_and_ci95(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, t * sd / std::sqrt(n)};
}

SimReport run_simulation(const SimulationInput& input) {
  if (!input.topology) throw std::invalid_argument("simulation has no topology");
  if (input.replications < 1) throw std::invalid_argument("need at least one replication");
  if (input.demands < 1) throw std::invalid_argument("need at least one demand");
  if (input.warmup_fraction < 0.0 || input.warmup_fraction >= 1.0) {
    throw std::invalid_argument("warm-up fraction must lie in [0, 1)");
  }
  const RouteTable routes = build_route_table(*input.topology, input.k_paths, input.node_disjoint);
  const std::size_t n_otl = input.otl_grid.size();
  const std::size_t n_pol = input.policies.size();
  const auto n_rep = static_cast<std::size_t>(input.replications);

  SimReport report;
  report.demands = input.demands;
  report.replications = input.replications;
  report.warmup_fraction = input.warmup_fraction;
  report.seed = input.seed;
  report.launch_power_dbm = input.mrd.optimum_power_dbm;
  report.points.resize(n_otl * n_pol);
  for (std::size_t o = 0; o < n_otl; ++o) {
    for (std::size_t p = 0; p < n_pol; ++p) {
      auto& pt = report.points[o * n_pol + p];
      pt.otl = input.otl_grid[o];
      pt.policy = input.policies[p];
      pt.replications.resize(n_rep);
    }
  }
  parallel_for(n_otl * n_pol * n_rep, input.jobs, [&](std::size_t task) {
    const std::size_t o = task / (n_pol * n_rep);
    const std::size_t p = (task / n_rep) % n_pol;
    const std::size_t rep = task % n_rep;
    auto& pt = report.points[o * n_pol + p];
    pt.replications[rep] = run_replication(input, routes, pt.otl, pt.policy,
                                           replication_seed(input.seed, o, rep));
  });
  for (auto& pt : report.points) {
    std::vector<double> bbp;
    std::vector<double> gsnr;
    for (const auto& r : pt.replications) {
      bbp.push_back(r.bbp);
      gsnr.push_back(r.mean_gsnr_db);
    }
    std::tie(pt.bbp_mean, pt.bbp_ci) = mean_and_ci95(bbp);
    std::tie(pt.gsnr_mean_db, pt.gsnr_ci_db) = mean_and_ci95(gsnr);
  }
  return report;
}

json sim_report_to_json(const SimReport& report) {
  json points = json::array();
  for (const auto& pt : report.points) {
    json reps = json::array();
    for (const auto& r : pt.replications) {
      reps.push_back({{"seed", r.seed},
                      {"bbp", r.bbp},
                      {"mean_gsnr_db", r.mean_gsnr_db},
                      {"offered_gbps", r.offered_gbps},
                      {"blocked_gbps", r.blocked_gbps},
                      {"established", r.established},
                      {"blocked_reach", r.blocked_reach},
                      {"blocked_spectrum", r.blocked_spectrum}});
    }
    points.push_back({{"otl", pt.otl},
                      {"policy", to_string(pt.policy)},
                      {"bbp", pt.bbp_mean},
                      {"bbp_ci", pt.bbp_ci},
                      {"mean_gsnr_db", pt.gsnr_mean_db},
                      {"gsnr_ci", pt.gsnr_ci_db},
                      {"replications", reps}});
  }
  return {{"demands", report.demands},
          {"replication_count", report.replications},
          {"warmup_fraction", report.warmup_fraction},
          {"seed", report.seed},
          {"launch_power_dbm", report.launch_power_dbm},
          {"points", points}};
}

SimReport sim_report_from_json(const json& j) {
  SimReport report;
  try {
    j.at("demands").get_to(report.demands);
    j.at("replication_count").get_to(report.replications);
    j.at("warmup_fraction").get_to(report.warmup_fraction);
    j.at("seed").get_to(report.seed);
    if (j.contains("launch_power_dbm")) j.at("launch_power_dbm").get_to(report.launch_power_dbm);
    for (const auto& jp : j.at("points")) {
      PointResult pt;
      jp.at("otl").get_to(pt.otl);
      pt.policy = policy_from_string(jp.at("policy").get<std::string>());
      jp.at("bbp").get_to(pt.bbp_mean);
      jp.at("bbp_ci").get_to(pt.bbp_ci);
      jp.at("mean_gsnr_db").get_to(pt.gsnr_mean_db);
      jp.at("gsnr_ci").get_to(pt.gsnr_ci_db);
      for (const auto& jr : jp.at("replications")) {
        ReplicationResult r;
        jr.at("seed").get_to(r.seed);
        jr.at("bbp").get_to(r.bbp);
        jr.at("mean_gsnr_db").get_to(r.mean_gsnr_db);
        jr.at("offered_gbps").get_to(r.offered_gbps);
        jr.at("blocked_gbps").get_to(r.blocked_gbps);
        jr.at("established").get_to(r.established);
        jr.at("blocked_reach").get_to(r.blocked_reach);
        jr.at("blocked_spectrum").get_to(r.blocked_spectrum);
        pt.replications.push_back(r);
      }
      report.points.push_back(std::move(pt));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed simulation report: ") + e.what());
  }
  return report;
}

std::string sim_report_csv(const SimReport& report) {
  std::ostringstream out;
  out << "otl,policy,bbp,bbp_ci,mean_gsnr_db,gsnr_ci\n";
  char line[256];
  for (const auto& pt : report.points) {
    std::snprintf(line, sizeof line, "%.6g,%s,%.9g,%.9g,%.9g,%.9g\n", pt.otl,
                  to_string(pt.policy).c_str(), pt.bbp_mean, pt.bbp_ci, pt.gsnr_mean_db,
                  pt.gsnr_ci_db);
    out << line;
  }
  return out.str();
}

}  // namespace clband
