#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clband/config.hpp"
#include "clband/physics_model.hpp"

namespace clband {

struct ChannelOptimum {
  double power_dbm = 0.0;
  double gsnr_db = 0.0;
};

// Golden-section maximisation of one channel's GSNR over [p_min, p_max]
// with every channel launched at the candidate power.
ChannelOptimum per_channel_optimum(const UniformPowerModel& model, int channel,
                                   const ModulationFormat& format, int spans, double p_min_dbm,
                                   double p_max_dbm, double tolerance_db = 0.01);

// Largest n <= max_spans with GSNR(n) - margin >= threshold, 0 when one span
// already fails. GSNR(n) strictly decreases in n.
int reach_from_span_snr(double span_snr, double snr_trx_db, double required_db, int max_spans);

int max_reach(const UniformPowerModel& model, int channel, const ModulationFormat& format,
              double p_dbm, double margin_db, int max_spans);

// Per (channel, format) optima and reaches when each pair uses its own power.
struct ChannelByChannel {
  std::vector<std::vector<double>> power_dbm;  // [channel][m - 1]
  std::vector<std::vector<int>> reach;         // [channel][m - 1]
  std::vector<int> n_span;                     // [m - 1], minimum reach over the C band
  double p_min_dbm = 0.0;
  double p_max_dbm = 0.0;
};

ChannelByChannel channel_by_channel(const UniformPowerModel& model,
                                    const OptimizerSettings& settings, int jobs);

struct OptimizationProblem {
  std::vector<int> channels;  // empty selects every channel
  std::vector<int> formats;   // m values; empty selects all six
  std::vector<int> n_span;    // per entry of `formats`
  double p_min_dbm = -5.0;
  double p_max_dbm = 5.0;
  OptimizerSettings swarm;
  std::uint64_t seed = 1;
  int jobs = 1;
};

// Bounds and span targets taken from the channel-by-channel solution.
OptimizationProblem default_problem(const UniformPowerModel& model,
                                    const OptimizerSettings& settings, std::uint64_t seed,
                                    int jobs);
OptimizationProblem default_problem(const ChannelByChannel& cbc,
                                    const OptimizerSettings& settings, std::uint64_t seed,
                                    int jobs);

struct FormatReach {
  int m = 0;
  int reach_spans = 0;
  int worst_channel = 0;  // index of the channel limiting the reach
  int n_span = 0;         // span target used by the optimisation
};

struct MrdTable {
  double optimum_power_dbm = 0.0;
  double objective = 0.0;  // sum of GSNR in dB at the optimum
  std::vector<FormatReach> per_format;
  std::vector<std::vector<int>> per_channel;  // [channel][m - 1]
};

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::pair<int, int>> violations)
      : std::runtime_error(what), violations_(std::move(violations)) {}
  // (channel index, m) pairs below threshold at the least-violating power.
  const std::vector<std::pair<int, int>>& violations() const { return violations_; }

 private:
  std::vector<std::pair<int, int>> violations_;
};

// Objective and worst threshold violation (dB, <= 0 when feasible) at p.
struct Evaluation {
  double gsnr_sum_db = 0.0;
  double worst_violation_db = 0.0;
  double fitness = 0.0;
};
Evaluation evaluate_power(const UniformPowerModel& model, const OptimizationProblem& problem,
                          double p_dbm);

// Particle-swarm search for the uniform launch power, followed by a
// feasibility repair. The MRD table is recomputed at the returned power.
MrdTable optimize_band_power(const UniformPowerModel& model, const OptimizationProblem& problem);

// Reach of every channel and format at one shared power.
MrdTable mrd_table_at(const UniformPowerModel& model, double p_dbm, double margin_db,
                      int max_spans);

// Counter-based uniform variate in [0, 1) keyed on (seed, iteration, particle, stream).
double counter_uniform(std::uint64_t seed, std::uint64_t iteration, std::uint64_t particle,
                       std::uint64_t stream);

nlohmann::json mrd_table_to_json(const MrdTable& table);
MrdTable mrd_table_from_json(const nlohmann::json& j);

}  // namespace clband
