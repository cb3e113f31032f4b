#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clband/config.hpp"
#include "clband/grid.hpp"
#include "clband/gsnr.hpp"

namespace clband {

// Gaussian NLI components tabulated over uniform launch powers, indexed
// [power][channel].
struct EtaTable {
  std::vector<double> power_dbm;
  std::vector<std::vector<double>> sci;
  std::vector<std::vector<double>> xci;
  std::vector<std::vector<double>> mci;

  std::size_t channels() const { return sci.empty() ? 0 : sci.front().size(); }
};

// Evaluates every (power, channel) NLI integral of the full-load spectrum.
EtaTable tabulate_eta(const PhysicsSettings& settings, int jobs);

nlohmann::json eta_table_to_json(const EtaTable& table, const std::string& physics_hash);
// Returns nothing when the document is malformed, its checksum does not match
// or it belongs to another physics hash.
std::optional<EtaTable> eta_table_from_json(const nlohmann::json& doc,
                                            const std::string& physics_hash);

struct CacheOptions {
  bool enabled = true;
  std::filesystem::path dir = ".clband-cache";
};

enum class CacheOutcome { Disabled, Hit, Miss, Corrupt };

// Loads the table for `settings` from the cache directory or computes and
// stores it. A hit is bit-identical to a recomputation.
EtaTable cached_eta_table(const PhysicsSettings& settings, int jobs, const CacheOptions& cache,
                          CacheOutcome* outcome = nullptr);

// Full-load span physics when every channel launches the same power.
struct UniformSpan {
  double launch_w = 0.0;
  std::vector<double> received_w;
  std::vector<double> gain;
  std::vector<double> p_ase_w;
  std::vector<double> eta_sci;
  std::vector<double> eta_xci;
  std::vector<double> eta_mci;
};

class UniformPowerModel {
 public:
  UniformPowerModel(PhysicsSettings settings, EtaTable table);

  const PhysicsSettings& settings() const { return settings_; }
  const ChannelGrid& grid() const { return grid_; }
  const std::vector<ModulationFormat>& formats() const { return settings_.formats; }
  const ModulationFormat& format(int m) const;
  double min_power_dbm() const { return table_.power_dbm.front(); }
  double max_power_dbm() const { return table_.power_dbm.back(); }

  UniformSpan span_state(double p_dbm) const;
  SpanTerms span(double p_dbm, const ModulationFormat& format) const;
  // Linear per-span SNR of every channel.
  std::vector<double> span_snr(double p_dbm, const ModulationFormat& format) const;
  // Linear per-span SNR indexed [m - 1][channel], sharing one span evaluation.
  std::vector<std::vector<double>> span_snr_all_formats(double p_dbm) const;
  double gsnr_db(double p_dbm, const ModulationFormat& format, int channel, int spans) const;
  PathPhysics path(double p_dbm, const ModulationFormat& format, int spans) const;

 private:
  double interpolate(const std::vector<std::vector<double>>& values, int channel,
                     double p_dbm) const;

  PhysicsSettings settings_;
  ChannelGrid grid_;
  EtaTable table_;
  double noise_bandwidth_hz_ = 0.0;
};

UniformPowerModel make_uniform_power_model(const PhysicsSettings& settings, int jobs,
                                           const CacheOptions& cache);

// Span terms from direct NLI integration at `p_dbm`, without tabulation.
SpanTerms direct_span_terms(const PhysicsSettings& settings, double p_dbm,
                            const ModulationFormat& format, int jobs);

// GSNR of one channel over `spans` identical spans for each launch power.
// Powers must lie in [-10, 5] dBm.
std::vector<double> gsnr_sweep_power(const UniformPowerModel& model, const ModulationFormat& format,
                                     int channel, int spans, const std::vector<double>& powers_dbm);

}  // namespace clband
