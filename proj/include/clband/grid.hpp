#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace clband {

enum class Band { C, L };

std::string to_string(Band band);

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One fixed-width WDM channel of the C+L plan.
//
// `index` orders channels by increasing frequency (0 = lowest L-band
// channel). Spectrum slots are numbered the other way round, by increasing
// wavelength: slot 0 is the first slot of the highest-frequency C-band
// channel, so the C band occupies the low slot indices and the L band the
// high ones. `position` is the channel's rank in that wavelength order and
// `position + 1` is the conventional "channel number" (channel 1 is the
// shortest-wavelength C-band channel).
struct Channel {
  int index = 0;
  int position = 0;
  double center_hz = 0.0;
  double relative_hz = 0.0;  // center minus the equal-power centre of gravity
  Band band = Band::C;
  int first_slot = 0;
  int slot_count = 0;

  int label() const { return position + 1; }
  double center_thz() const { return center_hz * 1e-12; }
  double relative_thz() const { return relative_hz * 1e-12; }
};

struct FrequencyRange {
  double low_hz = 0.0;
  double high_hz = 0.0;
  double width_hz() const { return high_hz - low_hz; }
  bool contains(double f) const { return f >= low_hz && f <= high_hz; }
};

struct GridSettings {
  int c_channels = 64;
  int l_channels = 64;
  double c_start_thz = 191.3;  // lower edge of the C band
  double slot_width_ghz = 12.5;
  int slots_per_channel = 6;
  double guard_band_ghz = 500.0;
  double symbol_rate_gbaud = 64.0;
};

class ChannelGrid {
 public:
  ChannelGrid() = default;

  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& channel(int index) const { return channels_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(channels_.size()); }

  double slot_width_hz() const { return slot_width_hz_; }
  double channel_bandwidth_hz() const { return slot_width_hz_ * slots_per_channel_; }
  double symbol_rate_hz() const { return symbol_rate_hz_; }
  double guard_band_hz() const { return guard_band_hz_; }
  int slots_per_channel() const { return slots_per_channel_; }

  const FrequencyRange& c_band() const { return c_band_; }
  const FrequencyRange& l_band() const { return l_band_; }
  int c_channels() const { return c_channels_; }
  int l_channels() const { return l_channels_; }
  int c_slots() const { return c_channels_ * slots_per_channel_; }
  int l_slots() const { return l_channels_ * slots_per_channel_; }
  int total_slots() const { return c_slots() + l_slots(); }

  double center_of_gravity_hz() const { return center_of_gravity_hz_; }

  // Channel index occupying the given wavelength-ordered position.
  int index_at_position(int position) const { return size() - 1 - position; }

  // Highest-frequency C-band channel (shortest wavelength, channel number 1).
  int worst_c_channel() const { return size() - 1; }

  // Channel whose 6-slot block starts at `first_slot` in wavelength order.
  int index_of_slot(int slot) const { return index_at_position(slot / slots_per_channel_); }

  std::vector<int> band_indices(Band band) const;

 private:
  friend ChannelGrid build_grid(const GridSettings& settings);

  std::vector<Channel> channels_;
  double slot_width_hz_ = 0.0;
  double symbol_rate_hz_ = 0.0;
  double guard_band_hz_ = 0.0;
  int slots_per_channel_ = 6;
  int c_channels_ = 0;
  int l_channels_ = 0;
  FrequencyRange c_band_;
  FrequencyRange l_band_;
  double center_of_gravity_hz_ = 0.0;
};

ChannelGrid build_grid(const GridSettings& settings);
ChannelGrid build_grid(int c_channels, int l_channels, double c_start_thz,
                       double slot_width_ghz, double guard_band_ghz);

// Modulation format cardinality m = 1..6 (PM-BPSK .. PM-64QAM).
struct ModulationFormat {
  int m = 1;
  std::string name;
  double subchannel_bitrate_gbps = 0.0;
  double snr_threshold_db = 0.0;
  double excess_kurtosis = 0.0;
};

inline constexpr int kFormatCount = 6;

// GSNR thresholds at BER 1e-3, indexed by m - 1.
inline constexpr std::array<double, kFormatCount> kSnrThresholdsDb = {6.79, 9.81, 13.71,
                                                                      16.54, 19.58, 22.54};

std::array<double, kFormatCount> snr_threshold_table();

// Default format table. Excess kurtosis of the constellation drives the
// modulation-dependent part of the NLI estimate.
std::vector<ModulationFormat> default_formats();

struct FiberParams {
  double attenuation_db_per_km = 0.2;
  double attenuation_l_db_per_km = 0.2;
  double beta2_ps2_per_km = -21.3;
  double beta3_ps3_per_km = 0.12;
  double gamma_per_w_per_km = 1.3;
  double raman_slope_per_w_per_km_per_thz = 0.028;
  double span_length_km = 70.0;

  void validate() const;

  double attenuation_db_per_km_for(Band band) const {
    return band == Band::C ? attenuation_db_per_km : attenuation_l_db_per_km;
  }
  // SI conversions used by the physics code.
  double alpha_per_m(Band band) const;
  double mean_alpha_per_m() const;
  double beta2_s2_per_m() const { return beta2_ps2_per_km * 1e-24 / 1e3; }
  double beta3_s3_per_m() const { return beta3_ps3_per_km * 1e-36 / 1e3; }
  double gamma_per_w_per_m() const { return gamma_per_w_per_km / 1e3; }
  double raman_slope_si() const { return raman_slope_per_w_per_km_per_thz / 1e3 / 1e12; }
  double span_length_m() const { return span_length_km * 1e3; }
};

struct AmplifierParams {
  double noise_figure_c_db = 4.5;
  double noise_figure_l_db = 6.0;

  double noise_figure_db(Band band) const {
    return band == Band::C ? noise_figure_c_db : noise_figure_l_db;
  }
};

struct TransceiverParams {
  double snr_trx_db = 36.0;
};

}  // namespace clband
