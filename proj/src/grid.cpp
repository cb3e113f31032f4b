#include "clband/grid.hpp"

#include <cmath>
#include <numeric>

#include "clband/units.hpp"

namespace clband {

std::string to_string(Band band) { return band == Band::C ? "C" : "L"; }

std::vector<int> ChannelGrid::band_indices(Band band) const {
  std::vector<int> out;
  for (const auto& ch : channels_) {
    if (ch.band == band) out.push_back(ch.index);
  }
  return out;
}

ChannelGrid build_grid(const GridSettings& s) {
  if (s.c_channels < 0 || s.l_channels < 0 || s.c_channels + s.l_channels < 1) {
    throw GridError("grid needs at least one channel");
  }
  if (s.c_channels < 1) throw GridError("grid needs at least one C-band channel");
  if (!(s.c_start_thz > 0.0) || !(s.slot_width_ghz > 0.0) || !(s.symbol_rate_gbaud > 0.0) ||
      s.slots_per_channel < 1 || !std::isfinite(s.c_start_thz)) {
    throw GridError("grid frequencies must be positive and finite");
  }
  if (s.guard_band_ghz < 0.0 || !std::isfinite(s.guard_band_ghz)) {
    throw GridError("guard band must be non-negative");
  }
  // Bands that touch would share an edge; a populated L band needs a real gap.
  if (s.l_channels > 0 && !(s.guard_band_ghz > 0.0)) {
    throw GridError("C and L bands overlap: guard band must be positive");
  }

  ChannelGrid g;
  g.slot_width_hz_ = ghz(s.slot_width_ghz);
  g.slots_per_channel_ = s.slots_per_channel;
  g.symbol_rate_hz_ = ghz(s.symbol_rate_gbaud);
  g.guard_band_hz_ = ghz(s.guard_band_ghz);
  g.c_channels_ = s.c_channels;
  g.l_channels_ = s.l_channels;

  const double bw = g.channel_bandwidth_hz();
  if (g.symbol_rate_hz_ > bw) throw GridError("symbol rate exceeds the channel bandwidth");

  const double c_low = thz(s.c_start_thz);
  g.c_band_ = {c_low, c_low + s.c_channels * bw};
  const double l_high = c_low - g.guard_band_hz_;
  g.l_band_ = {l_high - s.l_channels * bw, l_high};
  if (s.l_channels > 0 && g.l_band_.low_hz <= 0.0) {
    throw GridError("L band extends below zero frequency");
  }

  const int n = s.c_channels + s.l_channels;
  g.channels_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Channel& ch = g.channels_[static_cast<std::size_t>(i)];
    ch.index = i;
    if (i < s.l_channels) {
      ch.band = Band::L;
      ch.center_hz = g.l_band_.low_hz + (i + 0.5) * bw;
    } else {
      ch.band = Band::C;
      ch.center_hz = g.c_band_.low_hz + (i - s.l_channels + 0.5) * bw;
    }
    ch.position = n - 1 - i;
    ch.slot_count = s.slots_per_channel;
    ch.first_slot = ch.position * s.slots_per_channel;
  }

  double sum = 0.0;
  for (const auto& ch : g.channels_) sum += ch.center_hz;
  g.center_of_gravity_hz_ = sum / n;
  for (auto& ch : g.channels_) ch.relative_hz = ch.center_hz - g.center_of_gravity_hz_;
  return g;
}

ChannelGrid build_grid(int c_channels, int l_channels, double c_start_thz, double slot_width_ghz,
                       double guard_band_ghz) {
  GridSettings s;
  s.c_channels = c_channels;
  s.l_channels = l_channels;
  s.c_start_thz = c_start_thz;
  s.slot_width_ghz = slot_width_ghz;
  s.guard_band_ghz = guard_band_ghz;
  return build_grid(s);
}

std::array<double, kFormatCount> snr_threshold_table() { return kSnrThresholdsDb; }

std::vector<ModulationFormat> default_formats() {
  // Excess kurtosis Phi = E|x|^4 / (E|x|^2)^2 - 2 for each constellation.
  static const std::array<const char*, kFormatCount> names = {"PM-BPSK",  "PM-QPSK",  "PM-8QAM",
                                                              "PM-16QAM", "PM-32QAM", "PM-64QAM"};
  static const std::array<double, kFormatCount> kurtosis = {-1.0, -1.0, -0.556, -0.68, -0.69, -0.619};
  std::vector<ModulationFormat> out;
  for (int k = 0; k < kFormatCount; ++k) {
    out.push_back({k + 1, names[static_cast<std::size_t>(k)], 100.0 * (k + 1),
                   kSnrThresholdsDb[static_cast<std::size_t>(k)],
                   kurtosis[static_cast<std::size_t>(k)]});
  }
  return out;
}

void FiberParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(attenuation_db_per_km) || !finite(attenuation_l_db_per_km) ||
      !finite(beta2_ps2_per_km) || !finite(beta3_ps3_per_km) || !finite(gamma_per_w_per_km) ||
      !finite(raman_slope_per_w_per_km_per_thz) || !finite(span_length_km)) {
    throw std::invalid_argument("fiber parameters must be finite");
  }
  // Zero attenuation is accepted as a lossless idealisation.
  if (attenuation_db_per_km < 0.0 || attenuation_l_db_per_km < 0.0) {
    throw std::invalid_argument("fiber attenuation must be non-negative");
  }
  if (raman_slope_per_w_per_km_per_thz < 0.0) {
    throw std::invalid_argument("Raman gain slope must be non-negative");
  }
  if (span_length_km <= 0.0) throw std::invalid_argument("span length must be positive");
  if (gamma_per_w_per_km < 0.0) throw std::invalid_argument("nonlinear coefficient must be >= 0");
}

double FiberParams::alpha_per_m(Band band) const {
  return db_per_km_to_neper_per_m(attenuation_db_per_km_for(band));
}

double FiberParams::mean_alpha_per_m() const {
  return 0.5 * (alpha_per_m(Band::C) + alpha_per_m(Band::L));
}

}  // namespace clband
