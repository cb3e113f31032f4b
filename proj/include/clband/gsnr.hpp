#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clband {

// Per-channel quantities of one amplified span. The launch power is the
// power restored by the previous amplifier at the span input.
struct SpanTerms {
  std::vector<double> launch_w;
  std::vector<double> eta;      // 1/W^2
  std::vector<double> p_ase_w;  // W, ASE added by the span's amplifier

  std::size_t channels() const { return launch_w.size(); }
  // Linear SNR contribution of this span for one channel.
  double snr(std::size_t channel) const;
};

// A lightpath as an ordered list of spans plus the transceiver noise term.
struct PathPhysics {
  std::vector<SpanTerms> spans;
  double snr_trx_db = 36.0;  // +infinity disables the transceiver term
};

struct GsnrProfile {
  std::vector<double> gsnr_db;                 // per channel
  std::vector<std::vector<double>> span_snr;   // [channel][span], linear
};

class GsnrDomainError : public std::domain_error {
 public:
  GsnrDomainError(const std::string& what, std::size_t span)
      : std::domain_error(what), span_(span) {}
  std::size_t span() const { return span_; }

 private:
  std::size_t span_;
};

// End-to-end GSNR in dB:
//   GSNR^-1 = sum_s [(P - P^3 eta) / (P_ASE + P^3 eta)]^-1 + SNR_TRX^-1
double gsnr(const PathPhysics& path, std::size_t channel);

GsnrProfile gsnr_profile(const PathPhysics& path);

// GSNR of n identical spans with per-span linear SNR `span_snr`.
double gsnr_of_identical_spans(double span_snr, int spans, double snr_trx_db);

}  // namespace clband
