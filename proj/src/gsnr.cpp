#include "clband/gsnr.hpp"

#include <cmath>
#include <limits>

#include "clband/units.hpp"

namespace clband {

namespace {

double trx_inverse(double snr_trx_db) {
  if (std::isinf(snr_trx_db) && snr_trx_db > 0) return 0.0;
  return 1.0 / db_to_linear(snr_trx_db);
}

}  // namespace

double SpanTerms::snr(std::size_t channel) const {
  const double p = launch_w.at(channel);
  const double nli = p * p * p * eta.at(channel);
  const double noise = p_ase_w.at(channel) + nli;
  if (noise <= 0.0) return std::numeric_limits<double>::infinity();
  return (p - nli) / noise;
}

double gsnr(const PathPhysics& path, std::size_t channel) {
  if (path.spans.empty()) throw std::invalid_argument("path has no spans");
  double inverse = trx_inverse(path.snr_trx_db);
  for (std::size_t s = 0; s < path.spans.size(); ++s) {
    const SpanTerms& span = path.spans[s];
    if (channel >= span.channels()) throw std::out_of_range("channel index out of range");
    const double p = span.launch_w[channel];
    if (!(p > 0.0)) throw GsnrDomainError("channel is not lit on span " + std::to_string(s), s);
    if (p * p * p * span.eta[channel] >= p) {
      throw GsnrDomainError("NLI power exceeds signal power on span " + std::to_string(s), s);
    }
    inverse += 1.0 / span.snr(channel);
  }
  if (!(inverse > 0.0)) throw GsnrDomainError("path is noiseless", 0);
  return -linear_to_db(inverse);
}

GsnrProfile gsnr_profile(const PathPhysics& path) {
  GsnrProfile out;
  if (path.spans.empty()) throw std::invalid_argument("path has no spans");
  const std::size_t n = path.spans.front().channels();
  out.gsnr_db.resize(n);
  out.span_snr.assign(n, std::vector<double>(path.spans.size()));
  for (std::size_t i = 0; i < n; ++i) {
    out.gsnr_db[i] = gsnr(path, i);
    for (std::size_t s = 0; s < path.spans.size(); ++s) out.span_snr[i][s] = path.spans[s].snr(i);
  }
  return out;
}

double gsnr_of_identical_spans(double span_snr, int spans, double snr_trx_db) {
  if (spans < 1) throw std::invalid_argument("need at least one span");
  if (!(span_snr > 0.0)) throw GsnrDomainError("non-positive span SNR", 0);
  return -linear_to_db(spans / span_snr + trx_inverse(snr_trx_db));
}

}  // namespace clband
