#include "clband/amplifier.hpp"

#include <cmath>

#include "clband/units.hpp"

namespace clband {

AsePower compute_ase_power(const Channel& channel, const AmplifierParams& amplifier,
                           double gain_linear, double bandwidth_hz) {
  if (!std::isfinite(gain_linear) || gain_linear < 1.0) {
    throw std::invalid_argument("amplifier gain must be >= 1 (0 dB)");
  }
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise bandwidth must be positive");
  const double nf = db_to_linear(amplifier.noise_figure_db(channel.band));
  return {kPlanck * channel.center_hz * nf * (gain_linear - 1.0) * bandwidth_hz};
}

}  // namespace clband
