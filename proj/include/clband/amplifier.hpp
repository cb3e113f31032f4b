#pragma once

#include <stdexcept>

#include "clband/grid.hpp"

namespace clband {

struct AsePower {
  double p_ase_w = 0.0;
};

// ASE power of one in-line EDFA over `bandwidth_hz`:
//   P_ASE = h f NF (G - 1) B
// with the noise figure taken from the channel's band. Throws for G < 1.
AsePower compute_ase_power(const Channel& channel, const AmplifierParams& amplifier,
                           double gain_linear, double bandwidth_hz);

}  // namespace clband
