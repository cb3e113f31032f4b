#pragma once

#include <span>
#include <stdexcept>

#include "clband/grid.hpp"

namespace clband {

struct NliOptions {
  double rel_tol = 2e-3;         // target relative error of the double integral
  double tail_fraction = 1e-3;   // truncation target for the hyperbolic tails, per outer node
  double max_tail_fraction = 1e-2;
  int z_segments = 16;           // piecewise-exponential segments of the link kernel
  double far_phase_rad = 12.566370614359172;  // |dbeta| L beyond which the kernel is phase-averaged
  int max_outer_intervals = 20000;
  int max_inner_depth = 14;
  double noise_bandwidth_hz = 0.0;  // 0 selects the grid's channel bandwidth
  double xci_kurtosis_weight = 0.5; // weight of the excess-kurtosis correction on XCI; 0 = pure GN
};

// NLI coefficient of one channel on one span. `eta` includes the
// modulation-format correction, the three components are the Gaussian
// (GN) split into self-, cross- and multi-channel interference.
struct NliCoefficient {
  double eta = 0.0;  // 1/W^2
  double eta_sci = 0.0;
  double eta_xci = 0.0;
  double eta_mci = 0.0;
  double error_estimate = 0.0;  // absolute, 1/W^2
  double tail_bound = 0.0;      // absolute bound on the truncated tails, 1/W^2
  long evaluations = 0;

  double eta_gaussian() const { return eta_sci + eta_xci + eta_mci; }
};

class NliConvergenceError : public std::runtime_error {
 public:
  NliConvergenceError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const { return estimate_; }
  double error() const { return error_; }

 private:
  double estimate_;
  double error_;
};

// Gaussian-noise NLI coefficient of `channel` for one span under ISRS,
//   G_NLI(f_i) = 16/27 gamma^2 \iint G(f1) G(f2) G(f1+f2-f_i) |LK(f1,f2,f_i)|^2 df1 df2,
//   eta = G_NLI(f_i) B / P_i^3,
// with the link kernel LK built from the closed-form ISRS power profile.
// Returns the Gaussian components; `eta` equals their sum.
NliCoefficient compute_nli_gaussian(const ChannelGrid& grid, const FiberParams& fiber,
                                    std::span<const double> launch_w, int channel,
                                    const NliOptions& options = {});

// Applies the excess-kurtosis correction of `format` to a Gaussian estimate.
double modulated_eta(const NliCoefficient& gaussian, const ModulationFormat& format,
                     double xci_kurtosis_weight);

NliCoefficient compute_nli_coefficient(const ChannelGrid& grid, const FiberParams& fiber,
                                       std::span<const double> launch_w, int channel,
                                       const ModulationFormat& format,
                                       const NliOptions& options = {});

}  // namespace clband
