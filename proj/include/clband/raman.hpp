#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "clband/grid.hpp"

namespace clband {

// Per-channel power evolution along one span.
struct PowerProfile {
  double span_length_km = 0.0;
  std::vector<double> z_km;                  // sample positions, z_km.front() == 0
  std::vector<double> launch_w;              // per channel
  std::vector<double> received_w;            // per channel, at z = span_length
  std::vector<std::vector<double>> samples;  // samples[k][i]: channel i at z_km[k]

  double total_at(std::size_t k) const;
};

class RamanIntegrationError : public std::runtime_error {
 public:
  RamanIntegrationError(const std::string& what, double z_km)
      : std::runtime_error(what), z_km_(z_km) {}
  double z_km() const { return z_km_; }

 private:
  double z_km_;
};

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol_w = 1e-18;
  double min_step_m = 1e-6;
  int max_steps = 1'000'000;
};

// Integrates the coupled triangular-ISRS power equations
//   dP_i/dz = -alpha_i P_i + P_i * sum_j Cr (f_j - f_i) P_j
// with an adaptive Dormand-Prince 5(4) stepper. The profile is sampled at
// `z_samples` equally spaced points including both span ends.
PowerProfile solve_raman_ode(const ChannelGrid& grid, const FiberParams& fiber,
                             std::span<const double> launch_w, int z_samples,
                             const OdeOptions& options = {});

// Same span, lossless or not, with an explicit span length override (km).
PowerProfile solve_raman_ode(const ChannelGrid& grid, const FiberParams& fiber,
                             std::span<const double> launch_w, int z_samples, double length_km,
                             const OdeOptions& options = {});

// Closed-form solution of the triangular ISRS equations, referenced to the
// power-weighted centre of gravity of the launched spectrum.
std::vector<double> closed_form_power(const ChannelGrid& grid, const FiberParams& fiber,
                                      std::span<const double> launch_w, double z_km);

// Closed-form profile over [0, z_km] with `z_samples` points (>= 2).
PowerProfile closed_form_profile(const ChannelGrid& grid, const FiberParams& fiber,
                                 std::span<const double> launch_w, double z_km,
                                 int z_samples = 2);

// Normalised power profile rho(z, f) = P(z, f) / P(0, f) of the closed form,
// evaluated for arbitrary frequencies. Used inside the NLI kernel.
class IsrsProfile {
 public:
  IsrsProfile(const ChannelGrid& grid, const FiberParams& fiber, std::span<const double> launch_w);

  // ln rho(z, f) for frequency f given relative to the grid's centre of gravity (Hz).
  double log_rho(double z_m, double f_rel_hz) const;

  // ln rho(z, f) is affine in f: intercept - slope * f_rel_hz.
  struct LogRhoLine {
    double intercept = 0.0;
    double slope = 0.0;
  };
  LogRhoLine log_rho_line(double z_m) const;

  double total_power_w() const { return total_w_; }
  double alpha_per_m() const { return alpha_; }

 private:
  double effective_length(double z_m) const;
  double log_denominator(double z_m) const;

  std::vector<double> f_rel_;  // per channel, relative to the power-weighted centre
  std::vector<double> launch_;
  double shift_ = 0.0;  // power-weighted centre minus the grid centre of gravity
  double total_w_ = 0.0;
  double alpha_ = 0.0;
  double cr_ = 0.0;
};

void validate_launch(std::span<const double> launch_w, std::size_t channels);

// Power-weighted mean attenuation (1/m) across the launched channels.
double mean_alpha_per_m(const ChannelGrid& grid, const FiberParams& fiber,
                        std::span<const double> launch_w);

}  // namespace clband
