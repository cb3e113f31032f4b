#include "clband/raman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace clband {

double PowerProfile::total_at(std::size_t k) const {
  const auto& s = samples.at(k);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

void validate_launch(std::span<const double> launch_w, std::size_t channels) {
  if (launch_w.size() != channels) {
    throw std::invalid_argument("launch power vector size does not match the grid");
  }
  bool any = false;
  for (double p : launch_w) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("launch powers must be finite and non-negative");
    }
    any = any || p > 0.0;
  }
  if (!any) throw std::invalid_argument("at least one channel must be active");
}

double mean_alpha_per_m(const ChannelGrid& grid, const FiberParams& fiber,
                        std::span<const double> launch_w) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& ch : grid.channels()) {
    const double p = launch_w[static_cast<std::size_t>(ch.index)];
    num += p * fiber.alpha_per_m(ch.band);
    den += p;
  }
  return den > 0.0 ? num / den : fiber.alpha_per_m(Band::C);
}

namespace {

struct RamanSystem {
  std::vector<double> alpha;  // 1/m per channel
  std::vector<double> f;      // Hz, relative
  double cr = 0.0;            // 1/(W m Hz)

  void derivative(const std::vector<double>& p, std::vector<double>& dp) const {
    double sum_p = 0.0;
    double sum_fp = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      sum_p += p[i];
      sum_fp += f[i] * p[i];
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      dp[i] = -alpha[i] * p[i] + p[i] * cr * (sum_fp - f[i] * sum_p);
    }
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class DormandPrince {
 public:
  DormandPrince(const RamanSystem& sys, const OdeOptions& opt, std::size_t n)
      : sys_(sys), opt_(opt), k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n), k7_(n), tmp_(n),
        next_(n) {}

  // Advances y from z to z_end, updating the carried step size h.
  void advance(std::vector<double>& y, double& z, double z_end, double& h, int& steps) {
    sys_.derivative(y, k1_);
    while (z < z_end) {
      if (++steps > opt_.max_steps) {
        throw RamanIntegrationError("Raman ODE exceeded the step budget", z / 1e3);
      }
      const bool last = z + h >= z_end;
      const double step = last ? z_end - z : h;
      const double err = attempt(y, step);
      if (!std::isfinite(err)) {
        throw RamanIntegrationError("Raman ODE produced a non-finite state", z / 1e3);
      }
      if (err <= 1.0) {
        z = last ? z_end : z + step;
        y.swap(next_);
        k1_.swap(k7_);  // first-same-as-last
        const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        if (!last) h = step * grow;
      } else {
        h = step * std::max(0.1, 0.9 * std::pow(err, -0.2));
        if (h < opt_.min_step_m) {
          throw RamanIntegrationError("Raman ODE step size underflow", z / 1e3);
        }
      }
    }
  }

 private:
  double attempt(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    sys_.derivative(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    sys_.derivative(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    sys_.derivative(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    sys_.derivative(tmp_, k5_);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                            a65 * k5_[i]);
    sys_.derivative(tmp_, k6_);
    for (std::size_t i = 0; i < n; ++i)
      next_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
    sys_.derivative(next_, k7_);

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double scale = opt_.abs_tol_w + opt_.rel_tol * std::max(std::abs(y[i]), std::abs(next_[i]));
      norm = std::max(norm, std::abs(e) / scale);
    }
    return norm;
  }

  const RamanSystem& sys_;
  const OdeOptions& opt_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, next_;
};

}  // namespace

PowerProfile solve_raman_ode(const ChannelGrid& grid, const FiberParams& fiber,
                             std::span<const double> launch_w, int z_samples,
                             const OdeOptions& options) {
  return solve_raman_ode(grid, fiber, launch_w, z_samples, fiber.span_length_km, options);
}

PowerProfile solve_raman_ode(const ChannelGrid& grid, const FiberParams& fiber,
                             std::span<const double> launch_w, int z_samples, double length_km,
                             const OdeOptions& options) {
  fiber.validate();
  validate_launch(launch_w, static_cast<std::size_t>(grid.size()));
  if (z_samples < 2) throw std::invalid_argument("need at least two z samples");
  if (!(length_km > 0.0) || !std::isfinite(length_km)) {
    throw std::invalid_argument("span length must be positive");
  }

  RamanSystem sys;
  sys.cr = fiber.raman_slope_si();
  for (const auto& ch : grid.channels()) {
    sys.alpha.push_back(fiber.alpha_per_m(ch.band));
    sys.f.push_back(ch.relative_hz);
  }

  PowerProfile out;
  out.span_length_km = length_km;
  out.launch_w.assign(launch_w.begin(), launch_w.end());
  std::vector<double> y = out.launch_w;
  out.z_km.push_back(0.0);
  out.samples.push_back(y);

  DormandPrince stepper(sys, options, y.size());
  const double length_m = length_km * 1e3;
  double z = 0.0;
  double h = std::min(100.0, length_m / (z_samples - 1));
  int steps = 0;
  for (int k = 1; k < z_samples; ++k) {
    const double z_end = length_m * k / (z_samples - 1);
    stepper.advance(y, z, z_end, h, steps);
    out.z_km.push_back(z_end / 1e3);
    out.samples.push_back(y);
  }
  out.received_w = y;
  return out;
}

IsrsProfile::IsrsProfile(const ChannelGrid& grid, const FiberParams& fiber,
                         std::span<const double> launch_w) {
  validate_launch(launch_w, static_cast<std::size_t>(grid.size()));
  launch_.assign(launch_w.begin(), launch_w.end());
  total_w_ = std::accumulate(launch_.begin(), launch_.end(), 0.0);
  double weighted = 0.0;
  for (const auto& ch : grid.channels()) {
    weighted += launch_[static_cast<std::size_t>(ch.index)] * ch.relative_hz;
  }
  shift_ = weighted / total_w_;
  for (const auto& ch : grid.channels()) f_rel_.push_back(ch.relative_hz - shift_);
  alpha_ = mean_alpha_per_m(grid, fiber, launch_w);
  cr_ = fiber.raman_slope_si();
}

double IsrsProfile::effective_length(double z_m) const {
  if (alpha_ * z_m < 1e-12) return z_m;
  return -std::expm1(-alpha_ * z_m) / alpha_;
}

double IsrsProfile::log_denominator(double z_m) const {
  // ln sum_j P_j exp(-a f_j), shifted by the largest exponent for stability.
  const double a = total_w_ * cr_ * effective_length(z_m);
  double top = -1e300;
  for (std::size_t j = 0; j < launch_.size(); ++j) {
    if (launch_[j] > 0.0) top = std::max(top, -a * f_rel_[j]);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < launch_.size(); ++j) {
    if (launch_[j] > 0.0) sum += launch_[j] * std::exp(-a * f_rel_[j] - top);
  }
  return top + std::log(sum);
}

IsrsProfile::LogRhoLine IsrsProfile::log_rho_line(double z_m) const {
  const double a = total_w_ * cr_ * effective_length(z_m);
  return {-alpha_ * z_m + std::log(total_w_) + a * shift_ - log_denominator(z_m), a};
}

double IsrsProfile::log_rho(double z_m, double f_rel_hz) const {
  const auto line = log_rho_line(z_m);
  return line.intercept - line.slope * f_rel_hz;
}

std::vector<double> closed_form_power(const ChannelGrid& grid, const FiberParams& fiber,
                                      std::span<const double> launch_w, double z_km) {
  fiber.validate();
  validate_launch(launch_w, static_cast<std::size_t>(grid.size()));
  if (!(z_km >= 0.0) || !std::isfinite(z_km)) throw std::invalid_argument("z must be >= 0");
  std::vector<double> out(launch_w.begin(), launch_w.end());
  if (z_km == 0.0) return out;

  const IsrsProfile isrs(grid, fiber, launch_w);
  const double z_m = z_km * 1e3;
  const double alpha_mean = isrs.alpha_per_m();
  for (const auto& ch : grid.channels()) {
    const auto i = static_cast<std::size_t>(ch.index);
    if (out[i] == 0.0) continue;
    // The ISRS factor carries the mean attenuation; swap in the channel's own.
    const double log_gain = isrs.log_rho(z_m, ch.relative_hz) + alpha_mean * z_m -
                            fiber.alpha_per_m(ch.band) * z_m;
    out[i] = launch_w[i] * std::exp(log_gain);
  }
  return out;
}

PowerProfile closed_form_profile(const ChannelGrid& grid, const FiberParams& fiber,
                                 std::span<const double> launch_w, double z_km, int z_samples) {
  if (z_samples < 2) throw std::invalid_argument("need at least two z samples");
  PowerProfile out;
  out.span_length_km = z_km;
  out.launch_w.assign(launch_w.begin(), launch_w.end());
  for (int k = 0; k < z_samples; ++k) {
    const double z = z_km * k / (z_samples - 1);
    out.z_km.push_back(z);
    out.samples.push_back(closed_form_power(grid, fiber, launch_w, z));
  }
  out.received_w = out.samples.back();
  return out;
}

}  // namespace clband
