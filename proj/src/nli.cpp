#include "clband/nli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "clband/raman.hpp"
#include "clband/units.hpp"

namespace clband {

namespace {

// Gauss-Kronrod 7/15 (QUADPACK qk15), nodes on [0, 1] mirrored.
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329,
                                        0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926,
                                        0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013,
                                        0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245,
                                        0.0};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970,
                                        0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518,
                                        0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550,
                                        0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649,
                                        0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082,
                                       0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975,
                                       0.417959183673469387755102040816327};

struct Rule {
  double kronrod = 0.0;
  double gauss = 0.0;
};

// Applies the 15-point rule to f on [a, b]; f(x) may be evaluated at 15 points.
template <typename F>
Rule kronrod15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  Rule r{kWgk[7] * fc, kWg[3] * fc};
  for (int k = 0; k < 7; ++k) {
    const double dx = half * kXgk[static_cast<std::size_t>(k)];
    const double sum = f(mid - dx) + f(mid + dx);
    r.kronrod += kWgk[static_cast<std::size_t>(k)] * sum;
    if (k % 2 == 1) r.gauss += kWg[static_cast<std::size_t>(k / 2)] * sum;
  }
  r.kronrod *= half;
  r.gauss *= half;
  return r;
}

// Rectangular per-channel PSD blocks, relative frequency (Hz), sorted.
struct Spectrum {
  std::vector<double> lo, hi, psd;
  std::vector<int> channel;
  std::vector<double> edges;

  int locate(double f) const {
    const auto it = std::upper_bound(lo.begin(), lo.end(), f);
    if (it == lo.begin()) return -1;
    const auto k = static_cast<std::size_t>(it - lo.begin() - 1);
    return f <= hi[k] ? static_cast<int>(k) : -1;
  }
};

Spectrum make_spectrum(const ChannelGrid& grid, std::span<const double> launch_w) {
  Spectrum s;
  const double half = 0.5 * grid.symbol_rate_hz();
  for (const auto& ch : grid.channels()) {
    const double p = launch_w[static_cast<std::size_t>(ch.index)];
    if (p <= 0.0) continue;
    s.lo.push_back(ch.relative_hz - half);
    s.hi.push_back(ch.relative_hz + half);
    s.psd.push_back(p / grid.symbol_rate_hz());
    s.channel.push_back(ch.index);
    s.edges.push_back(ch.relative_hz - half);
    s.edges.push_back(ch.relative_hz + half);
  }
  std::sort(s.edges.begin(), s.edges.end());
  return s;
}

class LinkKernel {
 public:
  LinkKernel(const IsrsProfile& isrs, double length_m, int segments, double beta2, double beta3)
      : length_(length_m), dz_(length_m / segments), beta2_(beta2), beta3_(beta3) {
    for (int k = 0; k <= segments; ++k) {
      const auto line = isrs.log_rho_line(dz_ * k);
      intercept_.push_back(line.intercept);
      slope_.push_back(line.slope);
    }
    h_.resize(intercept_.size());
    lh_.resize(intercept_.size());
  }

  double beta_eff(double f_sum) const { return beta2_ + kPi * beta3_ * f_sum; }
  double length() const { return length_; }

  double log_h(std::size_t k, double f3) const { return intercept_[k] - slope_[k] * f3; }

  // |LK|^2 for the exact piecewise-exponential kernel.
  double exact(double dbeta, double f3) const {
    const std::size_t n = intercept_.size();
    for (std::size_t k = 0; k < n; ++k) {
      lh_[k] = log_h(k, f3);
      h_[k] = std::exp(lh_[k]);
    }
    const std::complex<double> rot = std::polar(1.0, dbeta * dz_);
    std::complex<double> phase(1.0, 0.0);
    std::complex<double> lk(0.0, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::complex<double> x(lh_[k] - lh_[k + 1], -dbeta * dz_);
      const std::complex<double> e_k = h_[k] * phase;
      phase *= rot;
      if (std::abs(x) < 1e-3) {
        lk += e_k * dz_ * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
      } else {
        lk += (e_k - h_[k + 1] * phase) * dz_ / x;
      }
    }
    return std::norm(lk);
  }

  // Phase-averaged |LK|^2, valid once |dbeta| L spans many oscillations.
  double averaged(double dbeta, double f3) const {
    const std::size_t last = intercept_.size() - 1;
    const double l0 = log_h(0, f3);
    const double l1 = log_h(last, f3);
    const double b = (l0 - l1) / length_;
    return (std::exp(2.0 * l0) + std::exp(2.0 * l1)) / (b * b + dbeta * dbeta);
  }

  // Upper bound of h(0)^2 + h(L)^2 over [f_low, f_high].
  double squared_ends_bound(double f_low, double f_high) const {
    const std::size_t last = intercept_.size() - 1;
    double best = 0.0;
    for (double f : {f_low, f_high}) {
      best = std::max(best, std::exp(2.0 * log_h(0, f)) + std::exp(2.0 * log_h(last, f)));
    }
    return best;
  }

 private:
  double length_;
  double dz_;
  double beta2_;
  double beta3_;
  std::vector<double> intercept_;
  std::vector<double> slope_;
  mutable std::vector<double> h_;
  mutable std::vector<double> lh_;
};

struct Components {
  double sci = 0.0;
  double xci = 0.0;
  double mci = 0.0;
  double err = 0.0;
  double tail = 0.0;
  double total() const { return sci + xci + mci; }
};

class NliIntegrator {
 public:
  NliIntegrator(const Spectrum& spectrum, const LinkKernel& kernel, double alpha, double fi,
                int channel, const NliOptions& opt, double tail_fraction)
      : s_(spectrum), kernel_(kernel), alpha_(alpha), fi_(fi), channel_(channel), opt_(opt),
        tail_fraction_(tail_fraction) {
    psd_max_ = *std::max_element(s_.psd.begin(), s_.psd.end());
    ends_bound_ = kernel_.squared_ends_bound(s_.lo.front(), s_.hi.back());
  }

  long evaluations() const { return evaluations_; }

  // Inner integral over v at fixed u (f1 = fi + u), restricted to |v| <= |u|.
  Components inner(double u, int block1) {
    Components out;
    const double au = std::abs(u);
    if (au == 0.0) return out;
    const double g1 = s_.psd[static_cast<std::size_t>(block1)];
    const double k = 4.0 * kPi * kPi * std::abs(kernel_.beta_eff(2.0 * fi_ + u)) * au;

    double width = au;
    double v_far = std::numeric_limits<double>::infinity();
    double mapping = std::numeric_limits<double>::infinity();
    if (k > 0.0) {
      const double v_trunc = 2.0 * alpha_ / (kPi * k * tail_fraction_);
      if (v_trunc < width) {
        out.tail = 2.0 * g1 * psd_max_ * psd_max_ * ends_bound_ / (k * k) *
                   (1.0 / v_trunc - 1.0 / width);
        width = v_trunc;
      }
      v_far = opt_.far_phase_rad / (kernel_.length() * k);
      mapping = alpha_ / k;
    }

    breaks_.clear();
    breaks_.push_back(-width);
    breaks_.push_back(width);
    breaks_.push_back(0.0);
    if (v_far < width) {
      breaks_.push_back(-v_far);
      breaks_.push_back(v_far);
    }
    add_edges(fi_, -width, width);
    add_edges(fi_ + u, -width, width);
    std::sort(breaks_.begin(), breaks_.end());

    for (std::size_t p = 0; p + 1 < breaks_.size(); ++p) {
      const double a = breaks_[p];
      const double b = breaks_[p + 1];
      if (b - a <= 0.0) continue;
      const double mid = 0.5 * (a + b);
      const int block2 = s_.locate(fi_ + mid);
      const int block3 = s_.locate(fi_ + u + mid);
      if (block2 < 0 || block3 < 0) continue;
      const double weight = g1 * s_.psd[static_cast<std::size_t>(block2)] *
                            s_.psd[static_cast<std::size_t>(block3)];
      const bool far = std::abs(mid) > v_far;
      double err = 0.0;
      const double value = piece(u, a, b, mapping, far, err);

      const int c1 = s_.channel[static_cast<std::size_t>(block1)];
      const int c2 = s_.channel[static_cast<std::size_t>(block2)];
      const int c3 = s_.channel[static_cast<std::size_t>(block3)];
      double* slot = &out.mci;
      if (c1 == channel_ && c2 == channel_ && c3 == channel_) {
        slot = &out.sci;
      } else if ((c2 == channel_ && c1 == c3) || (c1 == channel_ && c2 == c3)) {
        slot = &out.xci;
      }
      *slot += weight * value;
      out.err += weight * err;
    }
    return out;
  }

 private:
  void add_edges(double offset, double lo, double hi) {
    auto it = std::upper_bound(s_.edges.begin(), s_.edges.end(), offset + lo);
    for (; it != s_.edges.end() && *it < offset + hi; ++it) breaks_.push_back(*it - offset);
  }

  double integrand(double u, double v, bool far) {
    ++evaluations_;
    const double f3 = fi_ + u + v;
    const double dbeta = -4.0 * kPi * kPi * u * v * kernel_.beta_eff(2.0 * fi_ + u + v);
    return far ? kernel_.averaged(dbeta, f3) : kernel_.exact(dbeta, f3);
  }

  // Integral of |LK|^2 over v in [a, b], using v = w tan(theta) to flatten
  // the Lorentzian ridge along v = 0 when w is finite.
  double piece(double u, double a, double b, double w, bool far, double& err) {
    if (!std::isfinite(w) || w > 1e3 * std::max(std::abs(a), std::abs(b))) {
      auto f = [&](double v) { return integrand(u, v, far); };
      return adaptive(f, a, b, 0, err);
    }
    auto f = [&](double theta) {
      const double v = w * std::tan(theta);
      return integrand(u, v, far) * (w + v * v / w);
    };
    return adaptive(f, std::atan(a / w), std::atan(b / w), 0, err);
  }

  template <typename F>
  double adaptive(F& f, double a, double b, int depth, double& err) {
    const Rule r = kronrod15(f, a, b);
    const double e = std::abs(r.kronrod - r.gauss);
    if (e <= opt_.rel_tol * 0.25 * std::abs(r.kronrod) || depth >= opt_.max_inner_depth) {
      err += e;
      return r.kronrod;
    }
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, depth + 1, err) + adaptive(f, mid, b, depth + 1, err);
  }

  const Spectrum& s_;
  const LinkKernel& kernel_;
  double alpha_;
  double fi_;
  int channel_;
  const NliOptions& opt_;
  double tail_fraction_;
  double psd_max_ = 0.0;
  double ends_bound_ = 0.0;
  long evaluations_ = 0;
  std::vector<double> breaks_;
};

struct OuterInterval {
  double a = 0.0;
  double b = 0.0;
  int block = 0;
  Components value;
  double err = 0.0;
  bool operator<(const OuterInterval& other) const { return err < other.err; }
};

OuterInterval evaluate_outer(NliIntegrator& integ, double a, double b, int block) {
  OuterInterval iv{a, b, block, {}, 0.0};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double gauss = 0.0;
  double inner_err = 0.0;
  auto accumulate = [&](double u, double wk, double wg) {
    const Components c = integ.inner(u, block);
    iv.value.sci += wk * c.sci;
    iv.value.xci += wk * c.xci;
    iv.value.mci += wk * c.mci;
    iv.value.tail += wk * c.tail;
    inner_err += wk * c.err;
    gauss += wg * c.total();
  };
  accumulate(mid, kWgk[7], kWg[3]);
  for (int k = 0; k < 7; ++k) {
    const double dx = half * kXgk[static_cast<std::size_t>(k)];
    const double wg = k % 2 == 1 ? kWg[static_cast<std::size_t>(k / 2)] : 0.0;
    accumulate(mid - dx, kWgk[static_cast<std::size_t>(k)], wg);
    accumulate(mid + dx, kWgk[static_cast<std::size_t>(k)], wg);
  }
  iv.value.sci *= half;
  iv.value.xci *= half;
  iv.value.mci *= half;
  iv.value.tail *= half;
  iv.err = std::abs(iv.value.total() - gauss * half) + inner_err * half;
  return iv;
}

Components integrate(const Spectrum& spectrum, const LinkKernel& kernel, double alpha,
                     double fi, int channel, const NliOptions& opt, double tail_fraction,
                     long& evaluations) {
  NliIntegrator integ(spectrum, kernel, alpha, fi, channel, opt, tail_fraction);
  std::priority_queue<OuterInterval> queue;
  Components total;
  double total_err = 0.0;
  auto push = [&](double a, double b, int block) {
    OuterInterval iv = evaluate_outer(integ, a, b, block);
    total.sci += iv.value.sci;
    total.xci += iv.value.xci;
    total.mci += iv.value.mci;
    total.tail += iv.value.tail;
    total_err += iv.err;
    queue.push(iv);
  };

  for (std::size_t j = 0; j < spectrum.lo.size(); ++j) {
    const double a = spectrum.lo[j] - fi;
    const double b = spectrum.hi[j] - fi;
    const int block = static_cast<int>(j);
    if (a < 0.0 && b > 0.0) {
      // Geometric refinement towards u = 0 inside the channel under test.
      std::vector<double> cuts = {a, 0.0, b};
      for (int level = 1; level <= 8; ++level) {
        const double scale = std::ldexp(1.0, -level);
        cuts.push_back(a * scale);
        cuts.push_back(b * scale);
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) push(cuts[c], cuts[c + 1], block);
    } else {
      push(a, b, block);
    }
  }

  int intervals = static_cast<int>(queue.size());
  while (total_err > opt.rel_tol * std::abs(total.total()) && !queue.empty()) {
    if (intervals >= opt.max_outer_intervals) {
      evaluations = integ.evaluations();
      throw NliConvergenceError("NLI quadrature did not converge", total.total(), total_err);
    }
    const OuterInterval worst = queue.top();
    queue.pop();
    total.sci -= worst.value.sci;
    total.xci -= worst.value.xci;
    total.mci -= worst.value.mci;
    total.tail -= worst.value.tail;
    total_err -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    push(worst.a, mid, worst.block);
    push(mid, worst.b, worst.block);
    ++intervals;
  }
  total.err = std::max(total_err, 0.0);
  evaluations = integ.evaluations();
  return total;
}

}  // namespace

NliCoefficient compute_nli_gaussian(const ChannelGrid& grid, const FiberParams& fiber,
                                    std::span<const double> launch_w, int channel,
                                    const NliOptions& options) {
  fiber.validate();
  validate_launch(launch_w, static_cast<std::size_t>(grid.size()));
  if (channel < 0 || channel >= grid.size()) throw std::out_of_range("channel index out of range");
  const double p_i = launch_w[static_cast<std::size_t>(channel)];
  if (!(p_i > 0.0)) throw std::invalid_argument("NLI requested for an inactive channel");
  if (options.z_segments < 1) throw std::invalid_argument("need at least one z segment");

  NliCoefficient out;
  const double gamma = fiber.gamma_per_w_per_m();
  if (gamma == 0.0) return out;

  const Spectrum spectrum = make_spectrum(grid, launch_w);
  const IsrsProfile isrs(grid, fiber, launch_w);
  const LinkKernel kernel(isrs, fiber.span_length_m(), options.z_segments, fiber.beta2_s2_per_m(),
                          fiber.beta3_s3_per_m());
  const double fi = grid.channel(channel).relative_hz;
  const double bandwidth =
      options.noise_bandwidth_hz > 0.0 ? options.noise_bandwidth_hz : grid.channel_bandwidth_hz();
  // Both halves of the (u, v) plane, then the GN prefactor and normalisation.
  const double scale = 2.0 * (16.0 / 27.0) * gamma * gamma * bandwidth / (p_i * p_i * p_i);

  double tail_fraction = options.tail_fraction;
  for (int attempt = 0;; ++attempt) {
    long evaluations = 0;
    const Components c = integrate(spectrum, kernel, isrs.alpha_per_m(), fi, channel, options,
                                   tail_fraction, evaluations);
    out.eta_sci = scale * c.sci;
    out.eta_xci = scale * c.xci;
    out.eta_mci = scale * c.mci;
    out.error_estimate = scale * c.err;
    out.tail_bound = scale * c.tail;
    out.evaluations += evaluations;
    out.eta = out.eta_gaussian();
    if (out.tail_bound <= options.max_tail_fraction * out.eta || attempt >= 4) break;
    tail_fraction *= 0.25;
  }
  if (out.tail_bound > options.max_tail_fraction * out.eta) {
    throw NliConvergenceError("NLI tail bound exceeds the allowed fraction", out.eta,
                              out.tail_bound);
  }
  return out;
}

double modulated_eta(const NliCoefficient& gaussian, const ModulationFormat& format,
                     double xci_kurtosis_weight) {
  const double factor = std::max(0.0, 1.0 + xci_kurtosis_weight * format.excess_kurtosis);
  return gaussian.eta_sci + gaussian.eta_mci + factor * gaussian.eta_xci;
}

NliCoefficient compute_nli_coefficient(const ChannelGrid& grid, const FiberParams& fiber,
                                       std::span<const double> launch_w, int channel,
                                       const ModulationFormat& format,
                                       const NliOptions& options) {
  NliCoefficient out = compute_nli_gaussian(grid, fiber, launch_w, channel, options);
  out.eta = modulated_eta(out, format, options.xci_kurtosis_weight);
  return out;
}

}  // namespace clband
