#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "clband/nli.hpp"
#include "clband/units.hpp"
#include "support.hpp"

namespace clband {
namespace {

// Midpoint rule for the single-channel GN integral without ISRS, where
// |LK|^2 = |1 - exp((-a + j db) L)|^2 / (a^2 + db^2).
double rectangle_rule_eta(const ChannelGrid& g, const FiberParams& f, double p_w,
                          double bandwidth_hz, int n) {
  const double rs = g.symbol_rate_hz();
  const double h = rs / n;
  const double a = f.alpha_per_m(Band::C);
  const double len = f.span_length_m();
  const double b2 = f.beta2_s2_per_m();
  const double b3 = f.beta3_s3_per_m();
  const double decay = std::exp(-a * len);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f1 = -rs / 2 + (i + 0.5) * h;
    for (int k = 0; k < n; ++k) {
      const double f2 = -rs / 2 + (k + 0.5) * h;
      if (std::abs(f1 + f2) > rs / 2) continue;
      const double db = -4 * kPi * kPi * f1 * f2 * (b2 + kPi * b3 * (f1 + f2));
      const double phase = db * len;
      const double re = 1 - decay * std::cos(phase);
      const double im = -decay * std::sin(phase);
      sum += (re * re + im * im) / (a * a + db * db);
    }
  }
  const double psd = p_w / rs;
  const double gamma = f.gamma_per_w_per_m();
  const double g_nli = 16.0 / 27.0 * gamma * gamma * psd * psd * psd * sum * h * h;
  return g_nli * bandwidth_hz / (p_w * p_w * p_w);
}

TEST(Nli, ZeroGammaGivesZero) {
  const ChannelGrid g = build_grid(4, 4, 191.3, 12.5, 500.0);
  FiberParams f;
  f.gamma_per_w_per_km = 0.0;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), 1e-3);
  for (int ch = 0; ch < g.size(); ++ch) {
    const auto c = compute_nli_coefficient(g, f, launch, ch, default_formats()[3]);
    EXPECT_EQ(c.eta, 0.0);
  }
}

TEST(Nli, SingleChannelMatchesDenseRectangleRule) {
  const ChannelGrid g = build_grid(1, 0, 193.4, 12.5, 500.0);
  FiberParams f;
  f.raman_slope_per_w_per_km_per_thz = 0.0;
  const double p = 1e-3;
  const double b = g.channel_bandwidth_hz();
  const auto c = compute_nli_gaussian(g, f, std::vector<double>{p}, 0);
  const double coarse = rectangle_rule_eta(g, f, p, b, 1024);
  const double dense = rectangle_rule_eta(g, f, p, b, 4096);
  EXPECT_NEAR(c.eta_gaussian() / dense, 1.0, 0.02);
  EXPECT_NEAR(coarse / dense, 1.0, 0.02);
  EXPECT_GT(c.eta_sci, 0.0);
  EXPECT_EQ(c.eta_xci, 0.0);
  EXPECT_EQ(c.eta_mci, 0.0);
}

TEST(Nli, PowerScalingInvarianceWithoutRaman) {
  const ChannelGrid g = build_grid(4, 4, 191.3, 12.5, 500.0);
  FiberParams f;
  f.raman_slope_per_w_per_km_per_thz = 0.0;
  const std::vector<double> low(static_cast<std::size_t>(g.size()), 1e-4);
  const std::vector<double> high(static_cast<std::size_t>(g.size()), 3e-3);
  for (int ch : {0, 3, 7}) {
    const auto a = compute_nli_gaussian(g, f, low, ch);
    const auto b = compute_nli_gaussian(g, f, high, ch);
    EXPECT_NEAR(a.eta_gaussian() / b.eta_gaussian(), 1.0, 1e-9);
  }
}

TEST(Nli, RamanMakesEtaDependOnPower) {
  const ChannelGrid g = build_grid(4, 4, 191.3, 12.5, 500.0);
  const FiberParams f;
  const std::vector<double> low(static_cast<std::size_t>(g.size()), 1e-4);
  const std::vector<double> high(static_cast<std::size_t>(g.size()), 3e-3);
  const int top = g.worst_c_channel();
  EXPECT_LT(compute_nli_gaussian(g, f, high, top).eta_gaussian(),
            compute_nli_gaussian(g, f, low, top).eta_gaussian());
}

TEST(Nli, DeterministicForFixedSettings) {
  const ChannelGrid g = build_grid(4, 4, 191.3, 12.5, 500.0);
  const FiberParams f;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), 1e-3);
  const auto a = compute_nli_gaussian(g, f, launch, 5);
  const auto b = compute_nli_gaussian(g, f, launch, 5);
  EXPECT_EQ(a.eta_sci, b.eta_sci);
  EXPECT_EQ(a.eta_xci, b.eta_xci);
  EXPECT_EQ(a.eta_mci, b.eta_mci);
}

TEST(Nli, ModulationCorrection) {
  NliCoefficient c;
  c.eta_sci = 1.0;
  c.eta_xci = 2.0;
  c.eta_mci = 0.5;
  ModulationFormat gaussian;
  gaussian.excess_kurtosis = 0.0;
  EXPECT_DOUBLE_EQ(modulated_eta(c, gaussian, 0.5), 3.5);
  ModulationFormat qpsk;
  qpsk.excess_kurtosis = -1.0;
  EXPECT_DOUBLE_EQ(modulated_eta(c, qpsk, 0.5), 1.0 + 0.5 + 2.0 * 0.5);
  EXPECT_DOUBLE_EQ(modulated_eta(c, qpsk, 0.0), 3.5);
  for (const auto& fmt : default_formats()) {
    EXPECT_GE(modulated_eta(c, fmt, 0.5), 0.0);
    EXPECT_LE(modulated_eta(c, fmt, 0.5), c.eta_gaussian());
  }
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TEST(Nli, SeesawOppositeToAseInCBand) {
  const auto& model = test::full_model();
  const auto span = model.span(-0.15, model.format(4));
  std::vector<double> f, ase_db, eta_db;
  for (int ch : model.grid().band_indices(Band::C)) {
    f.push_back(model.grid().channel(ch).center_thz());
    ase_db.push_back(linear_to_db(span.p_ase_w[static_cast<std::size_t>(ch)]));
    eta_db.push_back(linear_to_db(span.eta[static_cast<std::size_t>(ch)]));
  }
  const double s_ase = slope(f, ase_db);
  const double s_eta = slope(f, eta_db);
  EXPECT_GT(s_ase, 0.0);
  EXPECT_LT(s_eta, 0.0);
}

}  // namespace
}  // namespace clband
