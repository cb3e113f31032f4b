#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "clband/amplifier.hpp"
#include "clband/raman.hpp"
#include "clband/units.hpp"

namespace clband {
namespace {

double db_ratio(double a, double b) { return linear_to_db(a / b); }

// Fixed-step RK4 on the same coupled equations.
std::vector<double> rk4_reference(const ChannelGrid& g, const FiberParams& f,
                                  std::vector<double> p, double length_m, double step_m) {
  const std::size_t n = p.size();
  auto rhs = [&](const std::vector<double>& x) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        gain += f.raman_slope_si() * (g.channel(static_cast<int>(j)).center_hz -
                                      g.channel(static_cast<int>(i)).center_hz) *
                x[j];
      }
      d[i] = x[i] * (-f.alpha_per_m(g.channel(static_cast<int>(i)).band) + gain);
    }
    return d;
  };
  const long steps = std::lround(length_m / step_m);
  std::vector<double> t(n);
  for (long s = 0; s < steps; ++s) {
    const auto k1 = rhs(p);
    for (std::size_t i = 0; i < n; ++i) t[i] = p[i] + 0.5 * step_m * k1[i];
    const auto k2 = rhs(t);
    for (std::size_t i = 0; i < n; ++i) t[i] = p[i] + 0.5 * step_m * k2[i];
    const auto k3 = rhs(t);
    for (std::size_t i = 0; i < n; ++i) t[i] = p[i] + step_m * k3[i];
    const auto k4 = rhs(t);
    for (std::size_t i = 0; i < n; ++i) p[i] += step_m / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return p;
}

// One C and one L channel whose centres are 5 THz apart.
ChannelGrid two_channels_5thz() { return build_grid(1, 1, 193.0, 12.5, 4925.0); }

TEST(Raman, SingleChannelLosesSpanLoss) {
  const ChannelGrid g = build_grid(1, 0, 193.4, 12.5, 500.0);
  const FiberParams f;
  for (double p : {1e-4, 1e-3, 0.1}) {
    const std::vector<double> launch{p};
    const auto ode = solve_raman_ode(g, f, launch, 5);
    EXPECT_NEAR(db_ratio(ode.received_w[0], p), -14.0, 1e-8);
    const auto cf = closed_form_power(g, f, launch, 70.0);
    EXPECT_NEAR(db_ratio(cf[0], p), -14.0, 1e-10);
  }
}

TEST(Raman, AdaptiveMatchesFineRk4) {
  const ChannelGrid g = two_channels_5thz();
  ASSERT_NEAR(g.channel(1).center_hz - g.channel(0).center_hz, 5e12, 1.0);
  const FiberParams f;
  const std::vector<double> launch{10e-3, 10e-3};
  const auto ode = solve_raman_ode(g, f, launch, 2);
  const auto ref = rk4_reference(g, f, launch, 70e3, 1.0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(db_ratio(ode.received_w[i], ref[i]), 0.0, 0.01);
  }
  EXPECT_GT(ode.received_w[0], ode.received_w[1]);
}

TEST(Raman, ClosedFormConservesTotalPower) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  const FiberParams f;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), dbm_to_watt(0.0));
  const auto prof = closed_form_profile(g, f, launch, 70.0, 20);
  const double p0 = prof.total_at(0);
  for (std::size_t k = 0; k < prof.z_km.size(); ++k) {
    const double expected = p0 * std::exp(-f.alpha_per_m(Band::C) * prof.z_km[k] * 1e3);
    EXPECT_NEAR(prof.total_at(k) / expected, 1.0, 1e-9) << "z=" << prof.z_km[k];
  }
}

TEST(Raman, LosslessOdeConservesTotalPower) {
  const ChannelGrid g = build_grid(16, 16, 191.3, 12.5, 500.0);
  FiberParams f;
  f.attenuation_db_per_km = 0.0;
  f.attenuation_l_db_per_km = 0.0;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), dbm_to_watt(3.0));
  const auto prof = solve_raman_ode(g, f, launch, 20);
  const double p0 = prof.total_at(0);
  for (std::size_t k = 0; k < prof.z_km.size(); ++k) {
    EXPECT_NEAR(prof.total_at(k) / p0, 1.0, 1e-6);
  }
  EXPECT_GT(prof.received_w.front(), prof.received_w.back());
}

TEST(Raman, ZeroSlopeIsFlatAttenuation) {
  const ChannelGrid g = build_grid(8, 8, 191.3, 12.5, 500.0);
  FiberParams f;
  f.raman_slope_per_w_per_km_per_thz = 0.0;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), 2e-3);
  const auto cf = closed_form_power(g, f, launch, 35.0);
  for (double p : cf) EXPECT_NEAR(db_ratio(p, 2e-3), -7.0, 1e-10);
}

TEST(Raman, ZeroDistanceReturnsLaunch) {
  const ChannelGrid g = build_grid(8, 8, 191.3, 12.5, 500.0);
  const FiberParams f;
  std::vector<double> launch;
  for (int i = 0; i < g.size(); ++i) launch.push_back(1e-3 * (1 + i % 3));
  const auto cf = closed_form_power(g, f, launch, 0.0);
  for (std::size_t i = 0; i < cf.size(); ++i) EXPECT_DOUBLE_EQ(cf[i], launch[i]);
}

TEST(Raman, MonotoneTiltAtEverySample) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  const FiberParams f;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), dbm_to_watt(0.0));
  const auto prof = solve_raman_ode(g, f, launch, 8);
  for (std::size_t k = 1; k < prof.samples.size(); ++k) {
    for (std::size_t i = 1; i < prof.samples[k].size(); ++i) {
      EXPECT_LE(prof.samples[k][i], prof.samples[k][i - 1]);
    }
  }
}

TEST(Raman, ClosedFormTracksOdeAtOptimumPower) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  const FiberParams f;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), dbm_to_watt(-0.15));
  const auto ode = solve_raman_ode(g, f, launch, 2);
  const auto cf = closed_form_power(g, f, launch, 70.0);
  for (std::size_t i = 0; i < cf.size(); ++i) {
    EXPECT_LT(std::abs(db_ratio(cf[i], ode.received_w[i])), 0.2);
  }
}

TEST(Raman, SampleDoublingIsStable) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  const FiberParams f;
  const std::vector<double> launch(static_cast<std::size_t>(g.size()), dbm_to_watt(0.0));
  const auto a = solve_raman_ode(g, f, launch, 20);
  const auto b = solve_raman_ode(g, f, launch, 40);
  for (std::size_t i = 0; i < a.received_w.size(); ++i) {
    EXPECT_LT(std::abs(db_ratio(a.received_w[i], b.received_w[i])), 1e-3);
  }
}

TEST(Raman, RejectsBadLaunch) {
  const ChannelGrid g = build_grid(2, 0, 193.0, 12.5, 500.0);
  const FiberParams f;
  EXPECT_THROW(solve_raman_ode(g, f, std::vector<double>{0.0, 0.0}, 2), std::invalid_argument);
  EXPECT_THROW(solve_raman_ode(g, f, std::vector<double>{1e-3, -1e-3}, 2), std::invalid_argument);
  EXPECT_THROW(solve_raman_ode(g, f, std::vector<double>{1e-3, NAN}, 2), std::invalid_argument);
}

TEST(Ase, DirectArithmetic) {
  const ChannelGrid g = build_grid(1, 0, 193.4 - 0.0375, 12.5, 500.0);
  const Channel& ch = g.channel(0);
  ASSERT_NEAR(ch.center_thz(), 193.4, 1e-9);
  const AmplifierParams amp;
  const double expected = kPlanck * 193.4e12 * std::pow(10.0, 0.45) * (std::pow(10.0, 1.4) - 1) * 75e9;
  const auto ase = compute_ase_power(ch, amp, db_to_linear(14.0), 75e9);
  EXPECT_NEAR(ase.p_ase_w / expected, 1.0, 1e-12);
  EXPECT_NEAR(ase.p_ase_w, 6.5e-7, 0.05e-7);
  EXPECT_NEAR(watt_to_dbm(ase.p_ase_w), -31.9, 0.1);
}

TEST(Ase, UnityGainGivesZero) {
  const ChannelGrid g = build_grid(1, 0, 193.4, 12.5, 500.0);
  EXPECT_EQ(compute_ase_power(g.channel(0), AmplifierParams{}, 1.0, 75e9).p_ase_w, 0.0);
  EXPECT_THROW(compute_ase_power(g.channel(0), AmplifierParams{}, 0.99, 75e9), std::invalid_argument);
}

TEST(Ase, LinearInNoiseFigure) {
  const ChannelGrid g = build_grid(1, 0, 193.4, 12.5, 500.0);
  AmplifierParams a;
  AmplifierParams b;
  b.noise_figure_c_db = 6.0;
  const double ga = compute_ase_power(g.channel(0), a, 25.0, 75e9).p_ase_w;
  const double gb = compute_ase_power(g.channel(0), b, 25.0, 75e9).p_ase_w;
  EXPECT_NEAR(gb / ga, std::pow(10.0, 0.15), 1e-12);
  EXPECT_GT(compute_ase_power(g.channel(0), a, 30.0, 75e9).p_ase_w, ga);
}

}  // namespace
}  // namespace clband
