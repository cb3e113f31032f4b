#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "clband/gsnr.hpp"
#include "clband/units.hpp"
#include "support.hpp"

namespace clband {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SpanTerms ase_only_span(double p_w, double ase_w) {
  SpanTerms s;
  s.launch_w = {p_w};
  s.eta = {0.0};
  s.p_ase_w = {ase_w};
  return s;
}

TEST(Gsnr, SingleSpanAseOnly) {
  PathPhysics path{{ase_only_span(1e-3, 6.5e-7)}, kInf};
  EXPECT_NEAR(gsnr(path, 0), 10 * std::log10(1e-3 / 6.5e-7), 1e-12);
  EXPECT_NEAR(gsnr(path, 0), 31.9, 0.05);
}

TEST(Gsnr, TwoSpansLoseThreeDb) {
  PathPhysics one{{ase_only_span(1e-3, 6.5e-7)}, kInf};
  PathPhysics two{{ase_only_span(1e-3, 6.5e-7), ase_only_span(1e-3, 6.5e-7)}, kInf};
  EXPECT_NEAR(gsnr(two, 0) - gsnr(one, 0), -10 * std::log10(2.0), 1e-9);
  EXPECT_NEAR(gsnr(two, 0) - gsnr(one, 0), -3.01, 0.001);
}

TEST(Gsnr, InverseAdditivity) {
  SpanTerms a;
  a.launch_w = {1e-3, 2e-3};
  a.eta = {500.0, 800.0};
  a.p_ase_w = {3e-7, 5e-7};
  SpanTerms b = a;
  b.eta = {900.0, 100.0};
  b.p_ase_w = {1e-7, 9e-7};
  const PathPhysics pa{{a}, kInf}, pb{{b}, kInf}, pab{{a, b}, kInf};
  for (std::size_t ch = 0; ch < 2; ++ch) {
    const double inv = 1 / db_to_linear(gsnr(pa, ch)) + 1 / db_to_linear(gsnr(pb, ch));
    EXPECT_NEAR(gsnr(pab, ch), linear_to_db(1 / inv), 1e-9);
  }
}

TEST(Gsnr, TransceiverCeiling) {
  for (double ase : {1e-9, 1e-12, 1e-15, 1e-18}) {
    PathPhysics path{{ase_only_span(1e-3, ase)}, 36.0};
    EXPECT_LT(gsnr(path, 0), 36.0);
  }
  PathPhysics quiet{{ase_only_span(1e-3, 1e-12)}, 36.0};
  EXPECT_NEAR(gsnr(quiet, 0), 36.0, 0.01);
}

TEST(Gsnr, DepletionIsDomainError) {
  SpanTerms s = ase_only_span(1.0, 1e-6);
  s.eta = {2.0};
  PathPhysics path{{ase_only_span(1e-3, 1e-6), s}, 36.0};
  try {
    gsnr(path, 0);
    FAIL() << "expected GsnrDomainError";
  } catch (const GsnrDomainError& e) {
    EXPECT_EQ(e.span(), 1u);
  }
}

TEST(Gsnr, ProfileAgreesWithSingleChannel) {
  SpanTerms a;
  a.launch_w = {1e-3, 2e-3, 5e-4};
  a.eta = {500.0, 800.0, 100.0};
  a.p_ase_w = {3e-7, 5e-7, 2e-7};
  const PathPhysics path{{a, a, a}, 36.0};
  const auto prof = gsnr_profile(path);
  ASSERT_EQ(prof.gsnr_db.size(), 3u);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    EXPECT_EQ(prof.gsnr_db[ch], gsnr(path, ch));
    ASSERT_EQ(prof.span_snr[ch].size(), 3u);
    EXPECT_DOUBLE_EQ(prof.span_snr[ch][0], a.snr(ch));
    EXPECT_NEAR(prof.gsnr_db[ch], gsnr_of_identical_spans(a.snr(ch), 3, 36.0), 1e-12);
  }
}

TEST(Gsnr, StrictlyDecreasingInSpans) {
  const auto& model = test::small_model();
  for (int ch = 0; ch < model.grid().size(); ++ch) {
    double prev = kInf;
    for (int n = 1; n <= 40; ++n) {
      const double g = model.gsnr_db(0.0, model.format(4), ch, n);
      EXPECT_LT(g, prev);
      EXPECT_LE(g, 36.0);
      prev = g;
    }
  }
}

TEST(Gsnr, AseOnlyIncreasesWithPower) {
  const ChannelGrid g = build_grid(1, 0, 193.4, 12.5, 500.0);
  double prev = -kInf;
  for (double p = -10.0; p <= 5.0; p += 0.5) {
    PathPhysics path{{ase_only_span(dbm_to_watt(p), 6.5e-7)}, 36.0};
    const double v = gsnr(path, 0);
    EXPECT_GT(v, prev);
    EXPECT_LT(v, 36.0);
    prev = v;
  }
}

TEST(Gsnr, SweepWindowEnforced) {
  const auto& model = test::small_model();
  EXPECT_THROW(gsnr_sweep_power(model, model.format(4), 0, 10, {-11.0}), std::domain_error);
  EXPECT_THROW(gsnr_sweep_power(model, model.format(4), 0, 10, {5.5}), std::domain_error);
}

TEST(Gsnr, SweepIsUnimodalOnDefaultPath) {
  const auto& model = test::full_model();
  const int ch = model.grid().worst_c_channel();
  std::vector<double> powers;
  for (int k = 0; k <= 150; ++k) powers.push_back(-10.0 + 0.1 * k);
  const auto g = gsnr_sweep_power(model, model.format(4), ch, 10, powers);
  int changes = 0;
  for (std::size_t k = 2; k < g.size(); ++k) {
    if ((g[k] - g[k - 1] > 0) != (g[k - 1] - g[k - 2] > 0)) ++changes;
  }
  EXPECT_EQ(changes, 1);
  const auto best = std::max_element(g.begin(), g.end()) - g.begin();
  EXPECT_GT(best, 0);
  EXPECT_LT(best, static_cast<long>(g.size()) - 1);
}

TEST(Gsnr, CoarseSweepPeaksNearZeroDbm) {
  const auto& model = test::full_model();
  const int ch = model.grid().worst_c_channel();
  const std::vector<double> powers{-2.15, -1.15, -0.15, 0.85, 1.85};
  const auto g = gsnr_sweep_power(model, model.format(4), ch, 10, powers);
  EXPECT_EQ(std::max_element(g.begin(), g.end()) - g.begin(), 2);
}

TEST(Gsnr, TenSpanProfileClearsSixteenQam) {
  const auto& model = test::full_model();
  const auto prof = gsnr_profile(model.path(-0.15, model.format(4), 10));
  const auto& grid = model.grid();
  for (int ch = 0; ch < grid.size(); ++ch) {
    EXPECT_GE(prof.gsnr_db[static_cast<std::size_t>(ch)], 16.54) << "channel " << ch;
  }
  // C band is ASE-limited: GSNR falls towards its high-frequency edge.
  const auto c = grid.band_indices(Band::C);
  EXPECT_LT(prof.gsnr_db[static_cast<std::size_t>(c.back())],
            prof.gsnr_db[static_cast<std::size_t>(c[c.size() / 2])]);
}

}  // namespace
}  // namespace clband
