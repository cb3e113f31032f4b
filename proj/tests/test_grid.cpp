#include <gtest/gtest.h>

#include <numeric>

#include "clband/grid.hpp"

namespace clband {
namespace {

TEST(Grid, DefaultPlanWidths) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  EXPECT_EQ(g.size(), 128);
  EXPECT_NEAR(g.c_band().width_hz(), 4.8e12, 1.0);
  EXPECT_NEAR(g.l_band().width_hz(), 4.8e12, 1.0);
  EXPECT_NEAR(g.c_band().low_hz - g.l_band().high_hz, 500e9, 1.0);
  EXPECT_EQ(g.total_slots(), 768);
}

TEST(Grid, CentersEvenlySpacedWithinBand) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  for (int i = 1; i < g.size(); ++i) {
    const Channel& a = g.channel(i - 1);
    const Channel& b = g.channel(i);
    if (a.band != b.band) continue;
    EXPECT_NEAR(b.center_hz - a.center_hz, 75e9, 1e-3);
  }
}

TEST(Grid, SingleChannelIsItsOwnCentre) {
  const ChannelGrid g = build_grid(1, 0, 193.4, 12.5, 500.0);
  ASSERT_EQ(g.size(), 1);
  EXPECT_EQ(g.channel(0).relative_hz, 0.0);
}

TEST(Grid, ZeroGuardBandRejected) {
  EXPECT_THROW(build_grid(2, 2, 191.3, 12.5, 0.0), GridError);
}

TEST(Grid, DeterministicConstruction) {
  const ChannelGrid a = build_grid(64, 64, 191.3, 12.5, 500.0);
  const ChannelGrid b = build_grid(64, 64, 191.3, 12.5, 500.0);
  ASSERT_EQ(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.channel(i).center_hz, b.channel(i).center_hz);
    EXPECT_EQ(a.channel(i).relative_hz, b.channel(i).relative_hz);
    EXPECT_EQ(a.channel(i).first_slot, b.channel(i).first_slot);
  }
}

TEST(Grid, SlotsCoverPlanOnce) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  std::vector<int> owner(static_cast<std::size_t>(g.total_slots()), -1);
  int total = 0;
  for (const Channel& ch : g.channels()) {
    total += ch.slot_count;
    for (int s = ch.first_slot; s < ch.first_slot + ch.slot_count; ++s) {
      EXPECT_EQ(owner.at(static_cast<std::size_t>(s)), -1);
      owner[static_cast<std::size_t>(s)] = ch.index;
      EXPECT_EQ(g.index_of_slot(s), ch.index);
    }
  }
  EXPECT_EQ(total, 6 * g.size());
}

TEST(Grid, RelativeFrequenciesSumToZero) {
  for (auto [c, l] : {std::pair{64, 64}, std::pair{10, 3}, std::pair{5, 0}}) {
    const ChannelGrid g = build_grid(c, l, 191.3, 12.5, 500.0);
    double sum = 0.0;
    for (const Channel& ch : g.channels()) sum += ch.relative_hz;
    EXPECT_NEAR(sum, 0.0, 1.0);
  }
}

TEST(Grid, ChannelOneIsShortestWavelengthC) {
  const ChannelGrid g = build_grid(64, 64, 191.3, 12.5, 500.0);
  const Channel& one = g.channel(g.worst_c_channel());
  EXPECT_EQ(one.label(), 1);
  EXPECT_EQ(one.band, Band::C);
  EXPECT_EQ(one.first_slot, 0);
  for (const Channel& ch : g.channels()) EXPECT_LE(ch.center_hz, one.center_hz);
  EXPECT_EQ(g.channel(g.index_of_slot(g.c_slots())).band, Band::L);
}

TEST(Thresholds, TableValues) {
  const auto t = snr_threshold_table();
  EXPECT_EQ(t[0], 6.79);
  EXPECT_EQ(t[3], 16.54);
  EXPECT_EQ(t[5], 22.54);
  const auto formats = default_formats();
  ASSERT_EQ(formats.size(), 6u);
  for (std::size_t i = 0; i < formats.size(); ++i) {
    EXPECT_EQ(formats[i].m, static_cast<int>(i) + 1);
    EXPECT_EQ(formats[i].snr_threshold_db, t[i]);
  }
}

TEST(Fiber, RejectsNegativeSlope) {
  FiberParams f;
  f.raman_slope_per_w_per_km_per_thz = -1.0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace clband
