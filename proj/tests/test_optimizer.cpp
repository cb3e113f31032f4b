#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "clband/optimizer.hpp"
#include "clband/units.hpp"
#include "support.hpp"

namespace clband {
namespace {

const UniformPowerModel& linear_model() {
  static const UniformPowerModel model = [] {
    PhysicsSettings s;
    s.grid.c_channels = 2;
    s.grid.l_channels = 2;
    s.fiber.gamma_per_w_per_km = 0.0;
    return make_uniform_power_model(s, 1, test::shared_cache());
  }();
  return model;
}

TEST(ChannelOptimum, AseOnlyPicksUpperBound) {
  const auto& model = linear_model();
  for (int ch = 0; ch < model.grid().size(); ++ch) {
    const auto opt = per_channel_optimum(model, ch, model.format(3), 10, -5.0, 5.0);
    EXPECT_DOUBLE_EQ(opt.power_dbm, 5.0);
  }
}

TEST(ChannelOptimum, GoldenMatchesDenseGrid) {
  const auto& model = test::small_model();
  for (int ch : {0, model.grid().worst_c_channel()}) {
    const auto opt = per_channel_optimum(model, ch, model.format(4), 10, -5.0, 5.0);
    double best_p = -5.0, best_g = -1e300;
    for (int k = 0; k <= 10000; ++k) {
      const double p = -5.0 + 0.001 * k;
      const double g = model.gsnr_db(p, model.format(4), ch, 10);
      if (g > best_g) {
        best_g = g;
        best_p = p;
      }
    }
    EXPECT_NEAR(opt.power_dbm, best_p, 0.02);
    EXPECT_NEAR(opt.gsnr_db, best_g, 1e-3);
  }
}

TEST(Reach, MatchesLinearScan) {
  for (double snr_db : {15.0, 22.0, 31.0}) {
    const double snr = db_to_linear(snr_db);
    for (double req : {6.79 + 2, 13.71 + 2, 22.54 + 2}) {
      int expected = 0;
      for (int n = 1; n <= 2000; ++n) {
        if (gsnr_of_identical_spans(snr, n, 36.0) >= req) expected = n;
      }
      EXPECT_EQ(reach_from_span_snr(snr, 36.0, req, 2000), expected);
    }
  }
}

TEST(Reach, ThresholdAboveTransceiverGivesZero) {
  EXPECT_EQ(reach_from_span_snr(db_to_linear(60.0), 36.0, 40.0, 4096), 0);
  const auto& model = test::small_model();
  ModulationFormat hard = model.format(6);
  hard.snr_threshold_db = 40.0;
  EXPECT_EQ(max_reach(model, 0, hard, 0.0, 0.0, 4096), 0);
}

TEST(Pso, SingleChannelMatchesGolden) {
  const auto& model = test::small_model();
  const int ch = model.grid().worst_c_channel();
  const auto golden = per_channel_optimum(model, ch, model.format(1), 20, -5.0, 5.0, 0.001);
  OptimizationProblem p;
  p.channels = {ch};
  p.formats = {1};
  p.n_span = {20};
  p.p_min_dbm = -5.0;
  p.p_max_dbm = 5.0;
  p.seed = 11;
  const auto table = optimize_band_power(model, p);
  EXPECT_NEAR(table.optimum_power_dbm, golden.power_dbm, 0.05);
}

TEST(Pso, CollapsedBoundsReturnThePoint) {
  const auto& model = test::small_model();
  OptimizationProblem p;
  p.formats = {1};
  p.n_span = {1};
  p.p_min_dbm = 0.25;
  p.p_max_dbm = 0.25;
  EXPECT_DOUBLE_EQ(optimize_band_power(model, p).optimum_power_dbm, 0.25);
}

TEST(Pso, InfeasibleReportsViolations) {
  const auto& model = test::small_model();
  OptimizationProblem p;
  p.formats = {2, 6};
  p.n_span = {1, 100000};
  p.p_min_dbm = -1.0;
  p.p_max_dbm = 1.0;
  try {
    optimize_band_power(model, p);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    ASSERT_FALSE(e.violations().empty());
    EXPECT_EQ(e.violations().size(), static_cast<std::size_t>(model.grid().size()));
    for (const auto& v : e.violations()) EXPECT_EQ(v.second, 6);
  }
}

// On the 8 + 8 plan the L band is limited by its noise figure rather than by
// ISRS, so span targets taken from the C band only hold there.
OptimizationProblem c_band_problem(const UniformPowerModel& model, std::uint64_t seed) {
  auto p = default_problem(model, OptimizerSettings{}, seed, 1);
  p.channels = model.grid().band_indices(Band::C);
  return p;
}

TEST(Pso, DeterministicAndSeedStable) {
  const auto& model = test::small_model();
  std::vector<double> powers;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto a = optimize_band_power(model, c_band_problem(model, seed));
    const auto b = optimize_band_power(model, c_band_problem(model, seed));
    EXPECT_EQ(mrd_table_to_json(a).dump(), mrd_table_to_json(b).dump());
    powers.push_back(a.optimum_power_dbm);
  }
  const auto [lo, hi] = std::minmax_element(powers.begin(), powers.end());
  EXPECT_LE(*hi - *lo, 0.1);
}

TEST(Pso, OptimumSatisfiesEveryTarget) {
  const auto& model = test::small_model();
  const OptimizerSettings settings;
  const auto problem = c_band_problem(model, 3);
  const auto table = optimize_band_power(model, problem);
  EXPECT_GE(table.optimum_power_dbm, problem.p_min_dbm);
  EXPECT_LE(table.optimum_power_dbm, problem.p_max_dbm);
  EXPECT_LE(evaluate_power(model, problem, table.optimum_power_dbm).worst_violation_db, 0.0);
  for (std::size_t k = 0; k < problem.formats.size(); ++k) {
    const auto& fmt = model.format(problem.formats[k]);
    for (int ch : problem.channels) {
      EXPECT_GE(model.gsnr_db(table.optimum_power_dbm, fmt, ch, problem.n_span[k]) -
                    settings.aging_margin_db,
                fmt.snr_threshold_db);
    }
  }
}

TEST(Pso, CounterUniformInRangeAndKeyed) {
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = counter_uniform(5, i / 100, i % 100, 0);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
  EXPECT_EQ(counter_uniform(1, 2, 3, 4), counter_uniform(1, 2, 3, 4));
  EXPECT_NE(counter_uniform(1, 2, 3, 4), counter_uniform(1, 2, 3, 5));
}

TEST(MrdTable, Invariants) {
  const auto& model = test::small_model();
  const auto t = mrd_table_at(model, 0.0, 2.0, 4096);
  ASSERT_EQ(t.per_format.size(), 6u);
  for (const auto& row : t.per_channel) {
    for (std::size_t m = 1; m < row.size(); ++m) EXPECT_LE(row[m], row[m - 1]);
  }
  for (const auto& f : t.per_format) {
    int lowest = 1 << 30;
    for (const auto& row : t.per_channel) lowest = std::min(lowest, row[static_cast<std::size_t>(f.m - 1)]);
    EXPECT_EQ(f.reach_spans, lowest);
    EXPECT_EQ(t.per_channel[static_cast<std::size_t>(f.worst_channel)][static_cast<std::size_t>(f.m - 1)],
              lowest);
  }
}

TEST(MrdTable, JsonRoundTrip) {
  const auto& model = test::small_model();
  const auto t = mrd_table_at(model, -0.5, 2.0, 4096);
  const auto back = mrd_table_from_json(nlohmann::json::parse(mrd_table_to_json(t).dump()));
  EXPECT_EQ(mrd_table_to_json(back).dump(), mrd_table_to_json(t).dump());
  auto bad = mrd_table_to_json(t);
  bad["per_format"].erase(2);
  EXPECT_ANY_THROW(mrd_table_from_json(bad));
}

TEST(ChannelByChannel, OptimaWithinExpectedWindow) {
  const auto& model = test::full_model();
  const auto cbc = channel_by_channel(model, OptimizerSettings{}, 0);
  const auto& grid = model.grid();
  std::vector<double> c_mean;
  for (int ch : grid.band_indices(Band::C)) {
    double sum = 0.0;
    for (double p : cbc.power_dbm[static_cast<std::size_t>(ch)]) {
      EXPECT_GT(p, -2.0);
      EXPECT_LT(p, 2.0);
      sum += p;
    }
    c_mean.push_back(sum / kFormatCount);
  }
  // Averaged optimum falls with channel number, i.e. rises with frequency,
  // across the C band.
  EXPECT_LT(c_mean.front(), c_mean.back());
  for (int n : cbc.n_span) EXPECT_GE(n, 1);
}

TEST(MrdTable, ReachFallsWithFrequencyInC) {
  const auto& model = test::full_model();
  const auto t = mrd_table_at(model, -0.15, 2.0, 4096);
  const auto c = model.grid().band_indices(Band::C);
  // The last few channels below the upper band edge see less cross-channel
  // NLI and are excluded from the strict ordering.
  const std::size_t edge = 4;
  for (int m = 1; m <= kFormatCount; ++m) {
    const auto k = static_cast<std::size_t>(m - 1);
    for (std::size_t i = 1; i + edge < c.size(); ++i) {
      EXPECT_LE(t.per_channel[static_cast<std::size_t>(c[i])][k],
                t.per_channel[static_cast<std::size_t>(c[i - 1])][k])
          << "m=" << m << " channel " << c[i];
    }
    int worst_c = 1 << 30;
    for (int ch : c) worst_c = std::min(worst_c, t.per_channel[static_cast<std::size_t>(ch)][k]);
    for (int ch : model.grid().band_indices(Band::L)) {
      EXPECT_GE(t.per_channel[static_cast<std::size_t>(ch)][k], worst_c);
    }
  }
}

}  // namespace
}  // namespace clband
