#include "clband/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clband/parallel.hpp"
#include "clband/units.hpp"

namespace clband {

using nlohmann::json;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> all_channels(const UniformPowerModel& model) {
  std::vector<int> out(static_cast<std::size_t>(model.grid().size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

double required_db(const UniformPowerModel& model, int m, double margin_db) {
  return model.format(m).snr_threshold_db + margin_db;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t iteration, std::uint64_t particle,
                       std::uint64_t stream) {
  std::uint64_t h = splitmix(stream);
  h = splitmix(h ^ particle);
  h = splitmix(h ^ iteration);
  h = splitmix(h ^ seed);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

ChannelOptimum per_channel_optimum(const UniformPowerModel& model, int channel,
                                   const ModulationFormat& format, int spans, double p_min_dbm,
                                   double p_max_dbm, double tolerance_db) {
  if (spans < 1) throw std::invalid_argument("need at least one span");
  if (p_min_dbm > p_max_dbm) throw std::invalid_argument("empty power window");
  if (!(tolerance_db > 0.0)) throw std::invalid_argument("tolerance must be positive");
  auto f = [&](double p) { return model.gsnr_db(p, format, channel, spans); };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = p_min_dbm;
  double b = p_max_dbm;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance_db) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ChannelOptimum best{fc >= fd ? c : d, std::max(fc, fd)};
  // Monotone objectives peak at a window edge, which the bracket only approaches.
  for (double edge : {p_min_dbm, p_max_dbm}) {
    const double fe = f(edge);
    if (fe > best.gsnr_db) best = {edge, fe};
  }
  return best;
}

int reach_from_span_snr(double span_snr, double snr_trx_db, double required, int max_spans) {
  if (!(span_snr > 0.0)) return 0;
  auto ok = [&](int n) { return gsnr_of_identical_spans(span_snr, n, snr_trx_db) >= required; };
  if (!ok(1)) return 0;
  int lo = 1;
  int hi = 2;
  while (hi <= max_spans && ok(hi)) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, max_spans + 1);
  // Invariant: ok(lo) and (hi > max_spans or !ok(hi)).
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

int max_reach(const UniformPowerModel& model, int channel, const ModulationFormat& format,
              double p_dbm, double margin_db, int max_spans) {
  const SpanTerms t = model.span(p_dbm, format);
  const auto ch = static_cast<std::size_t>(channel);
  const double p = t.launch_w.at(ch);
  if (p * p * p * t.eta[ch] >= p) return 0;
  return reach_from_span_snr(t.snr(ch), model.settings().transceiver.snr_trx_db,
                             format.snr_threshold_db + margin_db, max_spans);
}

ChannelByChannel channel_by_channel(const UniformPowerModel& model,
                                    const OptimizerSettings& settings, int jobs) {
  const auto nc = static_cast<std::size_t>(model.grid().size());
  ChannelByChannel out;
  out.power_dbm.assign(nc, std::vector<double>(kFormatCount));
  out.reach.assign(nc, std::vector<int>(kFormatCount));
  parallel_for(nc, jobs, [&](std::size_t i) {
    const int ch = static_cast<int>(i);
    for (int m = 1; m <= kFormatCount; ++m) {
      const auto& fmt = model.format(m);
      const ChannelOptimum opt = per_channel_optimum(model, ch, fmt, 1, settings.search_min_dbm,
                                                     settings.search_max_dbm,
                                                     settings.golden_tolerance_db);
      out.power_dbm[i][static_cast<std::size_t>(m - 1)] = opt.power_dbm;
      out.reach[i][static_cast<std::size_t>(m - 1)] =
          max_reach(model, ch, fmt, opt.power_dbm, settings.aging_margin_db,
                    settings.max_reach_spans);
    }
  });
  out.n_span.assign(kFormatCount, std::numeric_limits<int>::max());
  for (int ch : model.grid().band_indices(Band::C)) {
    for (std::size_t k = 0; k < out.n_span.size(); ++k) {
      out.n_span[k] = std::min(out.n_span[k], out.reach[static_cast<std::size_t>(ch)][k]);
    }
  }
  out.p_min_dbm = std::numeric_limits<double>::infinity();
  out.p_max_dbm = -std::numeric_limits<double>::infinity();
  for (const auto& row : out.power_dbm) {
    for (double p : row) {
      out.p_min_dbm = std::min(out.p_min_dbm, p);
      out.p_max_dbm = std::max(out.p_max_dbm, p);
    }
  }
  return out;
}

OptimizationProblem default_problem(const ChannelByChannel& cbc,
                                    const OptimizerSettings& settings, std::uint64_t seed,
                                    int jobs) {
  OptimizationProblem problem;
  for (int m = 1; m <= kFormatCount; ++m) {
    problem.formats.push_back(m);
    problem.n_span.push_back(std::max(1, cbc.n_span[static_cast<std::size_t>(m - 1)]));
  }
  problem.p_min_dbm = cbc.p_min_dbm;
  problem.p_max_dbm = cbc.p_max_dbm;
  problem.swarm = settings;
  problem.seed = seed;
  problem.jobs = jobs;
  return problem;
}

OptimizationProblem default_problem(const UniformPowerModel& model,
                                    const OptimizerSettings& settings, std::uint64_t seed,
                                    int jobs) {
  return default_problem(channel_by_channel(model, settings, jobs), settings, seed, jobs);
}

Evaluation evaluate_power(const UniformPowerModel& model, const OptimizationProblem& problem,
                          double p_dbm) {
  const auto snr = model.span_snr_all_formats(p_dbm);
  const std::vector<int> channels =
      problem.channels.empty() ? all_channels(model) : problem.channels;
  const double trx = model.settings().transceiver.snr_trx_db;
  Evaluation e;
  e.worst_violation_db = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < problem.formats.size(); ++k) {
    const int m = problem.formats[k];
    const double req = required_db(model, m, problem.swarm.aging_margin_db);
    for (int ch : channels) {
      const double s = snr[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(ch)];
      if (!(s > 0.0)) {
        e.worst_violation_db = std::numeric_limits<double>::infinity();
        e.fitness = -std::numeric_limits<double>::max();
        return e;
      }
      const double g = gsnr_of_identical_spans(s, problem.n_span[k], trx);
      e.gsnr_sum_db += g;
      e.worst_violation_db = std::max(e.worst_violation_db, req - g);
    }
  }
  e.fitness = e.gsnr_sum_db - problem.swarm.penalty_per_db * std::max(0.0, e.worst_violation_db);
  return e;
}

MrdTable mrd_table_at(const UniformPowerModel& model, double p_dbm, double margin_db,
                      int max_spans) {
  const auto snr = model.span_snr_all_formats(p_dbm);
  const auto nc = static_cast<std::size_t>(model.grid().size());
  const double trx = model.settings().transceiver.snr_trx_db;
  MrdTable t;
  t.optimum_power_dbm = p_dbm;
  t.per_channel.assign(nc, std::vector<int>(kFormatCount));
  for (int m = 1; m <= kFormatCount; ++m) {
    const auto& row = snr[static_cast<std::size_t>(m - 1)];
    const double req = required_db(model, m, margin_db);
    FormatReach fr;
    fr.m = m;
    fr.reach_spans = std::numeric_limits<int>::max();
    double worst_snr = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nc; ++i) {
      const int r = reach_from_span_snr(row[i], trx, req, max_spans);
      t.per_channel[i][static_cast<std::size_t>(m - 1)] = r;
      fr.reach_spans = std::min(fr.reach_spans, r);
      if (row[i] < worst_snr) {
        worst_snr = row[i];
        fr.worst_channel = static_cast<int>(i);
      }
    }
    t.per_format.push_back(fr);
  }
  return t;
}

MrdTable optimize_band_power(const UniformPowerModel& model, const OptimizationProblem& problem) {
  const auto& sw = problem.swarm;
  if (problem.p_min_dbm > problem.p_max_dbm) throw std::invalid_argument("P_min exceeds P_max");
  if (sw.particles < 1 || sw.iterations < 0) throw std::invalid_argument("invalid swarm size");
  if (problem.formats.size() != problem.n_span.size()) {
    throw std::invalid_argument("one span target per format is required");
  }
  for (int n : problem.n_span) {
    if (n < 1) throw std::invalid_argument("span targets must be >= 1");
  }
  const double lo = problem.p_min_dbm;
  const double hi = problem.p_max_dbm;
  const double width = hi - lo;
  const double vmax = sw.velocity_clamp_fraction * width;
  const auto np = static_cast<std::size_t>(sw.particles);

  std::vector<double> x(np), v(np), pbest(np);
  std::vector<Evaluation> fx(np), fbest(np);
  for (std::size_t i = 0; i < np; ++i) {
    x[i] = lo + counter_uniform(problem.seed, 0, i, 0) * width;
    v[i] = (2.0 * counter_uniform(problem.seed, 0, i, 1) - 1.0) * vmax;
  }
  auto evaluate_all = [&] {
    parallel_for(np, problem.jobs, [&](std::size_t i) { fx[i] = evaluate_power(model, problem, x[i]); });
  };
  evaluate_all();
  pbest = x;
  fbest = fx;
  std::size_t g = 0;
  for (std::size_t i = 1; i < np; ++i) {
    if (fbest[i].fitness > fbest[g].fitness) g = i;
  }

  for (int it = 1; it <= sw.iterations; ++it) {
    const double gpos = pbest[g];
    for (std::size_t i = 0; i < np; ++i) {
      const auto iter = static_cast<std::uint64_t>(it);
      const double r1 = counter_uniform(problem.seed, iter, i, 2);
      const double r2 = counter_uniform(problem.seed, iter, i, 3);
      v[i] = sw.inertia * v[i] + sw.cognitive * r1 * (pbest[i] - x[i]) +
             sw.social * r2 * (gpos - x[i]);
      v[i] = std::clamp(v[i], -vmax, vmax);
      x[i] += v[i];
      if (x[i] < lo || x[i] > hi) {
        x[i] = std::clamp(x[i], lo, hi);
        v[i] = 0.0;
      }
    }
    evaluate_all();
    for (std::size_t i = 0; i < np; ++i) {
      if (fx[i].fitness > fbest[i].fitness) {
        fbest[i] = fx[i];
        pbest[i] = x[i];
      }
    }
    for (std::size_t i = 0; i < np; ++i) {
      if (fbest[i].fitness > fbest[g].fitness) g = i;
    }
  }

  // Feasibility repair: the returned power must satisfy every threshold.
  double chosen = pbest[g];
  Evaluation chosen_eval = fbest[g];
  if (chosen_eval.worst_violation_db > 0.0) {
    bool found = false;
    auto consider = [&](double p, const Evaluation& e) {
      if (e.worst_violation_db > 0.0) return;
      if (!found || e.gsnr_sum_db > chosen_eval.gsnr_sum_db) {
        found = true;
        chosen = p;
        chosen_eval = e;
      }
    };
    for (std::size_t i = 0; i < np; ++i) consider(pbest[i], fbest[i]);
    if (!found) {
      const int steps = width > 0.0 ? 1000 : 0;
      double least = pbest[g];
      Evaluation least_eval = fbest[g];
      for (int k = 0; k <= steps; ++k) {
        const double p = steps == 0 ? lo : lo + width * k / steps;
        const Evaluation e = evaluate_power(model, problem, p);
        consider(p, e);
        if (e.worst_violation_db < least_eval.worst_violation_db) {
          least = p;
          least_eval = e;
        }
      }
      if (!found) {
        const auto snr = model.span_snr_all_formats(least);
        std::vector<std::pair<int, int>> violations;
        const std::vector<int> channels =
            problem.channels.empty() ? all_channels(model) : problem.channels;
        for (std::size_t k = 0; k < problem.formats.size(); ++k) {
          const int m = problem.formats[k];
          for (int ch : channels) {
            const double s = snr[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(ch)];
            const bool bad =
                !(s > 0.0) || gsnr_of_identical_spans(s, problem.n_span[k],
                                                      model.settings().transceiver.snr_trx_db) <
                                  required_db(model, m, sw.aging_margin_db);
            if (bad) violations.emplace_back(ch, m);
          }
        }
        const std::string what = "no launch power in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "] dBm meets every threshold (" +
                                 std::to_string(violations.size()) + " violating pairs)";
        throw InfeasibleError(what, std::move(violations));
      }
    }
  }

  MrdTable table = mrd_table_at(model, chosen, sw.aging_margin_db, sw.max_reach_spans);
  table.objective = chosen_eval.gsnr_sum_db;
  for (std::size_t k = 0; k < problem.formats.size(); ++k) {
    table.per_format[static_cast<std::size_t>(problem.formats[k] - 1)].n_span = problem.n_span[k];
  }
  return table;
}

json mrd_table_to_json(const MrdTable& table) {
  json formats = json::array();
  for (const auto& f : table.per_format) {
    formats.push_back({{"m", f.m},
                       {"reach_spans", f.reach_spans},
                       {"worst_channel", f.worst_channel},
                       {"n_span", f.n_span}});
  }
  return {{"optimum_power_dbm", table.optimum_power_dbm},
          {"objective_gsnr_sum_db", table.objective},
          {"per_format", formats},
          {"per_channel", table.per_channel}};
}

MrdTable mrd_table_from_json(const json& j) {
  MrdTable t;
  try {
    j.at("optimum_power_dbm").get_to(t.optimum_power_dbm);
    if (j.contains("objective_gsnr_sum_db")) j.at("objective_gsnr_sum_db").get_to(t.objective);
    for (const auto& f : j.at("per_format")) {
      FormatReach r;
      f.at("m").get_to(r.m);
      f.at("reach_spans").get_to(r.reach_spans);
      if (f.contains("worst_channel")) f.at("worst_channel").get_to(r.worst_channel);
      if (f.contains("n_span")) f.at("n_span").get_to(r.n_span);
      t.per_format.push_back(r);
    }
    if (j.contains("per_channel")) j.at("per_channel").get_to(t.per_channel);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed MRD table: ") + e.what());
  }
  if (t.per_format.size() != static_cast<std::size_t>(kFormatCount)) {
    throw ConfigError("MRD table must list all six formats");
  }
  for (std::size_t k = 0; k < t.per_format.size(); ++k) {
    if (t.per_format[k].m != static_cast<int>(k) + 1) {
      throw ConfigError("MRD table formats must be ordered m = 1..6");
    }
  }
  return t;
}

}  // namespace clband
