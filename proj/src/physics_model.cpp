#include "clband/physics_model.hpp"

#include <algorithm>
#include <cmath>

#include "clband/amplifier.hpp"
#include "clband/io.hpp"
#include "clband/nli.hpp"
#include "clband/parallel.hpp"
#include "clband/raman.hpp"
#include "clband/units.hpp"

namespace clband {

using nlohmann::json;

namespace {

double noise_bandwidth(const PhysicsSettings& s, const ChannelGrid& grid) {
  return s.nli.noise_bandwidth_hz > 0.0 ? s.nli.noise_bandwidth_hz : grid.channel_bandwidth_hz();
}

void check_power_grid(const std::vector<double>& p) {
  if (p.empty()) throw ConfigError("eta power grid is empty");
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!(p[i] > p[i - 1])) throw ConfigError("eta power grid must be strictly increasing");
  }
}

std::string checksum_of(const json& payload) { return hex64(fnv1a64(payload.dump())); }

}  // namespace

EtaTable tabulate_eta(const PhysicsSettings& settings, int jobs) {
  check_power_grid(settings.eta_power_grid_dbm);
  settings.fiber.validate();
  const ChannelGrid grid = build_grid(settings.grid);
  const std::size_t np = settings.eta_power_grid_dbm.size();
  const auto nc = static_cast<std::size_t>(grid.size());

  EtaTable table;
  table.power_dbm = settings.eta_power_grid_dbm;
  table.sci.assign(np, std::vector<double>(nc));
  table.xci = table.sci;
  table.mci = table.sci;

  parallel_for(np * nc, jobs, [&](std::size_t k) {
    const std::size_t ip = k / nc;
    const std::size_t ic = k % nc;
    const std::vector<double> launch(nc, dbm_to_watt(table.power_dbm[ip]));
    const NliCoefficient c =
        compute_nli_gaussian(grid, settings.fiber, launch, static_cast<int>(ic), settings.nli);
    table.sci[ip][ic] = c.eta_sci;
    table.xci[ip][ic] = c.eta_xci;
    table.mci[ip][ic] = c.eta_mci;
  });
  return table;
}

json eta_table_to_json(const EtaTable& table, const std::string& physics_hash) {
  json payload = {{"physics_hash", physics_hash},
                  {"version", kArtifactVersion},
                  {"power_dbm", table.power_dbm},
                  {"sci", table.sci},
                  {"xci", table.xci},
                  {"mci", table.mci}};
  const std::string sum = checksum_of(payload);
  return {{"payload", std::move(payload)}, {"checksum", sum}};
}

std::optional<EtaTable> eta_table_from_json(const json& doc, const std::string& physics_hash) {
  try {
    const json& payload = doc.at("payload");
    if (doc.at("checksum").get<std::string>() != checksum_of(payload)) return std::nullopt;
    if (payload.at("physics_hash").get<std::string>() != physics_hash) return std::nullopt;
    EtaTable t;
    payload.at("power_dbm").get_to(t.power_dbm);
    payload.at("sci").get_to(t.sci);
    payload.at("xci").get_to(t.xci);
    payload.at("mci").get_to(t.mci);
    const std::size_t np = t.power_dbm.size();
    if (np == 0 || t.sci.size() != np || t.xci.size() != np || t.mci.size() != np) {
      return std::nullopt;
    }
    for (std::size_t i = 0; i < np; ++i) {
      if (t.sci[i].size() != t.channels() || t.xci[i].size() != t.channels() ||
          t.mci[i].size() != t.channels()) {
        return std::nullopt;
      }
    }
    return t;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

EtaTable cached_eta_table(const PhysicsSettings& settings, int jobs, const CacheOptions& cache,
                          CacheOutcome* outcome) {
  auto report = [&](CacheOutcome o) {
    if (outcome) *outcome = o;
  };
  if (!cache.enabled) {
    report(CacheOutcome::Disabled);
    return tabulate_eta(settings, jobs);
  }
  const std::string hash = physics_hash(settings);
  const auto file = cache.dir / ("eta-" + hash + ".json");
  CacheOutcome miss = CacheOutcome::Miss;
  if (std::filesystem::exists(file)) {
    miss = CacheOutcome::Corrupt;
    try {
      const json doc = json::parse(read_file(file));
      if (auto table = eta_table_from_json(doc, hash)) {
        report(CacheOutcome::Hit);
        return *table;
      }
    } catch (const std::exception&) {
    }
  }
  report(miss);
  EtaTable table = tabulate_eta(settings, jobs);
  atomic_write(file, eta_table_to_json(table, hash).dump());
  return table;
}

UniformPowerModel::UniformPowerModel(PhysicsSettings settings, EtaTable table)
    : settings_(std::move(settings)), grid_(build_grid(settings_.grid)), table_(std::move(table)) {
  settings_.fiber.validate();
  check_power_grid(table_.power_dbm);
  if (table_.channels() != static_cast<std::size_t>(grid_.size())) {
    throw ConfigError("eta table does not match the channel grid");
  }
  if (settings_.formats.size() != static_cast<std::size_t>(kFormatCount)) {
    throw ConfigError("format table must list all six formats");
  }
  noise_bandwidth_hz_ = noise_bandwidth(settings_, grid_);
}

const ModulationFormat& UniformPowerModel::format(int m) const {
  if (m < 1 || m > kFormatCount) throw std::out_of_range("format m out of range");
  return settings_.formats[static_cast<std::size_t>(m - 1)];
}

double UniformPowerModel::interpolate(const std::vector<std::vector<double>>& values, int channel,
                                      double p_dbm) const {
  const auto& x = table_.power_dbm;
  const auto ch = static_cast<std::size_t>(channel);
  const std::size_t n = x.size();
  if (n == 1) return values[0][ch];
  const double tol = 1e-12;
  if (p_dbm < x.front() - tol || p_dbm > x.back() + tol) {
    throw std::domain_error("launch power " + std::to_string(p_dbm) +
                            " dBm lies outside the tabulated NLI range");
  }
  const auto upper = std::upper_bound(x.begin(), x.end(), p_dbm);
  std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(upper - x.begin() - 1, 0,
                                                                      static_cast<std::ptrdiff_t>(n) - 2));
  if (p_dbm == x[k]) return values[k][ch];
  if (p_dbm == x[k + 1]) return values[k + 1][ch];

  // Four-point stencil around [x_k, x_k+1], shifted inwards at the ends.
  std::size_t lo = k == 0 ? 0 : k - 1;
  std::size_t hi = std::min(n - 1, lo + 3);
  lo = hi >= 3 ? hi - 3 : 0;
  bool positive = true;
  for (std::size_t i = lo; i <= hi; ++i) positive = positive && values[i][ch] > 0.0;
  if (!positive || hi - lo < 3) {
    const double t = (p_dbm - x[k]) / (x[k + 1] - x[k]);
    return values[k][ch] + t * (values[k + 1][ch] - values[k][ch]);
  }
  double acc = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    double w = 1.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) w *= (p_dbm - x[j]) / (x[i] - x[j]);
    }
    acc += w * std::log(values[i][ch]);
  }
  return std::exp(acc);
}

UniformSpan UniformPowerModel::span_state(double p_dbm) const {
  const auto nc = static_cast<std::size_t>(grid_.size());
  UniformSpan s;
  s.launch_w = dbm_to_watt(p_dbm);
  const std::vector<double> launch(nc, s.launch_w);
  s.received_w = closed_form_power(grid_, settings_.fiber, launch, settings_.fiber.span_length_km);
  s.gain.resize(nc);
  s.p_ase_w.resize(nc);
  s.eta_sci.resize(nc);
  s.eta_xci.resize(nc);
  s.eta_mci.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const int ch = static_cast<int>(i);
    s.gain[i] = std::max(1.0, s.launch_w / s.received_w[i]);
    s.p_ase_w[i] = compute_ase_power(grid_.channel(ch), settings_.amplifier, s.gain[i],
                                     noise_bandwidth_hz_)
                       .p_ase_w;
    s.eta_sci[i] = interpolate(table_.sci, ch, p_dbm);
    s.eta_xci[i] = interpolate(table_.xci, ch, p_dbm);
    s.eta_mci[i] = interpolate(table_.mci, ch, p_dbm);
  }
  return s;
}

namespace {

SpanTerms terms_for(const UniformSpan& s, const ModulationFormat& format, double xci_weight) {
  const auto nc = s.received_w.size();
  SpanTerms t;
  t.launch_w.assign(nc, s.launch_w);
  t.p_ase_w = s.p_ase_w;
  t.eta.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    NliCoefficient c;
    c.eta_sci = s.eta_sci[i];
    c.eta_xci = s.eta_xci[i];
    c.eta_mci = s.eta_mci[i];
    t.eta[i] = modulated_eta(c, format, xci_weight);
  }
  return t;
}

std::vector<double> snr_of(const SpanTerms& t) {
  std::vector<double> out(t.channels());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = t.snr(i);
  return out;
}

}  // namespace

SpanTerms UniformPowerModel::span(double p_dbm, const ModulationFormat& format) const {
  return terms_for(span_state(p_dbm), format, settings_.nli.xci_kurtosis_weight);
}

std::vector<std::vector<double>> UniformPowerModel::span_snr_all_formats(double p_dbm) const {
  const UniformSpan s = span_state(p_dbm);
  std::vector<std::vector<double>> out;
  out.reserve(settings_.formats.size());
  for (const auto& f : settings_.formats) {
    out.push_back(snr_of(terms_for(s, f, settings_.nli.xci_kurtosis_weight)));
  }
  return out;
}

std::vector<double> UniformPowerModel::span_snr(double p_dbm, const ModulationFormat& format) const {
  return snr_of(span(p_dbm, format));
}

double UniformPowerModel::gsnr_db(double p_dbm, const ModulationFormat& format, int channel,
                                  int spans) const {
  if (channel < 0 || channel >= grid_.size()) throw std::out_of_range("channel index out of range");
  const auto nc = static_cast<std::size_t>(grid_.size());
  const auto i = static_cast<std::size_t>(channel);
  const double launch_w = dbm_to_watt(p_dbm);
  const std::vector<double> launch(nc, launch_w);
  const double received =
      closed_form_power(grid_, settings_.fiber, launch, settings_.fiber.span_length_km)[i];
  NliCoefficient c;
  c.eta_sci = interpolate(table_.sci, channel, p_dbm);
  c.eta_xci = interpolate(table_.xci, channel, p_dbm);
  c.eta_mci = interpolate(table_.mci, channel, p_dbm);
  // One-channel view of the span; the other channels only enter through ISRS.
  SpanTerms t;
  t.launch_w = {launch_w};
  t.eta = {modulated_eta(c, format, settings_.nli.xci_kurtosis_weight)};
  t.p_ase_w = {compute_ase_power(grid_.channel(channel), settings_.amplifier,
                                 std::max(1.0, launch_w / received), noise_bandwidth_hz_)
                   .p_ase_w};
  const double one = gsnr(PathPhysics{{t}, settings_.transceiver.snr_trx_db}, 0);
  if (spans == 1) return one;
  return gsnr_of_identical_spans(t.snr(0), spans, settings_.transceiver.snr_trx_db);
}

PathPhysics UniformPowerModel::path(double p_dbm, const ModulationFormat& format, int spans) const {
  if (spans < 1) throw std::invalid_argument("need at least one span");
  PathPhysics p;
  p.snr_trx_db = settings_.transceiver.snr_trx_db;
  p.spans.assign(static_cast<std::size_t>(spans), span(p_dbm, format));
  return p;
}

UniformPowerModel make_uniform_power_model(const PhysicsSettings& settings, int jobs,
                                           const CacheOptions& cache) {
  return UniformPowerModel(settings, cached_eta_table(settings, jobs, cache));
}

SpanTerms direct_span_terms(const PhysicsSettings& settings, double p_dbm,
                            const ModulationFormat& format, int jobs) {
  PhysicsSettings single = settings;
  single.eta_power_grid_dbm = {p_dbm};
  const UniformPowerModel model(single, tabulate_eta(single, jobs));
  return model.span(p_dbm, format);
}

std::vector<double> gsnr_sweep_power(const UniformPowerModel& model, const ModulationFormat& format,
                                     int channel, int spans, const std::vector<double>& powers_dbm) {
  std::vector<double> out;
  out.reserve(powers_dbm.size());
  for (double p : powers_dbm) {
    if (p < -10.0 || p > 5.0) {
      throw std::domain_error("sweep power " + std::to_string(p) + " dBm outside [-10, 5] dBm");
    }
    out.push_back(model.gsnr_db(p, format, channel, spans));
  }
  return out;
}

}  // namespace clband
