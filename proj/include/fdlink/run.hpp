#ifndef FDLINK_RUN_HPP
#define FDLINK_RUN_HPP

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdlink/coupling.hpp"
#include "fdlink/partition_search.hpp"
#include "fdlink/pattern_io.hpp"
#include "fdlink/report.hpp"
#include "fdlink/scenario.hpp"
#include "fdlink/touchstone.hpp"

namespace fdlink {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  bool strict_paper = false;
};

/// Assembled physical inputs of one scenario evaluation.
struct ScenarioInputs {
  ArrayGeometry geometry;
  ScatteringMatrix s_params;
  SelfInterferenceMatrix h_self;
  ChannelMatrix h_up;        // M_up x K_up
  ChannelMatrix h_down;      // K_down x M_down
  ChannelMatrix h_up_half;   // M x K_up, all elements receive
  ChannelMatrix h_down_half; // K_down x M, all elements transmit
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<UserPosition> to_user_positions(const std::vector<UserSpec>& specs) {
  std::vector<UserPosition> out;
  out.reserve(specs.size());
  for (const UserSpec& s : specs)
    out.push_back({deg_to_rad(s.theta_deg), deg_to_rad(s.phi_deg), s.distance_m});
  return out;
}

// Patterns for the given elements (1-based), one per element. Synthetic
// sources share a single pattern; file sources may be shared or per element.
inline std::vector<RadiationPattern> patterns_for(const ScenarioConfig& cfg, LinkRole role,
                                                  const std::vector<int>& elements) {
  std::vector<RadiationPattern> out;
  out.reserve(elements.size());
  if (const auto* sp = std::get_if<SyntheticPatterns>(&cfg.patterns)) {
    RadiationPattern shared =
        sp->kind == PatternKind::isotropic
            ? synthesize_isotropic(cfg.wavelength(), sp->accepted_power_w, sp->n_theta,
                                   sp->n_phi, role)
            : synthesize_dipole(cfg.wavelength(), sp->accepted_power_w, sp->n_theta,
                                sp->n_phi, role);
    for (std::size_t i = 0; i < elements.size(); ++i) out.push_back(shared);
    return out;
  }
  const auto& fp = std::get<FilePatterns>(cfg.patterns);
  const auto& files = role == LinkRole::uplink ? fp.uplink_files : fp.downlink_files;
  if (files.size() == 1) {
    RadiationPattern shared = load_pattern(files[0], role, fp.accepted_power_w,
                                           cfg.wavelength(), fp.ref_distance_m);
    for (std::size_t i = 0; i < elements.size(); ++i) out.push_back(shared);
    return out;
  }
  for (int k : elements)
    out.push_back(load_pattern(files[std::size_t(k - 1)], role, fp.accepted_power_w,
                               cfg.wavelength(), fp.ref_distance_m));
  return out;
}

inline void far_field_warnings(const ScenarioConfig& cfg, const char* side,
                               const std::vector<UserSpec>& users,
                               std::vector<std::string>& warnings) {
  for (std::size_t i = 0; i < users.size(); ++i)
    if (!is_far_field(users[i].distance_m, cfg.wavelength())) {
      std::ostringstream os;
      os << "users." << side << "[" << i << "]: kappa*d = "
         << wave_number(cfg.wavelength()) * users[i].distance_m
         << " < 100, far-field approximation is questionable";
      warnings.push_back(os.str());
    }
}

inline std::vector<int> iota_elements(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) v[std::size_t(k - 1)] = k;
  return v;
}

} // namespace detail

/// Build geometry, patterns, S-parameters, H_self and all four channel
/// matrices from a validated config.
inline ScenarioInputs build_inputs(const ScenarioConfig& cfg, const RunOptions& opts = {}) {
  ScenarioInputs in;
  in.geometry = build_planar_array(cfg.m_x, cfg.m_y, cfg.spacing_x(), cfg.spacing_y());

  if (const auto* sc = std::get_if<SyntheticCoupling>(&cfg.coupling)) {
    in.s_params = synthesize_coupling(in.geometry, cfg.wavelength(), sc->c0, sc->alpha);
  } else {
    const auto& tc = std::get<TouchstoneCoupling>(cfg.coupling);
    const double target = tc.frequency_hz ? *tc.frequency_hz
                                          : kSpeedOfLight / cfg.wavelength();
    double delta = 0.0;
    in.s_params = load_touchstone(tc.path, target, &delta);
    if (in.s_params.ports() != cfg.total_elements())
      throw ConfigError("coupling.touchstone.path: file has " +
                        std::to_string(in.s_params.ports()) + " ports, array has " +
                        std::to_string(cfg.total_elements()) + " elements");
    if (std::abs(delta) > 1e-6 * target) {
      std::ostringstream os;
      os << "coupling.touchstone: nearest tabulated frequency is "
         << in.s_params.frequency_hz << " Hz, " << delta << " Hz from the request";
      in.warnings.push_back(os.str());
    }
  }
  for (const std::string& w : scattering_warnings(in.s_params)) in.warnings.push_back(w);

  in.h_self = build_h_self(in.s_params, cfg.uplink_elements, cfg.downlink_elements);

  detail::far_field_warnings(cfg, "uplink", cfg.uplink_users, in.warnings);
  detail::far_field_warnings(cfg, "downlink", cfg.downlink_users, in.warnings);

  const auto up_users = detail::to_user_positions(cfg.uplink_users);
  const auto down_users = detail::to_user_positions(cfg.downlink_users);
  const auto all = detail::iota_elements(cfg.total_elements());
  const std::uint64_t seed = opts.seed_override ? *opts.seed_override : cfg.seed;

  const auto up_patterns = detail::patterns_for(cfg, LinkRole::uplink, cfg.uplink_elements);
  const auto down_patterns =
      detail::patterns_for(cfg, LinkRole::downlink, cfg.downlink_elements);
  const auto all_up_patterns = detail::patterns_for(cfg, LinkRole::uplink, all);
  const auto all_down_patterns = detail::patterns_for(cfg, LinkRole::downlink, all);

  if (cfg.channel_model == ChannelModel::los) {
    in.h_up = assemble_uplink(in.geometry, up_patterns, up_users, cfg.phase,
                              cfg.uplink_elements, cfg.angle_mode);
    in.h_down = assemble_downlink(in.geometry, down_patterns, down_users, cfg.phase,
                                  cfg.downlink_elements, cfg.angle_mode);
    in.h_up_half =
        assemble_uplink(in.geometry, all_up_patterns, up_users, cfg.phase, all, cfg.angle_mode);
    in.h_down_half = assemble_downlink(in.geometry, all_down_patterns, down_users, cfg.phase,
                                       all, cfg.angle_mode);
  } else {
    // Distinct stream ids per matrix keep the four channels independent;
    // the half-duplex matrices use their own realizations.
    in.h_up = assemble_rayleigh(in.geometry, up_patterns, up_users, cfg.phase,
                                LinkRole::uplink, seed, cfg.rayleigh, cfg.uplink_elements,
                                cfg.angle_mode);
    in.h_down = assemble_rayleigh(in.geometry, down_patterns, down_users, cfg.phase,
                                  LinkRole::downlink, seed, cfg.rayleigh,
                                  cfg.downlink_elements, cfg.angle_mode);
    RayleighConfig half_cfg = cfg.rayleigh;
    in.h_up_half = assemble_rayleigh(in.geometry, all_up_patterns, up_users, cfg.phase,
                                     LinkRole::uplink, seed ^ 0x68616c66ULL, half_cfg, all,
                                     cfg.angle_mode);
    in.h_down_half = assemble_rayleigh(in.geometry, all_down_patterns, down_users,
                                       cfg.phase, LinkRole::downlink, seed ^ 0x68616c66ULL,
                                       half_cfg, all, cfg.angle_mode);
  }
  return in;
}

/// Full pipeline: channels -> SVD -> partition (given or searched) ->
/// per-antenna budget and the four operating modes.
inline LinkReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {}) {
  const ScenarioInputs in = build_inputs(cfg, opts);
  const LinkBudgetOptions budget{cfg.noise_convention, opts.strict_paper};

  const SvdTriple svd = svd_decompose(in.h_self.entries);

  LinkReport r;
  r.warnings = in.warnings;
  r.uplink_elements = cfg.uplink_elements;
  r.downlink_elements = cfg.downlink_elements;
  r.singular_values = svd.singular_values;

  int n_up = 0, n_down = 0;
  if (cfg.partition) {
    n_up = cfg.partition->n_up;
    n_down = cfg.partition->n_down;
  } else {
    PartitionSearchOptions search_opts;
    search_opts.budget = budget;
    r.partition_table = search_partition(in.h_self.entries, in.h_up.entries,
                                         in.h_down.entries, cfg.powers, cfg.noise,
                                         search_opts);
    n_up = r.partition_table.front().n_up;
    n_down = r.partition_table.front().n_down;
  }
  r.n_up = n_up;
  r.n_down = n_down;

  const PartitionPlan plan = make_partition_plan(svd, n_up, n_down);
  r.si_power = residual_si_power_diagnostic(svd, plan, cfg.powers.p_down_w);

  r.p_s_w = row_powers(in.h_up.entries, cfg.powers.p_up_w);
  r.p_i_w = row_powers(in.h_self.entries * plan.p_t, cfg.powers.p_down_w);
  r.p_n_w = noise_levels(r.p_s_w, r.p_i_w, cfg.noise);
  r.p_n_down_w = downlink_noise_levels(in.h_down.entries * plan.p_t, cfg.powers, cfg.noise);

  r.precoded.sinr_up =
      sinr_uplink_precoded(in.h_up.entries, svd, plan, cfg.powers, cfg.noise, budget);
  r.precoded.sinr_down =
      sinr_downlink_precoded(in.h_down.entries, svd, plan, cfg.powers, cfg.noise, budget);
  r.precoded.capacity_up = capacity(r.precoded.sinr_up, DuplexMode::precoded);
  r.precoded.capacity_down = capacity(r.precoded.sinr_down, DuplexMode::precoded);

  const UpDownSinr ref = sinr_reference(in.h_up.entries, in.h_down.entries,
                                        in.h_self.entries, cfg.powers, cfg.noise, budget);
  r.reference.sinr_up = ref.up;
  r.reference.sinr_down = ref.down;
  r.reference.capacity_up = capacity(ref.up, DuplexMode::reference);
  r.reference.capacity_down = capacity(ref.down, DuplexMode::reference);

  const UpDownSinr ideal =
      sinr_full_ideal(in.h_up.entries, in.h_down.entries, cfg.powers, cfg.noise, budget);
  r.full_ideal.sinr_up = ideal.up;
  r.full_ideal.sinr_down = ideal.down;
  r.full_ideal.capacity_up = capacity(ideal.up, DuplexMode::full_ideal);
  r.full_ideal.capacity_down = capacity(ideal.down, DuplexMode::full_ideal);

  const UpDownSinr half = sinr_half_duplex(in.h_up_half.entries, in.h_down_half.entries,
                                           cfg.powers, cfg.noise, budget);
  r.half.sinr_up = half.up;
  r.half.sinr_down = half.down;
  r.half.capacity_up = capacity(half.up, DuplexMode::half);
  r.half.capacity_down = capacity(half.down, DuplexMode::half);

  return r;
}

/// Exhaustive partition table for the scenario, best first.
inline std::vector<PartitionScore> sweep_partition(const ScenarioConfig& cfg,
                                                   const RunOptions& opts = {}) {
  const ScenarioInputs in = build_inputs(cfg, opts);
  PartitionSearchOptions search_opts;
  search_opts.budget = LinkBudgetOptions{cfg.noise_convention, opts.strict_paper};
  return search_partition(in.h_self.entries, in.h_up.entries, in.h_down.entries,
                          cfg.powers, cfg.noise, search_opts);
}

/// Verdict on the "fewer than half the transmit antennas for receive"
/// heuristic, judged from the table's best row.
inline std::string partition_claim_verdict(const std::vector<PartitionScore>& table,
                                           int m_down) {
  const PartitionScore& best = table.front();
  std::ostringstream os;
  os << "best partition n_up=" << best.n_up << ", n_down=" << best.n_down
     << "; claim n_up < m_down/2 (" << best.n_up << " < " << 0.5 * m_down
     << "): " << (best.n_up < 0.5 * m_down ? "holds" : "fails");
  return os.str();
}

/// Geometry + synthetic coupling rebuilt per spacing, best partition per
/// row. Requires a synthetic coupling source (a measured file is tied to
/// one physical spacing).
inline std::vector<SpacingScore> sweep_spacing(const ScenarioConfig& cfg,
                                               const std::vector<double>& spacings_wl,
                                               const RunOptions& opts = {}) {
  if (spacings_wl.empty())
    throw ConfigError("spacings: list must be non-empty");
  for (double s : spacings_wl)
    if (!(s > 0.0)) throw ConfigError("spacings: values must be > 0");
  if (!std::holds_alternative<SyntheticCoupling>(cfg.coupling))
    throw ConfigError("coupling: sweep-spacing requires a synthetic coupling source");

  std::vector<SpacingScore> rows;
  for (double s : spacings_wl) {
    ScenarioConfig per = cfg;
    per.spacing_x_m.reset();
    per.spacing_y_m.reset();
    per.spacing_x_wavelengths = s;
    per.spacing_y_wavelengths = s;
    const ScenarioInputs in = build_inputs(per, opts);
    PartitionSearchOptions search_opts;
    search_opts.budget = LinkBudgetOptions{per.noise_convention, opts.strict_paper};
    const auto table = search_partition(in.h_self.entries, in.h_up.entries,
                                        in.h_down.entries, per.powers, per.noise,
                                        search_opts);
    SpacingScore row;
    row.spacing_wavelengths = s;
    row.best_n_up = table.front().n_up;
    row.best_n_down = table.front().n_down;
    row.best_sum_capacity = table.front().sum_capacity;
    row.h_self_frobenius = in.h_self.entries.norm();
    rows.push_back(row);
  }
  return rows;
}

/// Verdict on the half-wavelength-spacing heuristic, judged from the
/// peak-capacity row.
inline std::string spacing_claim_verdict(const std::vector<SpacingScore>& rows) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].best_sum_capacity > rows[peak].best_sum_capacity) peak = i;
  std::ostringstream os;
  const double s = rows[peak].spacing_wavelengths;
  os << "peak sum capacity at spacing " << s << " wavelengths; claim 0.5-wavelength "
     << "spacing is best: " << (std::abs(s - 0.5) < 1e-9 ? "holds" : "fails");
  return os.str();
}

} // namespace fdlink

#endif
