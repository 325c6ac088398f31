#ifndef FDLINK_SCENARIO_HPP
#define FDLINK_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fdlink/channel.hpp"
#include "fdlink/errors.hpp"
#include "fdlink/geometry.hpp"
#include "fdlink/linkbudget.hpp"
#include "fdlink/pattern.hpp"

namespace fdlink {

enum class ChannelModel { los, rayleigh };
enum class PatternKind { isotropic, dipole };

/// Pattern source: a named synthetic fixture shared by every element, or
/// per-element CSV files (one shared file, or one per array element).
struct SyntheticPatterns {
  PatternKind kind = PatternKind::isotropic;
  int n_theta = 181;
  int n_phi = 360;
  double accepted_power_w = 1.0;
};

struct FilePatterns {
  std::vector<std::filesystem::path> uplink_files;   // size 1 or M
  std::vector<std::filesystem::path> downlink_files; // size 1 or M
  double accepted_power_w = 1.0;
  double ref_distance_m = 1.0;
};

struct SyntheticCoupling {
  double c0 = 0.1;
  double alpha = 1.0;
};

struct TouchstoneCoupling {
  std::filesystem::path path;
  std::optional<double> frequency_hz; // defaults to the carrier
};

struct UserSpec {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
  double distance_m = 0.0;
};

struct ExplicitPartition {
  int n_up = 0;
  int n_down = 0;
};

/// Fully validated scenario description; the single input of every run.
struct ScenarioConfig {
  // carrier: exactly one of the two was given
  std::optional<double> frequency_hz;
  std::optional<double> wavelength_m;

  int m_x = 1;
  int m_y = 1;
  // spacing per axis: exactly one of meters / wavelengths was given
  std::optional<double> spacing_x_m, spacing_x_wavelengths;
  std::optional<double> spacing_y_m, spacing_y_wavelengths;

  std::variant<SyntheticPatterns, FilePatterns> patterns = SyntheticPatterns{};
  std::variant<SyntheticCoupling, TouchstoneCoupling> coupling = SyntheticCoupling{};

  std::vector<int> uplink_elements;
  std::vector<int> downlink_elements;
  std::vector<UserSpec> uplink_users;
  std::vector<UserSpec> downlink_users;

  TransmitPowers powers{1.0, 1.0};
  NoiseConfig noise{1e-12, 0.0};
  NoiseConvention noise_convention = NoiseConvention::covariance;
  LinkPhaseConfig phase;

  ChannelModel channel_model = ChannelModel::los;
  std::uint64_t seed = 1;
  RayleighConfig rayleigh;
  AngleMode angle_mode = AngleMode::shared_origin;

  std::optional<ExplicitPartition> partition; // nullopt = search

  double wavelength() const {
    return wavelength_m ? *wavelength_m : kSpeedOfLight / *frequency_hz;
  }
  double spacing_x() const {
    return spacing_x_m ? *spacing_x_m : *spacing_x_wavelengths * wavelength();
  }
  double spacing_y() const {
    return spacing_y_m ? *spacing_y_m : *spacing_y_wavelengths * wavelength();
  }
  int total_elements() const { return m_x * m_y; }
};

namespace detail {

using Json = nlohmann::ordered_json;

inline const Json& require_field(const Json& j, const std::string& section,
                                 const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(section + "." + key + ": missing required field");
  return *it;
}

inline void reject_unknown(const Json& j, const std::string& section,
                           std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError(section + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(section + "." + it.key() + ": unknown field");
  }
}

inline double get_number(const Json& j, const std::string& section, const std::string& key) {
  const Json& v = require_field(j, section, key);
  if (!v.is_number()) throw ConfigError(section + "." + key + ": expected a number");
  return v.get<double>();
}

inline double get_positive(const Json& j, const std::string& section,
                           const std::string& key) {
  double v = get_number(j, section, key);
  if (!(v > 0.0)) throw ConfigError(section + "." + key + ": must be > 0");
  return v;
}

inline int get_int(const Json& j, const std::string& section, const std::string& key) {
  const Json& v = require_field(j, section, key);
  if (!v.is_number_integer())
    throw ConfigError(section + "." + key + ": expected an integer");
  return v.get<int>();
}

inline std::vector<int> get_int_list(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a non-empty array");
  std::vector<int> out;
  for (const Json& v : j) {
    if (!v.is_number_integer()) throw ConfigError(path + ": expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

inline std::complex<double> get_complex(const Json& j, const std::string& section,
                                        const std::string& key) {
  const Json& v = require_field(j, section, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(section + "." + key + ": expected [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline std::vector<UserSpec> parse_users(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path + ": expected a non-empty array of users");
  std::vector<UserSpec> out;
  int idx = 0;
  for (const Json& u : j) {
    const std::string upath = path + "[" + std::to_string(idx++) + "]";
    reject_unknown(u, upath, {"theta_deg", "phi_deg", "distance_m"});
    UserSpec s;
    s.theta_deg = get_number(u, upath, "theta_deg");
    s.phi_deg = get_number(u, upath, "phi_deg");
    s.distance_m = get_positive(u, upath, "distance_m");
    if (s.theta_deg < 0.0 || s.theta_deg > 180.0)
      throw ConfigError(upath + ".theta_deg: outside [0, 180]");
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::filesystem::path> parse_file_list(
    const Json& j, const std::string& path, const std::filesystem::path& base_dir) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path + ": expected a non-empty array of file paths");
  std::vector<std::filesystem::path> out;
  for (const Json& v : j) {
    if (!v.is_string()) throw ConfigError(path + ": expected strings");
    std::filesystem::path p = v.get<std::string>();
    out.push_back(p.is_absolute() ? p : base_dir / p);
  }
  return out;
}

} // namespace detail

/// Parse and validate a scenario config. Relative file paths resolve
/// against base_dir (the directory of the config file). Every violated
/// invariant names the offending field path.
inline ScenarioConfig parse_config(const nlohmann::ordered_json& j,
                                   const std::filesystem::path& base_dir = ".") {
  using detail::Json;
  detail::reject_unknown(j, "config",
                         {"carrier", "array", "patterns", "coupling", "elements", "users",
                          "powers", "noise", "phase", "channel", "partition"});
  ScenarioConfig c;

  {
    const Json& s = detail::require_field(j, "config", "carrier");
    detail::reject_unknown(s, "carrier", {"frequency_hz", "wavelength_m"});
    if (s.contains("frequency_hz")) c.frequency_hz = detail::get_positive(s, "carrier", "frequency_hz");
    if (s.contains("wavelength_m")) c.wavelength_m = detail::get_positive(s, "carrier", "wavelength_m");
    if (c.frequency_hz.has_value() == c.wavelength_m.has_value())
      throw ConfigError("carrier: exactly one of frequency_hz / wavelength_m required");
  }

  {
    const Json& s = detail::require_field(j, "config", "array");
    detail::reject_unknown(s, "array",
                           {"m_x", "m_y", "spacing_x_m", "spacing_y_m",
                            "spacing_x_wavelengths", "spacing_y_wavelengths"});
    c.m_x = detail::get_int(s, "array", "m_x");
    c.m_y = detail::get_int(s, "array", "m_y");
    if (c.m_x < 1 || c.m_y < 1) throw ConfigError("array.m_x/m_y: must be >= 1");
    if (s.contains("spacing_x_m")) c.spacing_x_m = detail::get_positive(s, "array", "spacing_x_m");
    if (s.contains("spacing_x_wavelengths"))
      c.spacing_x_wavelengths = detail::get_positive(s, "array", "spacing_x_wavelengths");
    if (c.spacing_x_m.has_value() == c.spacing_x_wavelengths.has_value())
      throw ConfigError("array: exactly one of spacing_x_m / spacing_x_wavelengths required");
    if (s.contains("spacing_y_m")) c.spacing_y_m = detail::get_positive(s, "array", "spacing_y_m");
    if (s.contains("spacing_y_wavelengths"))
      c.spacing_y_wavelengths = detail::get_positive(s, "array", "spacing_y_wavelengths");
    if (c.spacing_y_m.has_value() == c.spacing_y_wavelengths.has_value())
      throw ConfigError("array: exactly one of spacing_y_m / spacing_y_wavelengths required");
  }

  {
    const Json& s = detail::require_field(j, "config", "patterns");
    const bool synth = s.contains("synthetic");
    const bool files = s.contains("uplink_files") || s.contains("downlink_files");
    if (synth == files)
      throw ConfigError("patterns: exactly one pattern source required "
                        "(synthetic, or uplink_files + downlink_files)");
    if (synth) {
      detail::reject_unknown(s, "patterns",
                             {"synthetic", "n_theta", "n_phi", "accepted_power_w"});
      SyntheticPatterns p;
      const Json& kind = s["synthetic"];
      if (!kind.is_string() || (kind != "isotropic" && kind != "dipole"))
        throw ConfigError("patterns.synthetic: expected \"isotropic\" or \"dipole\"");
      p.kind = kind == "isotropic" ? PatternKind::isotropic : PatternKind::dipole;
      if (s.contains("n_theta")) p.n_theta = detail::get_int(s, "patterns", "n_theta");
      if (s.contains("n_phi")) p.n_phi = detail::get_int(s, "patterns", "n_phi");
      if (p.n_theta < 2 || p.n_phi < 1)
        throw ConfigError("patterns.n_theta/n_phi: need n_theta >= 2, n_phi >= 1");
      if (s.contains("accepted_power_w"))
        p.accepted_power_w = detail::get_positive(s, "patterns", "accepted_power_w");
      c.patterns = p;
    } else {
      detail::reject_unknown(s, "patterns",
                             {"uplink_files", "downlink_files", "accepted_power_w",
                              "ref_distance_m"});
      FilePatterns p;
      p.uplink_files = detail::parse_file_list(
          detail::require_field(s, "patterns", "uplink_files"), "patterns.uplink_files",
          base_dir);
      p.downlink_files = detail::parse_file_list(
          detail::require_field(s, "patterns", "downlink_files"),
          "patterns.downlink_files", base_dir);
      if (s.contains("accepted_power_w"))
        p.accepted_power_w = detail::get_positive(s, "patterns", "accepted_power_w");
      if (s.contains("ref_distance_m"))
        p.ref_distance_m = detail::get_positive(s, "patterns", "ref_distance_m");
      const std::size_t m = std::size_t(c.total_elements());
      for (const char* side : {"uplink_files", "downlink_files"}) {
        const auto& list = side == std::string("uplink_files") ? p.uplink_files
                                                               : p.downlink_files;
        if (list.size() != 1 && list.size() != m)
          throw ConfigError("patterns." + std::string(side) + ": expected 1 or " +
                            std::to_string(m) + " files");
        for (const auto& f : list)
          if (!std::filesystem::exists(f))
            throw ConfigError("patterns." + std::string(side) + ": file not found: " +
                              f.string());
      }
      c.patterns = p;
    }
  }

  {
    const Json& s = detail::require_field(j, "config", "coupling");
    const bool synth = s.contains("synthetic");
    const bool touch = s.contains("touchstone");
    if (synth == touch)
      throw ConfigError("coupling: exactly one coupling source required "
                        "(synthetic or touchstone)");
    detail::reject_unknown(s, "coupling", {"synthetic", "touchstone"});
    if (synth) {
      const Json& t = s["synthetic"];
      detail::reject_unknown(t, "coupling.synthetic", {"c0", "alpha"});
      SyntheticCoupling k;
      k.c0 = detail::get_number(t, "coupling.synthetic", "c0");
      k.alpha = detail::get_number(t, "coupling.synthetic", "alpha");
      if (!(k.c0 > 0.0 && k.c0 < 1.0))
        throw ConfigError("coupling.synthetic.c0: must be in (0, 1)");
      if (!(k.alpha > 0.0)) throw ConfigError("coupling.synthetic.alpha: must be > 0");
      c.coupling = k;
    } else {
      const Json& t = s["touchstone"];
      detail::reject_unknown(t, "coupling.touchstone", {"path", "frequency_hz"});
      TouchstoneCoupling k;
      const Json& pathv = detail::require_field(t, "coupling.touchstone", "path");
      if (!pathv.is_string())
        throw ConfigError("coupling.touchstone.path: expected a string");
      std::filesystem::path p = pathv.get<std::string>();
      k.path = p.is_absolute() ? p : base_dir / p;
      if (!std::filesystem::exists(k.path))
        throw ConfigError("coupling.touchstone.path: file not found: " + k.path.string());
      if (t.contains("frequency_hz"))
        k.frequency_hz = detail::get_positive(t, "coupling.touchstone", "frequency_hz");
      c.coupling = k;
    }
  }

  {
    const Json& s = detail::require_field(j, "config", "elements");
    detail::reject_unknown(s, "elements", {"uplink", "downlink"});
    c.uplink_elements =
        detail::get_int_list(detail::require_field(s, "elements", "uplink"), "elements.uplink");
    c.downlink_elements = detail::get_int_list(
        detail::require_field(s, "elements", "downlink"), "elements.downlink");
    const int m = c.total_elements();
    std::set<int> seen;
    for (const char* side : {"uplink", "downlink"}) {
      const auto& list =
          side == std::string("uplink") ? c.uplink_elements : c.downlink_elements;
      for (int k : list) {
        if (k < 1 || k > m)
          throw ConfigError("elements." + std::string(side) + ": index " +
                            std::to_string(k) + " out of range [1, " + std::to_string(m) +
                            "]");
        if (!seen.insert(k).second)
          throw ConfigError("elements." + std::string(side) + ": element " +
                            std::to_string(k) + " appears in both (or twice); "
                            "uplink and downlink sets must be disjoint");
      }
    }
  }

  {
    const Json& s = detail::require_field(j, "config", "users");
    detail::reject_unknown(s, "users", {"uplink", "downlink"});
    c.uplink_users =
        detail::parse_users(detail::require_field(s, "users", "uplink"), "users.uplink");
    c.downlink_users = detail::parse_users(detail::require_field(s, "users", "downlink"),
                                           "users.downlink");
  }

  {
    const Json& s = detail::require_field(j, "config", "powers");
    detail::reject_unknown(s, "powers", {"p_up_w", "p_down_w"});
    c.powers.p_up_w = detail::get_positive(s, "powers", "p_up_w");
    c.powers.p_down_w = detail::get_positive(s, "powers", "p_down_w");
  }

  {
    const Json& s = detail::require_field(j, "config", "noise");
    detail::reject_unknown(s, "noise", {"p_n_w", "k_dyn", "convention"});
    c.noise.p_n_w = detail::get_positive(s, "noise", "p_n_w");
    c.noise.k_dyn = detail::get_number(s, "noise", "k_dyn");
    if (c.noise.k_dyn < 0.0) throw ConfigError("noise.k_dyn: must be >= 0");
    if (s.contains("convention")) {
      const Json& v = s["convention"];
      if (v == "covariance") c.noise_convention = NoiseConvention::covariance;
      else if (v == "power_vector") c.noise_convention = NoiseConvention::power_vector;
      else
        throw ConfigError("noise.convention: expected \"covariance\" or \"power_vector\"");
    }
  }

  if (j.contains("phase")) {
    const Json& s = j["phase"];
    detail::reject_unknown(
        s, "phase", {"phi_delta_up_rad", "phi_delta_down_rad", "c_up", "c_down"});
    if (s.contains("phi_delta_up_rad"))
      c.phase.phi_delta_up = detail::get_number(s, "phase", "phi_delta_up_rad");
    if (s.contains("phi_delta_down_rad"))
      c.phase.phi_delta_down = detail::get_number(s, "phase", "phi_delta_down_rad");
    if (s.contains("c_up")) c.phase.c_up = detail::get_complex(s, "phase", "c_up");
    if (s.contains("c_down")) c.phase.c_down = detail::get_complex(s, "phase", "c_down");
  }

  if (j.contains("channel")) {
    const Json& s = j["channel"];
    detail::reject_unknown(s, "channel",
                           {"model", "seed", "field_sharing", "quadrature_n_theta",
                            "quadrature_n_phi", "angle_mode"});
    if (s.contains("model")) {
      const Json& v = s["model"];
      if (v == "los") c.channel_model = ChannelModel::los;
      else if (v == "rayleigh") c.channel_model = ChannelModel::rayleigh;
      else throw ConfigError("channel.model: expected \"los\" or \"rayleigh\"");
    }
    if (s.contains("seed")) {
      const Json& v = s["seed"];
      if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError("channel.seed: expected a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    }
    if (s.contains("field_sharing")) {
      const Json& v = s["field_sharing"];
      if (v == "per_user") c.rayleigh.per_element_fields = false;
      else if (v == "per_element") c.rayleigh.per_element_fields = true;
      else
        throw ConfigError("channel.field_sharing: expected \"per_user\" or \"per_element\"");
    }
    if (s.contains("quadrature_n_theta"))
      c.rayleigh.n_theta = detail::get_int(s, "channel", "quadrature_n_theta");
    if (s.contains("quadrature_n_phi"))
      c.rayleigh.n_phi = detail::get_int(s, "channel", "quadrature_n_phi");
    if (c.rayleigh.n_theta < 2 || c.rayleigh.n_phi < 1)
      throw ConfigError("channel.quadrature_n_theta/n_phi: need n_theta >= 2, n_phi >= 1");
    if (s.contains("angle_mode")) {
      const Json& v = s["angle_mode"];
      if (v == "shared_origin") c.angle_mode = AngleMode::shared_origin;
      else if (v == "exact_per_element") c.angle_mode = AngleMode::exact_per_element;
      else
        throw ConfigError("channel.angle_mode: expected \"shared_origin\" or "
                          "\"exact_per_element\"");
    }
  }

  {
    const detail::Json& s = detail::require_field(j, "config", "partition");
    if (s.is_string()) {
      if (s != "search") throw ConfigError("partition: expected \"search\" or an object");
    } else {
      detail::reject_unknown(s, "partition", {"n_up", "n_down"});
      ExplicitPartition p;
      p.n_up = detail::get_int(s, "partition", "n_up");
      p.n_down = detail::get_int(s, "partition", "n_down");
      if (p.n_up < 1 || p.n_up > int(c.uplink_elements.size()))
        throw ConfigError("partition.n_up: outside [1, " +
                          std::to_string(c.uplink_elements.size()) + "]");
      if (p.n_down < 1 || p.n_down > int(c.downlink_elements.size()))
        throw ConfigError("partition.n_down: outside [1, " +
                          std::to_string(c.downlink_elements.size()) + "]");
      c.partition = p;
    }
  }

  return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in, nullptr, true, true); // comments allowed
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

/// Serialize the effective configuration. parse_config(config_to_json(c))
/// reproduces c field for field.
inline nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
  using detail::Json;
  Json j;
  {
    Json s;
    if (c.frequency_hz) s["frequency_hz"] = *c.frequency_hz;
    if (c.wavelength_m) s["wavelength_m"] = *c.wavelength_m;
    j["carrier"] = s;
  }
  {
    Json s;
    s["m_x"] = c.m_x;
    s["m_y"] = c.m_y;
    if (c.spacing_x_m) s["spacing_x_m"] = *c.spacing_x_m;
    if (c.spacing_x_wavelengths) s["spacing_x_wavelengths"] = *c.spacing_x_wavelengths;
    if (c.spacing_y_m) s["spacing_y_m"] = *c.spacing_y_m;
    if (c.spacing_y_wavelengths) s["spacing_y_wavelengths"] = *c.spacing_y_wavelengths;
    j["array"] = s;
  }
  {
    Json s;
    if (const auto* p = std::get_if<SyntheticPatterns>(&c.patterns)) {
      s["synthetic"] = p->kind == PatternKind::isotropic ? "isotropic" : "dipole";
      s["n_theta"] = p->n_theta;
      s["n_phi"] = p->n_phi;
      s["accepted_power_w"] = p->accepted_power_w;
    } else {
      const auto& fp = std::get<FilePatterns>(c.patterns);
      Json up = Json::array(), down = Json::array();
      for (const auto& f : fp.uplink_files) up.push_back(f.string());
      for (const auto& f : fp.downlink_files) down.push_back(f.string());
      s["uplink_files"] = up;
      s["downlink_files"] = down;
      s["accepted_power_w"] = fp.accepted_power_w;
      s["ref_distance_m"] = fp.ref_distance_m;
    }
    j["patterns"] = s;
  }
  {
    Json s;
    if (const auto* k = std::get_if<SyntheticCoupling>(&c.coupling)) {
      s["synthetic"] = Json{{"c0", k->c0}, {"alpha", k->alpha}};
    } else {
      const auto& tc = std::get<TouchstoneCoupling>(c.coupling);
      Json t;
      t["path"] = tc.path.string();
      if (tc.frequency_hz) t["frequency_hz"] = *tc.frequency_hz;
      s["touchstone"] = t;
    }
    j["coupling"] = s;
  }
  j["elements"] = Json{{"uplink", c.uplink_elements}, {"downlink", c.downlink_elements}};
  {
    auto users = [](const std::vector<UserSpec>& list) {
      Json a = Json::array();
      for (const UserSpec& u : list)
        a.push_back(Json{{"theta_deg", u.theta_deg},
                         {"phi_deg", u.phi_deg},
                         {"distance_m", u.distance_m}});
      return a;
    };
    j["users"] = Json{{"uplink", users(c.uplink_users)},
                      {"downlink", users(c.downlink_users)}};
  }
  j["powers"] = Json{{"p_up_w", c.powers.p_up_w}, {"p_down_w", c.powers.p_down_w}};
  j["noise"] = Json{{"p_n_w", c.noise.p_n_w},
                    {"k_dyn", c.noise.k_dyn},
                    {"convention", c.noise_convention == NoiseConvention::covariance
                                       ? "covariance"
                                       : "power_vector"}};
  j["phase"] = Json{{"phi_delta_up_rad", c.phase.phi_delta_up},
                    {"phi_delta_down_rad", c.phase.phi_delta_down},
                    {"c_up", Json::array({c.phase.c_up.real(), c.phase.c_up.imag()})},
                    {"c_down", Json::array({c.phase.c_down.real(), c.phase.c_down.imag()})}};
  j["channel"] =
      Json{{"model", c.channel_model == ChannelModel::los ? "los" : "rayleigh"},
           {"seed", c.seed},
           {"field_sharing", c.rayleigh.per_element_fields ? "per_element" : "per_user"},
           {"quadrature_n_theta", c.rayleigh.n_theta},
           {"quadrature_n_phi", c.rayleigh.n_phi},
           {"angle_mode", c.angle_mode == AngleMode::shared_origin ? "shared_origin"
                                                                   : "exact_per_element"}};
  if (c.partition)
    j["partition"] = Json{{"n_up", c.partition->n_up}, {"n_down", c.partition->n_down}};
  else
    j["partition"] = "search";
  return j;
}

} // namespace fdlink

#endif
