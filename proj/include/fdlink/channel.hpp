#ifndef FDLINK_CHANNEL_HPP
#define FDLINK_CHANNEL_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fdlink/constants.hpp"
#include "fdlink/errors.hpp"
#include "fdlink/geometry.hpp"
#include "fdlink/pattern.hpp"
#include "fdlink/random.hpp"

namespace fdlink {

/// Feed-port phase offsets and the dimensionless link constants, left
/// symbolic by the model; all default to the identity.
struct LinkPhaseConfig {
  double phi_delta_up = 0.0;   // radians
  double phi_delta_down = 0.0; // radians
  std::complex<double> c_up{1.0, 0.0};
  std::complex<double> c_down{1.0, 0.0};

  double phi_delta(LinkRole role) const {
    return role == LinkRole::uplink ? phi_delta_up : phi_delta_down;
  }
  std::complex<double> c(LinkRole role) const {
    return role == LinkRole::uplink ? c_up : c_down;
  }
};

enum class Provenance { los, rayleigh };

/// Complex channel matrix: uplink is M_up x K_up (rows = base-station
/// antennas), downlink is K_down x M_down (rows = users).
struct ChannelMatrix {
  Eigen::MatrixXcd entries;
  LinkRole role = LinkRole::uplink;
  Provenance provenance = Provenance::los;
  double wavelength_m = 0.0;
};

namespace detail {

// Scalar complex field value at (theta, phi): magnitude from both
// polarization components, phase from the dominant one, which stays
// well-defined at polarization crossovers.
struct ScalarField {
  double magnitude;
  double phase;
};

inline ScalarField scalar_field(const RadiationPattern& p, double theta, double phi) {
  FieldSample s = sample_pattern(p, theta, phi);
  const double m2 = s.power_density_numerator();
  const std::complex<double> dom =
      std::abs(s.e_theta) >= std::abs(s.e_phi) ? s.e_theta : s.e_phi;
  const double phase = (dom == std::complex<double>{0.0, 0.0}) ? 0.0 : std::arg(dom);
  return {std::sqrt(m2), phase};
}

} // namespace detail

/// Single line-of-sight channel coefficient:
/// h = sqrt(G(theta,phi)) * lambda/(4*pi*d)
///     * exp(j*(Phi0(theta,phi) + Phi_delta) - j*2*pi*(d - d0)/lambda).
inline std::complex<double> los_coefficient(const RadiationPattern& p, double theta,
                                            double phi, double distance_m,
                                            const LinkPhaseConfig& phase_cfg = {}) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("los_coefficient: distance must be > 0");
  const double g = gain(p, theta, phi);
  const double mag = std::sqrt(g) * p.wavelength_m / (4.0 * kPi * distance_m);
  const double phi0 = detail::scalar_field(p, theta, phi).phase;
  const double phase = phi0 + phase_cfg.phi_delta(p.link_role) -
                       kTwoPi * (distance_m - p.ref_distance_m) / p.wavelength_m;
  return std::polar(mag, phase);
}

/// Friis received power and its field-propagation cross-check.
struct FriisRoutes {
  double friis_w;       // P0 * lambda^2 * G / (4*pi*d)^2
  double field_route_w; // ||E_r||^2 * lambda^2 / (8*pi*eta0), E_r scaled from d0 to d
};

inline FriisRoutes friis_power_routes(const RadiationPattern& p, double theta, double phi,
                                      double distance_m, double p0_w) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("friis_power_routes: distance must be > 0");
  const double g = gain(p, theta, phi);
  const double denom = 4.0 * kPi * distance_m;
  const double friis = p0_w * p.wavelength_m * p.wavelength_m * g / (denom * denom);

  FieldSample s = sample_pattern(p, theta, phi);
  const double scale = p.ref_distance_m / distance_m;
  // Field samples correspond to the pattern's own accepted power; rescale to p0_w.
  const double e2 = s.power_density_numerator() * scale * scale * (p0_w / p.accepted_power_w);
  const double field = e2 * p.wavelength_m * p.wavelength_m / (8.0 * kPi * kEta0Ohm);
  return {friis, field};
}

/// Friis power with an internal consistency assertion: the transmission
/// formula and the field-propagation route must agree to 1e-10 relative, or
/// the pattern normalization is inconsistent.
inline double friis_power_check(const RadiationPattern& p, double theta, double phi,
                                double distance_m, double p0_w) {
  FriisRoutes r = friis_power_routes(p, theta, phi, distance_m, p0_w);
  const double scale = std::max(std::abs(r.friis_w), std::abs(r.field_route_w));
  if (scale > 0.0 && std::abs(r.friis_w - r.field_route_w) > 1e-10 * scale)
    throw NumericalError("friis_power_check: transmission formula and field route "
                         "disagree; pattern normalization is inconsistent");
  return r.friis_w;
}

namespace detail {

inline void check_assembly_args(const ArrayGeometry& g,
                                const std::vector<RadiationPattern>& patterns,
                                const std::vector<UserPosition>& users,
                                const std::vector<int>& elements) {
  if (patterns.size() != elements.size())
    throw std::invalid_argument("channel assembly: one pattern per element required");
  if (users.empty()) throw std::invalid_argument("channel assembly: no users");
  for (int k : elements)
    if (k < 1 || k > g.size())
      throw std::invalid_argument("channel assembly: element index out of range");
}

inline std::vector<int> all_elements(const ArrayGeometry& g) {
  std::vector<int> v(static_cast<std::size_t>(g.size()));
  for (int k = 1; k <= g.size(); ++k) v[std::size_t(k - 1)] = k;
  return v;
}

} // namespace detail

/// Uplink LOS channel H_up (M_up x K_up): entry (i, j) is the coefficient
/// from user j to base-station element elements[i]. When `elements` is
/// empty, all geometry elements are used in order.
inline ChannelMatrix assemble_uplink(const ArrayGeometry& g,
                                     const std::vector<RadiationPattern>& patterns,
                                     const std::vector<UserPosition>& users,
                                     const LinkPhaseConfig& phase_cfg = {},
                                     std::vector<int> elements = {},
                                     AngleMode mode = AngleMode::shared_origin) {
  if (elements.empty()) elements = detail::all_elements(g);
  detail::check_assembly_args(g, patterns, users, elements);
  ChannelMatrix m;
  m.role = LinkRole::uplink;
  m.provenance = Provenance::los;
  m.wavelength_m = patterns.front().wavelength_m;
  m.entries.resize(Eigen::Index(elements.size()), Eigen::Index(users.size()));
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = 0; j < users.size(); ++j) {
      ElementPath path = element_to_user(g, elements[i], users[j], mode);
      m.entries(Eigen::Index(i), Eigen::Index(j)) =
          los_coefficient(patterns[i], path.theta, path.phi, path.distance_m, phase_cfg);
    }
  return m;
}

/// Downlink LOS channel H_down (K_down x M_down): entry (j, i) is the
/// coefficient from base-station element elements[i] to user j.
inline ChannelMatrix assemble_downlink(const ArrayGeometry& g,
                                       const std::vector<RadiationPattern>& patterns,
                                       const std::vector<UserPosition>& users,
                                       const LinkPhaseConfig& phase_cfg = {},
                                       std::vector<int> elements = {},
                                       AngleMode mode = AngleMode::shared_origin) {
  if (elements.empty()) elements = detail::all_elements(g);
  detail::check_assembly_args(g, patterns, users, elements);
  ChannelMatrix m;
  m.role = LinkRole::downlink;
  m.provenance = Provenance::los;
  m.wavelength_m = patterns.front().wavelength_m;
  m.entries.resize(Eigen::Index(users.size()), Eigen::Index(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = 0; j < users.size(); ++j) {
      ElementPath path = element_to_user(g, elements[i], users[j], mode);
      m.entries(Eigen::Index(j), Eigen::Index(i)) =
          los_coefficient(patterns[i], path.theta, path.phi, path.distance_m, phase_cfg);
    }
  return m;
}

/// Quadrature grid for the isotropic-scattering integral and whether each
/// element sees its own independent angular field.
struct RayleighConfig {
  int n_theta = 91;
  int n_phi = 180;
  bool per_element_fields = false;
};

namespace detail {

// Complex gain pattern E^G(theta, phi) = sqrt(G) * exp(j*(Phi0 - 2*pi*d0/lambda))
// evaluated on the quadrature grid, premultiplied by sin(theta) and the node
// weights so the scattering integral is a plain dot product with the field.
inline Eigen::MatrixXcd weighted_gain_pattern(const RadiationPattern& p,
                                              const std::vector<double>& thetas,
                                              const std::vector<double>& phis) {
  const std::vector<double> wt = theta_quadrature_weights(thetas);
  const std::vector<double> wp = phi_quadrature_weights(phis);
  const double ref_phase = -kTwoPi * p.ref_distance_m / p.wavelength_m;
  Eigen::MatrixXcd out(Eigen::Index(thetas.size()), Eigen::Index(phis.size()));
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double st = std::sin(thetas[i]);
    for (std::size_t j = 0; j < phis.size(); ++j) {
      ScalarField f = scalar_field(p, thetas[i], phis[j]);
      // sqrt(G) = |E| * sqrt(2*pi*d0^2/(P0*eta0))
      const double sqrt_g = f.magnitude * std::sqrt(kTwoPi * p.ref_distance_m *
                                                    p.ref_distance_m /
                                                    (p.accepted_power_w * kEta0Ohm));
      out(Eigen::Index(i), Eigen::Index(j)) =
          std::polar(sqrt_g, f.phase + ref_phase) * st * wt[i] * wp[j];
    }
  }
  return out;
}

inline Eigen::MatrixXcd draw_field(GaussianStream& rng, Eigen::Index nt, Eigen::Index np) {
  Eigen::MatrixXcd f(nt, np);
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index j = 0; j < np; ++j) f(i, j) = rng.complex_normal();
  return f;
}

} // namespace detail

/// Single Rayleigh-fading coefficient: the pattern-weighted quadrature sum
/// of an i.i.d. complex Gaussian angular field, scaled by
/// C * exp(-j*kappa*d)/d. One independent draw per quadrature node.
inline std::complex<double> rayleigh_coefficient(const RadiationPattern& p,
                                                 double distance_m,
                                                 const LinkPhaseConfig& phase_cfg,
                                                 GaussianStream& rng,
                                                 const RayleighConfig& cfg = {}) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("rayleigh_coefficient: distance must be > 0");
  const auto thetas = detail::uniform_grid(0.0, kPi, cfg.n_theta, true);
  const auto phis = detail::uniform_grid(0.0, kTwoPi, cfg.n_phi, false);
  const Eigen::MatrixXcd eg = detail::weighted_gain_pattern(p, thetas, phis);
  const Eigen::MatrixXcd field = detail::draw_field(rng, eg.rows(), eg.cols());
  const std::complex<double> integral = eg.cwiseProduct(field).sum();
  const double kappa = wave_number(p.wavelength_m);
  return phase_cfg.c(p.link_role) *
         (std::polar(1.0, -kappa * distance_m) / distance_m) * integral;
}

/// Rayleigh channel matrix. Each user gets an independent angular field
/// drawn from a sub-stream of (master_seed, user index); by default the
/// field is shared across elements so fading stays spatially correlated
/// through the element patterns. Per-element independent fields are the
/// comparison mode.
inline ChannelMatrix assemble_rayleigh(const ArrayGeometry& g,
                                       const std::vector<RadiationPattern>& patterns,
                                       const std::vector<UserPosition>& users,
                                       const LinkPhaseConfig& phase_cfg, LinkRole role,
                                       std::uint64_t master_seed,
                                       const RayleighConfig& cfg = {},
                                       std::vector<int> elements = {},
                                       AngleMode mode = AngleMode::shared_origin) {
  if (elements.empty()) elements = detail::all_elements(g);
  detail::check_assembly_args(g, patterns, users, elements);
  const auto thetas = detail::uniform_grid(0.0, kPi, cfg.n_theta, true);
  const auto phis = detail::uniform_grid(0.0, kTwoPi, cfg.n_phi, false);

  std::vector<Eigen::MatrixXcd> eg;
  eg.reserve(patterns.size());
  for (const RadiationPattern& p : patterns)
    eg.push_back(detail::weighted_gain_pattern(p, thetas, phis));

  const std::uint64_t stream_id = role == LinkRole::uplink ? 1 : 2;
  const double kappa = wave_number(patterns.front().wavelength_m);

  ChannelMatrix m;
  m.role = role;
  m.provenance = Provenance::rayleigh;
  m.wavelength_m = patterns.front().wavelength_m;
  const Eigen::Index n_el = Eigen::Index(elements.size());
  const Eigen::Index n_us = Eigen::Index(users.size());
  m.entries.resize(role == LinkRole::uplink ? n_el : n_us,
                   role == LinkRole::uplink ? n_us : n_el);

  for (std::size_t j = 0; j < users.size(); ++j) {
    GaussianStream rng = GaussianStream::substream(master_seed, stream_id, j);
    Eigen::MatrixXcd field;
    if (!cfg.per_element_fields)
      field = detail::draw_field(rng, Eigen::Index(cfg.n_theta), Eigen::Index(cfg.n_phi));
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (cfg.per_element_fields)
        field = detail::draw_field(rng, Eigen::Index(cfg.n_theta), Eigen::Index(cfg.n_phi));
      ElementPath path = element_to_user(g, elements[i], users[j], mode);
      const std::complex<double> integral = eg[i].cwiseProduct(field).sum();
      const std::complex<double> h =
          phase_cfg.c(role) * (std::polar(1.0, -kappa * path.distance_m) / path.distance_m) *
          integral;
      if (role == LinkRole::uplink)
        m.entries(Eigen::Index(i), Eigen::Index(j)) = h;
      else
        m.entries(Eigen::Index(j), Eigen::Index(i)) = h;
    }
  }
  return m;
}

} // namespace fdlink

#endif
