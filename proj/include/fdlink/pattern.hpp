#ifndef FDLINK_PATTERN_HPP
#define FDLINK_PATTERN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fdlink/constants.hpp"
#include "fdlink/errors.hpp"

namespace fdlink {

enum class LinkRole { uplink, downlink };

/// Complex far-field sample of one antenna element: the two spherical
/// polarization components at a grid node, in V/m at the reference distance.
struct FieldSample {
  std::complex<double> e_theta;
  std::complex<double> e_phi;

  double power_density_numerator() const {
    return std::norm(e_theta) + std::norm(e_phi);
  }
};

/// Far-field radiation pattern of a single antenna element, sampled on a
/// rectangular (theta, phi) grid over the reference sphere of radius
/// ref_distance_m. Immutable after construction; safe to share across
/// threads.
struct RadiationPattern {
  std::vector<double> theta_grid; // radians, ascending, within [0, pi]
  std::vector<double> phi_grid;   // radians, ascending, within [0, 2*pi)
  Eigen::MatrixXcd e_theta;       // n_theta x n_phi
  Eigen::MatrixXcd e_phi;         // n_theta x n_phi
  double ref_distance_m = 1.0;
  double wavelength_m = 0.0;
  double accepted_power_w = 0.0;
  LinkRole link_role = LinkRole::uplink;

  Eigen::Index n_theta() const { return Eigen::Index(theta_grid.size()); }
  Eigen::Index n_phi() const { return Eigen::Index(phi_grid.size()); }
};

/// Grid/shape and positivity invariants. Throws std::invalid_argument.
inline void validate_pattern(const RadiationPattern& p) {
  if (p.theta_grid.empty() || p.phi_grid.empty())
    throw std::invalid_argument("pattern: empty grid");
  if (p.e_theta.rows() != p.n_theta() || p.e_theta.cols() != p.n_phi() ||
      p.e_phi.rows() != p.n_theta() || p.e_phi.cols() != p.n_phi())
    throw std::invalid_argument("pattern: sample matrix shape does not match grid");
  if (!std::is_sorted(p.theta_grid.begin(), p.theta_grid.end()) ||
      std::adjacent_find(p.theta_grid.begin(), p.theta_grid.end()) != p.theta_grid.end())
    throw std::invalid_argument("pattern: theta grid not strictly ascending");
  if (!std::is_sorted(p.phi_grid.begin(), p.phi_grid.end()) ||
      std::adjacent_find(p.phi_grid.begin(), p.phi_grid.end()) != p.phi_grid.end())
    throw std::invalid_argument("pattern: phi grid not strictly ascending");
  if (p.theta_grid.front() < 0.0 || p.theta_grid.back() > kPi + 1e-12)
    throw std::invalid_argument("pattern: theta outside [0, pi]");
  if (p.phi_grid.front() < 0.0 || p.phi_grid.back() >= kTwoPi)
    throw std::invalid_argument("pattern: phi outside [0, 2*pi)");
  if (!(p.ref_distance_m > 0.0))
    throw std::invalid_argument("pattern: ref_distance_m must be > 0");
  if (!(p.wavelength_m > 0.0))
    throw std::invalid_argument("pattern: wavelength_m must be > 0");
  if (!(p.accepted_power_w > 0.0))
    throw std::invalid_argument("pattern: accepted_power_w must be > 0");
}

/// Trapezoid weights for the (non-periodic) theta direction.
inline std::vector<double> theta_quadrature_weights(const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = kPi; // single row stands in for the whole polar range
    return w;
  }
  w[0] = 0.5 * (grid[1] - grid[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
  w[n - 1] = 0.5 * (grid[n - 1] - grid[n - 2]);
  return w;
}

/// Weights for integrals of f(theta)*sin(theta): the integrand f is taken
/// piecewise linear between nodes and the sin(theta) factor is integrated
/// exactly per interval. Exact for constant f, so the isotropic fixture
/// integrates to its accepted power to rounding.
inline std::vector<double> theta_sin_quadrature_weights(const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = 2.0; // integral of sin(theta) over the full polar range
    return w;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = grid[i], b = grid[i + 1];
    const double h = b - a;
    const double i0 = std::cos(a) - std::cos(b);         // int sin
    const double i1 = (std::sin(b) - std::sin(a)) / h -  // int (theta-a)/h * sin
                      std::cos(b);
    w[i] += i0 - i1;
    w[i + 1] += i1;
  }
  return w;
}

/// Periodic trapezoid weights for the phi direction; the gap between the
/// last node and the first node + 2*pi closes the circle. A single node
/// carries the full 2*pi.
inline std::vector<double> phi_quadrature_weights(const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = kTwoPi;
    return w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double next = (i + 1 < n) ? grid[i + 1] : grid[0] + kTwoPi;
    double prev = (i > 0) ? grid[i - 1] : grid[n - 1] - kTwoPi;
    w[i] = 0.5 * (next - prev);
  }
  return w;
}

namespace detail {

inline double wrap_phi(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0; // fmod can land exactly on 2*pi
  return w;
}

// Index of the interval [grid[i], grid[i+1]] containing x, clamped to the
// grid range; t is the local coordinate in [0, 1].
inline void locate(const std::vector<double>& grid, double x, std::size_t& i, double& t) {
  const std::size_t n = grid.size();
  if (n == 1 || x <= grid.front()) {
    i = 0;
    t = 0.0;
    return;
  }
  if (x >= grid.back()) {
    i = n - 2;
    t = 1.0;
    return;
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  i = std::size_t(it - grid.begin()) - 1;
  t = (x - grid[i]) / (grid[i + 1] - grid[i]);
}

} // namespace detail

/// Bilinear interpolation of the stored field at (theta, phi). Real and
/// imaginary parts interpolate independently per component; phi wraps
/// periodically across the 2*pi seam; theta queries beyond the grid clamp
/// to the nearest row, which also serves the poles.
inline FieldSample sample_pattern(const RadiationPattern& p, double theta, double phi) {
  phi = detail::wrap_phi(phi);

  std::size_t it = 0;
  double tt = 0.0;
  detail::locate(p.theta_grid, theta, it, tt);
  const std::size_t it1 = (p.theta_grid.size() == 1) ? it : it + 1;

  // phi interval, with wrap between the last and first node
  const std::size_t np = p.phi_grid.size();
  std::size_t ip0 = 0, ip1 = 0;
  double tp = 0.0;
  if (np == 1) {
    ip0 = ip1 = 0;
  } else if (phi < p.phi_grid.front()) {
    ip0 = np - 1;
    ip1 = 0;
    double gap = p.phi_grid.front() + kTwoPi - p.phi_grid.back();
    tp = (phi + kTwoPi - p.phi_grid.back()) / gap;
  } else if (phi >= p.phi_grid.back()) {
    ip0 = np - 1;
    ip1 = 0;
    double gap = p.phi_grid.front() + kTwoPi - p.phi_grid.back();
    tp = (phi - p.phi_grid.back()) / gap;
  } else {
    detail::locate(p.phi_grid, phi, ip0, tp);
    ip1 = ip0 + 1;
  }

  auto lerp2 = [&](const Eigen::MatrixXcd& m) {
    std::complex<double> a = m(Eigen::Index(it), Eigen::Index(ip0));
    std::complex<double> b = m(Eigen::Index(it), Eigen::Index(ip1));
    std::complex<double> c = m(Eigen::Index(it1), Eigen::Index(ip0));
    std::complex<double> d = m(Eigen::Index(it1), Eigen::Index(ip1));
    // (1-t)*x + t*y is exact at both endpoints
    std::complex<double> top = (1.0 - tp) * a + tp * b;
    std::complex<double> bot = (1.0 - tp) * c + tp * d;
    return (1.0 - tt) * top + tt * bot;
  };
  return {lerp2(p.e_theta), lerp2(p.e_phi)};
}

/// Realized gain from the stored field and the accepted port power:
/// G = ||E||^2 * 2*pi*d0^2 / (P0 * eta0), with ||E||^2 summing both
/// polarization components.
inline double gain(const RadiationPattern& p, double theta, double phi) {
  FieldSample s = sample_pattern(p, theta, phi);
  return s.power_density_numerator() * kTwoPi * p.ref_distance_m * p.ref_distance_m /
         (p.accepted_power_w * kEta0Ohm);
}

/// Sphere integral of the radiated power density at the reference distance,
/// trapezoid in theta with sin(theta) weight, periodic trapezoid in phi.
inline double total_radiated_power(const RadiationPattern& p) {
  if (p.theta_grid.size() < 2)
    throw std::invalid_argument("total_radiated_power: needs n_theta >= 2");
  const std::vector<double> wt = theta_sin_quadrature_weights(p.theta_grid);
  const std::vector<double> wp = phi_quadrature_weights(p.phi_grid);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.n_theta(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < p.n_phi(); ++j) {
      double u = std::norm(p.e_theta(i, j)) + std::norm(p.e_phi(i, j));
      row += u * wp[std::size_t(j)];
    }
    acc += row * wt[std::size_t(i)];
  }
  return acc * p.ref_distance_m * p.ref_distance_m / (2.0 * kEta0Ohm);
}

inline double radiation_efficiency(const RadiationPattern& p) {
  return total_radiated_power(p) / p.accepted_power_w;
}

namespace detail {

inline std::vector<double> uniform_grid(double lo, double hi, int n, bool include_hi) {
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = include_hi ? (hi - lo) / double(n - 1) : (hi - lo) / double(n);
  for (int i = 0; i < n; ++i) g[std::size_t(i)] = lo + step * double(i);
  return g;
}

} // namespace detail

/// Unit-gain fixture: every sample has ||E||^2 = eta0*P0/(2*pi*d0^2) and
/// zero phase, so the realized gain is exactly 1 in every direction.
inline RadiationPattern synthesize_isotropic(double wavelength_m, double accepted_power_w,
                                             int n_theta, int n_phi,
                                             LinkRole role = LinkRole::uplink) {
  if (n_theta < 2 || n_phi < 1)
    throw std::invalid_argument("synthesize_isotropic: need n_theta >= 2, n_phi >= 1");
  RadiationPattern p;
  p.theta_grid = detail::uniform_grid(0.0, kPi, n_theta, true);
  p.phi_grid = detail::uniform_grid(0.0, kTwoPi, n_phi, false);
  p.ref_distance_m = 1.0;
  p.wavelength_m = wavelength_m;
  p.accepted_power_w = accepted_power_w;
  p.link_role = role;
  const double mag = std::sqrt(kEta0Ohm * accepted_power_w /
                               (kTwoPi * p.ref_distance_m * p.ref_distance_m));
  p.e_theta = Eigen::MatrixXcd::Constant(n_theta, n_phi, {mag, 0.0});
  p.e_phi = Eigen::MatrixXcd::Zero(n_theta, n_phi);
  validate_pattern(p);
  return p;
}

/// Lossless Hertzian dipole fixture along z: gain(theta) = 1.5*sin^2(theta).
inline RadiationPattern synthesize_dipole(double wavelength_m, double accepted_power_w,
                                          int n_theta, int n_phi,
                                          LinkRole role = LinkRole::uplink) {
  if (n_theta < 2 || n_phi < 1)
    throw std::invalid_argument("synthesize_dipole: need n_theta >= 2, n_phi >= 1");
  RadiationPattern p;
  p.theta_grid = detail::uniform_grid(0.0, kPi, n_theta, true);
  p.phi_grid = detail::uniform_grid(0.0, kTwoPi, n_phi, false);
  p.ref_distance_m = 1.0;
  p.wavelength_m = wavelength_m;
  p.accepted_power_w = accepted_power_w;
  p.link_role = role;
  const double peak = std::sqrt(1.5 * kEta0Ohm * accepted_power_w /
                                (kTwoPi * p.ref_distance_m * p.ref_distance_m));
  p.e_theta.resize(n_theta, n_phi);
  p.e_phi = Eigen::MatrixXcd::Zero(n_theta, n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double st = std::sin(p.theta_grid[std::size_t(i)]);
    for (int j = 0; j < n_phi; ++j) p.e_theta(i, j) = {peak * st, 0.0};
  }
  validate_pattern(p);
  return p;
}

} // namespace fdlink

#endif
