#ifndef FDLINK_COUPLING_HPP
#define FDLINK_COUPLING_HPP

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fdlink/constants.hpp"
#include "fdlink/geometry.hpp"
#include "fdlink/touchstone.hpp"

namespace fdlink {

/// Self-interference channel H_self (M_up x M_down): the mutual couplings
/// from the downlink-transmit elements into the uplink-receive elements.
struct SelfInterferenceMatrix {
  Eigen::MatrixXcd entries;
  std::vector<int> uplink_indices;   // 1-based into the M-element array
  std::vector<int> downlink_indices; // disjoint from uplink_indices
};

/// Extract H_self from the array's S-parameters:
/// entries[r][c] = S(uplink[r], downlink[c]).
inline SelfInterferenceMatrix build_h_self(const ScatteringMatrix& s,
                                           const std::vector<int>& uplink_indices,
                                           const std::vector<int>& downlink_indices) {
  const Eigen::Index m = s.ports();
  if (uplink_indices.empty() || downlink_indices.empty())
    throw std::invalid_argument("build_h_self: empty index set");
  std::set<int> seen;
  for (const std::vector<int>* side : {&uplink_indices, &downlink_indices})
    for (int k : *side) {
      if (k < 1 || k > m)
        throw std::invalid_argument("build_h_self: index " + std::to_string(k) +
                                    " out of range [1, " + std::to_string(m) + "]");
      if (!seen.insert(k).second)
        throw std::invalid_argument("build_h_self: overlapping index sets (element " +
                                    std::to_string(k) + ")");
    }
  SelfInterferenceMatrix h;
  h.uplink_indices = uplink_indices;
  h.downlink_indices = downlink_indices;
  h.entries.resize(Eigen::Index(uplink_indices.size()),
                   Eigen::Index(downlink_indices.size()));
  for (std::size_t r = 0; r < uplink_indices.size(); ++r)
    for (std::size_t c = 0; c < downlink_indices.size(); ++c)
      h.entries(Eigen::Index(r), Eigen::Index(c)) =
          s.entries(uplink_indices[r] - 1, downlink_indices[c] - 1);
  return h;
}

/// Synthetic mutual-coupling fixture for scenarios without a measured file:
/// S_ij = c0 * (lambda/(2*r_ij))^alpha * exp(-j*kappa*r_ij), S_ii = 0.
/// |S_ij| equals c0 at the 0.5-wavelength reference spacing and decays with
/// the exponent alpha. Reciprocal by construction.
inline ScatteringMatrix synthesize_coupling(const ArrayGeometry& g, double wavelength_m,
                                            double c0, double alpha) {
  if (!(c0 > 0.0) || !(c0 < 1.0))
    throw std::invalid_argument("synthesize_coupling: c0 must be in (0, 1)");
  if (!(alpha > 0.0))
    throw std::invalid_argument("synthesize_coupling: alpha must be > 0");
  const int m = g.size();
  ScatteringMatrix s;
  s.entries = Eigen::MatrixXcd::Zero(m, m);
  s.frequency_hz = kSpeedOfLight / wavelength_m;
  const double kappa = wave_number(wavelength_m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double r = (g.element_positions[std::size_t(i)] -
                        g.element_positions[std::size_t(j)])
                           .norm();
      if (r == 0.0)
        throw std::invalid_argument("synthesize_coupling: coincident elements " +
                                    std::to_string(i + 1) + " and " + std::to_string(j + 1));
      const std::complex<double> v =
          std::polar(c0 * std::pow(wavelength_m / (2.0 * r), alpha), -kappa * r);
      s.entries(i, j) = v;
      s.entries(j, i) = v;
    }
  return s;
}

} // namespace fdlink

#endif
