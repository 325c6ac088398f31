#ifndef FDLINK_GEOMETRY_HPP
#define FDLINK_GEOMETRY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fdlink/constants.hpp"

namespace fdlink {

/// Planar uniform base-station array in the z = 0 plane. theta is the polar
/// angle from +z (boresight), phi the azimuth from +x. Element indices are
/// 1-based everywhere in the public interface.
struct ArrayGeometry {
  int m_x = 0;
  int m_y = 0;
  double spacing_x_m = 0.0;
  double spacing_y_m = 0.0;
  std::vector<Eigen::Vector3d> element_positions; // row-major, x fastest

  int size() const { return m_x * m_y; }
};

/// x index of element k (1-based): ((k-1) mod m_x) + 1.
inline int element_x_index(const ArrayGeometry& g, int k) {
  return k - ((k - 1) / g.m_x) * g.m_x;
}

/// y index of element k (1-based): 1 + floor((k-1)/m_x).
inline int element_y_index(const ArrayGeometry& g, int k) {
  return 1 + (k - 1) / g.m_x;
}

inline ArrayGeometry build_planar_array(int m_x, int m_y, double spacing_x_m,
                                        double spacing_y_m) {
  if (m_x < 1 || m_y < 1)
    throw std::invalid_argument("build_planar_array: element counts must be >= 1");
  if (!(spacing_x_m > 0.0) || !(spacing_y_m > 0.0))
    throw std::invalid_argument("build_planar_array: spacings must be > 0");
  ArrayGeometry g{m_x, m_y, spacing_x_m, spacing_y_m, {}};
  g.element_positions.reserve(std::size_t(m_x) * std::size_t(m_y));
  for (int k = 1; k <= m_x * m_y; ++k) {
    const int i = element_x_index(g, k);
    const int j = element_y_index(g, k);
    g.element_positions.emplace_back((i - 1) * spacing_x_m, (j - 1) * spacing_y_m, 0.0);
  }
  return g;
}

/// User location in spherical coordinates measured from the array origin.
struct UserPosition {
  double theta = 0.0;      // radians, [0, pi]
  double phi = 0.0;        // radians
  double distance_m = 0.0; // > 0
};

inline Eigen::Vector3d user_cartesian(const UserPosition& u) {
  const double st = std::sin(u.theta);
  return u.distance_m *
         Eigen::Vector3d(st * std::cos(u.phi), st * std::sin(u.phi), std::cos(u.theta));
}

/// kappa*d >= 100 far-field sanity check; callers warn (not fail) below it.
inline bool is_far_field(double distance_m, double wavelength_m) {
  return wave_number(wavelength_m) * distance_m >= 100.0;
}

/// Spherical coordinates of the user as seen from element k.
struct ElementPath {
  double theta = 0.0;
  double phi = 0.0;
  double distance_m = 0.0;
};

/// Angles per element: shared takes the array-origin direction for every
/// element (the distances stay exact per element, preserving inter-element
/// phase differences); exact recomputes the direction from each element.
enum class AngleMode { shared_origin, exact_per_element };

inline ElementPath element_to_user(const ArrayGeometry& g, int k, const UserPosition& u,
                                   AngleMode mode = AngleMode::shared_origin) {
  if (k < 1 || k > g.size())
    throw std::invalid_argument("element_to_user: element index out of range");
  const Eigen::Vector3d pos = user_cartesian(u);
  const Eigen::Vector3d rel = pos - g.element_positions[std::size_t(k - 1)];
  const double dist = rel.norm();
  if (mode == AngleMode::shared_origin) return {u.theta, u.phi, dist};
  if (dist == 0.0) return {u.theta, u.phi, 0.0};
  double th = std::acos(std::clamp(rel.z() / dist, -1.0, 1.0));
  double ph = std::atan2(rel.y(), rel.x());
  if (ph < 0.0) ph += kTwoPi;
  return {th, ph, dist};
}

} // namespace fdlink

#endif
