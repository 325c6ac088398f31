#ifndef FDLINK_PATTERN_IO_HPP
#define FDLINK_PATTERN_IO_HPP

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fdlink/errors.hpp"
#include "fdlink/pattern.hpp"

namespace fdlink {

namespace detail {

inline const char* kPatternCsvHeader =
    "theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi";

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double_field(const std::string& s, const std::filesystem::path& path,
                                 int line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": not a number: '" + s + "'");
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace detail

/// Load a radiation pattern from the documented CSV format: header line
/// "theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi", one row per
/// grid node, '#' comment lines permitted before the header. Angles are
/// degrees in the file and radians in memory. The grid must be rectangular
/// and complete. Efficiency is checked at load: the integrated radiated
/// power may not exceed the accepted power (1% numerical allowance).
inline RadiationPattern load_pattern(const std::filesystem::path& path, LinkRole role,
                                     double accepted_power_w, double wavelength_m,
                                     double ref_distance_m = 1.0) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pattern file: " + path.string());

  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') continue;
    std::string stripped = line;
    if (!stripped.empty() && stripped.back() == '\r') stripped.pop_back();
    if (stripped.empty()) continue;
    if (stripped != detail::kPatternCsvHeader)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected header '" + detail::kPatternCsvHeader + "'");
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(path.string() + ": empty grid (no header found)");

  struct Row {
    double theta_deg, phi_deg;
    std::complex<double> et, ep;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != 6)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 6 fields, got " + std::to_string(fields.size()));
    Row r;
    r.theta_deg = detail::parse_double_field(fields[0], path, line_no);
    r.phi_deg = detail::parse_double_field(fields[1], path, line_no);
    r.et = {detail::parse_double_field(fields[2], path, line_no),
            detail::parse_double_field(fields[3], path, line_no)};
    r.ep = {detail::parse_double_field(fields[4], path, line_no),
            detail::parse_double_field(fields[5], path, line_no)};
    if (r.theta_deg < 0.0 || r.theta_deg > 180.0)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": theta_deg outside [0, 180]");
    if (r.phi_deg < 0.0 || r.phi_deg >= 360.0)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": phi_deg outside [0, 360)");
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError(path.string() + ": empty grid");

  std::map<double, Eigen::Index> thetas, phis;
  for (const Row& r : rows) thetas.emplace(r.theta_deg, 0);
  for (const Row& r : rows) phis.emplace(r.phi_deg, 0);
  Eigen::Index idx = 0;
  for (auto& kv : thetas) kv.second = idx++;
  idx = 0;
  for (auto& kv : phis) kv.second = idx++;

  const Eigen::Index nt = Eigen::Index(thetas.size());
  const Eigen::Index np = Eigen::Index(phis.size());
  if (Eigen::Index(rows.size()) != nt * np)
    throw ParseError(path.string() + ": non-rectangular grid (" +
                     std::to_string(rows.size()) + " rows for a " + std::to_string(nt) +
                     "x" + std::to_string(np) + " grid)");

  RadiationPattern p;
  p.theta_grid.reserve(std::size_t(nt));
  p.phi_grid.reserve(std::size_t(np));
  for (const auto& kv : thetas) p.theta_grid.push_back(deg_to_rad(kv.first));
  for (const auto& kv : phis) p.phi_grid.push_back(deg_to_rad(kv.first));
  p.e_theta.resize(nt, np);
  p.e_phi.resize(nt, np);
  p.ref_distance_m = ref_distance_m;
  p.wavelength_m = wavelength_m;
  p.accepted_power_w = accepted_power_w;
  p.link_role = role;

  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(nt, np);
  for (const Row& r : rows) {
    Eigen::Index i = thetas.at(r.theta_deg);
    Eigen::Index j = phis.at(r.phi_deg);
    if (seen(i, j)++)
      throw ParseError(path.string() + ": duplicate node (theta=" +
                       std::to_string(r.theta_deg) + ", phi=" + std::to_string(r.phi_deg) +
                       ")");
    p.e_theta(i, j) = r.et;
    p.e_phi(i, j) = r.ep;
  }

  validate_pattern(p);
  if (p.theta_grid.size() >= 2) {
    double eff = radiation_efficiency(p);
    if (!(eff > 0.0))
      throw ParseError(path.string() + ": pattern radiates no power");
    if (eff > 1.01)
      throw ParseError(path.string() + ": radiation efficiency " +
                       std::to_string(eff) + " exceeds 1 (non-passive pattern)");
  }
  return p;
}

/// Write a pattern in the same CSV format load_pattern reads. Samples are
/// emitted with 17 significant digits so a reload reproduces them
/// bit-identically.
inline void save_pattern(const RadiationPattern& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary); // LF line endings on all hosts
  if (!out) throw IoError("cannot write pattern file: " + path.string());
  out << detail::kPatternCsvHeader << "\n";
  for (Eigen::Index i = 0; i < p.n_theta(); ++i) {
    for (Eigen::Index j = 0; j < p.n_phi(); ++j) {
      out << detail::format_double(rad_to_deg(p.theta_grid[std::size_t(i)])) << ','
          << detail::format_double(rad_to_deg(p.phi_grid[std::size_t(j)])) << ','
          << detail::format_double(p.e_theta(i, j).real()) << ','
          << detail::format_double(p.e_theta(i, j).imag()) << ','
          << detail::format_double(p.e_phi(i, j).real()) << ','
          << detail::format_double(p.e_phi(i, j).imag()) << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

} // namespace fdlink

#endif
