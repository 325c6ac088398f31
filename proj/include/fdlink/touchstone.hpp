#ifndef FDLINK_TOUCHSTONE_HPP
#define FDLINK_TOUCHSTONE_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdlink/constants.hpp"
#include "fdlink/errors.hpp"

namespace fdlink {

/// N-port S-parameters at one frequency.
struct ScatteringMatrix {
  Eigen::MatrixXcd entries; // M x M
  double frequency_hz = 0.0;
  double reference_impedance_ohm = 50.0;

  Eigen::Index ports() const { return entries.rows(); }
};

/// Entrywise checks on a scattering matrix. Passivity violations are
/// warnings, never failures, to tolerate measurement noise.
inline std::vector<std::string> scattering_warnings(const ScatteringMatrix& s) {
  std::vector<std::string> w;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < s.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < s.entries.cols(); ++j)
      worst = std::max(worst, std::abs(s.entries(i, j)));
  if (worst > 1.0) {
    std::ostringstream os;
    os << "scattering matrix has |S| up to " << worst << " (> 1, non-passive"
       << (worst <= 1.01 ? ", within measurement-noise allowance)" : ")");
    w.push_back(os.str());
  }
  return w;
}

/// Max |S - S^T| entry; antenna arrays are reciprocal so this should be ~0.
inline double reciprocity_defect(const ScatteringMatrix& s) {
  return (s.entries - s.entries.transpose()).cwiseAbs().maxCoeff();
}

inline void check_reciprocal(const ScatteringMatrix& s, double tol = 1e-6) {
  const double defect = reciprocity_defect(s);
  if (defect > tol)
    throw std::invalid_argument("scattering matrix not reciprocal: max |S - S^T| = " +
                                std::to_string(defect));
}

/// Parsed Touchstone v1 file: all frequency points, S-parameters only.
struct TouchstoneData {
  int n_ports = 0;
  double reference_impedance_ohm = 50.0;
  std::vector<double> frequencies_hz;
  std::vector<Eigen::MatrixXcd> matrices;
};

namespace detail {

enum class TsFormat { ri, ma, db };

struct TsToken {
  std::string text;
  int line;
};

inline int ports_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  // ".sNp" with N in 1..64
  if (ext.size() < 4 || (ext[1] != 's' && ext[1] != 'S') ||
      (ext.back() != 'p' && ext.back() != 'P'))
    throw ParseError(path.string() + ": expected a .sNp touchstone extension");
  int n = 0;
  for (std::size_t i = 2; i + 1 < ext.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(ext[i])))
      throw ParseError(path.string() + ": expected a .sNp touchstone extension");
    n = n * 10 + (ext[i] - '0');
  }
  if (n < 1 || n > 64)
    throw ParseError(path.string() + ": port count " + std::to_string(n) +
                     " outside supported range 1..64");
  return n;
}

inline std::complex<double> ts_to_rect(TsFormat fmt, double a, double b) {
  switch (fmt) {
  case TsFormat::ri:
    return {a, b};
  case TsFormat::ma:
    return std::polar(a, deg_to_rad(b));
  case TsFormat::db:
    return std::polar(std::pow(10.0, a / 20.0), deg_to_rad(b));
  }
  return {};
}

} // namespace detail

/// Parse a Touchstone v1 .sNp file. Supports S-parameters in RI/MA/DB
/// formats with Hz/kHz/MHz/GHz frequency units; the 2-port S11 S21 S12 S22
/// ordering quirk is honored, N >= 3 is row-major with line continuation.
/// Noise-parameter blocks are not supported.
inline TouchstoneData parse_touchstone(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open touchstone file: " + path.string());
  const int n_ports = detail::ports_from_extension(path);

  double freq_scale = 1e9; // GHz default
  detail::TsFormat fmt = detail::TsFormat::ma;
  double z0 = 50.0;
  bool have_option_line = false;

  std::vector<detail::TsToken> numbers;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      if (have_option_line)
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": multiple option lines");
      have_option_line = true;
      std::vector<std::string> toks;
      if (first.size() > 1) toks.push_back(first.substr(1));
      std::string t;
      while (ls >> t) toks.push_back(t);
      for (std::size_t i = 0; i < toks.size(); ++i) {
        std::string u = toks[i];
        std::transform(u.begin(), u.end(), u.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (u == "HZ") freq_scale = 1.0;
        else if (u == "KHZ") freq_scale = 1e3;
        else if (u == "MHZ") freq_scale = 1e6;
        else if (u == "GHZ") freq_scale = 1e9;
        else if (u == "S") { /* the only supported parameter type */ }
        else if (u == "Y" || u == "Z" || u == "G" || u == "H")
          throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": unsupported parameter type '" + u + "' (S only)");
        else if (u == "RI") fmt = detail::TsFormat::ri;
        else if (u == "MA") fmt = detail::TsFormat::ma;
        else if (u == "DB") fmt = detail::TsFormat::db;
        else if (u == "R") {
          if (i + 1 >= toks.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": option 'R' missing impedance value");
          try {
            z0 = std::stod(toks[++i]);
          } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": malformed impedance after 'R'");
          }
        } else {
          throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": malformed option line token '" + toks[i] + "'");
        }
      }
      continue;
    }
    // data line: whitespace-separated numbers, layout-agnostic
    std::istringstream ds(line);
    std::string tok;
    while (ds >> tok) {
      try {
        std::size_t pos = 0;
        (void)std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": not a number: '" + tok + "'");
      }
      numbers.push_back({tok, line_no});
    }
  }

  const std::size_t per_point = 1 + 2 * std::size_t(n_ports) * std::size_t(n_ports);
  if (numbers.empty())
    throw ParseError(path.string() + ": frequency list empty");
  if (numbers.size() % per_point != 0)
    throw ParseError(path.string() + ": data ends mid-matrix near line " +
                     std::to_string(numbers.back().line) + " (expected " +
                     std::to_string(per_point) + " values per frequency point)");

  TouchstoneData out;
  out.n_ports = n_ports;
  out.reference_impedance_ohm = z0;
  for (std::size_t base = 0; base < numbers.size(); base += per_point) {
    const double freq = std::stod(numbers[base].text) * freq_scale;
    if (!out.frequencies_hz.empty() && freq <= out.frequencies_hz.back())
      throw ParseError(path.string() + ":" + std::to_string(numbers[base].line) +
                       ": frequencies not ascending (noise-parameter blocks are "
                       "not supported)");
    Eigen::MatrixXcd s(n_ports, n_ports);
    for (int e = 0; e < n_ports * n_ports; ++e) {
      const double a = std::stod(numbers[base + 1 + 2 * std::size_t(e)].text);
      const double b = std::stod(numbers[base + 2 + 2 * std::size_t(e)].text);
      int row, col;
      if (n_ports == 2) { // S11 S21 S12 S22: column-major quirk
        row = e % 2;
        col = e / 2;
      } else {
        row = e / n_ports;
        col = e % n_ports;
      }
      s(row, col) = detail::ts_to_rect(fmt, a, b);
    }
    out.frequencies_hz.push_back(freq);
    out.matrices.push_back(std::move(s));
  }
  return out;
}

/// Nearest-neighbor frequency selection with the achieved distance.
struct FrequencySelection {
  ScatteringMatrix matrix;
  double delta_hz = 0.0;
};

inline FrequencySelection select_frequency(const TouchstoneData& data, double target_hz) {
  if (data.frequencies_hz.empty())
    throw std::invalid_argument("select_frequency: frequency list empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < data.frequencies_hz.size(); ++i)
    if (std::abs(data.frequencies_hz[i] - target_hz) <
        std::abs(data.frequencies_hz[best] - target_hz))
      best = i;
  ScatteringMatrix s;
  s.entries = data.matrices[best];
  s.frequency_hz = data.frequencies_hz[best];
  s.reference_impedance_ohm = data.reference_impedance_ohm;
  return {std::move(s), data.frequencies_hz[best] - target_hz};
}

/// Parse + select in one step; delta_hz_out reports how far the nearest
/// tabulated frequency sits from the request.
inline ScatteringMatrix load_touchstone(const std::filesystem::path& path, double target_hz,
                                        double* delta_hz_out = nullptr) {
  FrequencySelection sel = select_frequency(parse_touchstone(path), target_hz);
  if (delta_hz_out) *delta_hz_out = sel.delta_hz;
  return std::move(sel.matrix);
}

/// Write Touchstone v1, RI format, Hz unit. Values carry 17 significant
/// digits so a read-back reproduces entries well inside 1e-9.
inline void write_touchstone(const TouchstoneData& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write touchstone file: " + path.string());
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "# HZ S RI R " << fmt(data.reference_impedance_ohm) << "\n";
  const int n = data.n_ports;
  for (std::size_t p = 0; p < data.frequencies_hz.size(); ++p) {
    const Eigen::MatrixXcd& s = data.matrices[p];
    if (n == 2) {
      out << fmt(data.frequencies_hz[p]);
      for (int e = 0; e < 4; ++e) { // S11 S21 S12 S22
        const std::complex<double> v = s(e % 2, e / 2);
        out << ' ' << fmt(v.real()) << ' ' << fmt(v.imag());
      }
      out << "\n";
    } else {
      out << fmt(data.frequencies_hz[p]);
      int on_line = 0;
      for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) {
          if (on_line == 4) { // at most four complex pairs per line
            out << "\n ";
            on_line = 0;
          }
          out << ' ' << fmt(s(row, col).real()) << ' ' << fmt(s(row, col).imag());
          ++on_line;
        }
      out << "\n";
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

} // namespace fdlink

#endif
