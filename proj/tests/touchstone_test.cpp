#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>

#include "fdlink/coupling.hpp"
#include "fdlink/touchstone.hpp"

using namespace fdlink;

namespace {

const std::filesystem::path kData = FDLINK_TEST_DATA_DIR;

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

} // namespace

TEST(Touchstone, TwoPortSingleRowRi) {
  const auto path = temp_file("fdlink_min.s2p");
  write_file(path, "# GHz S RI R 50\n1.0 0 0 0.5 0 0.5 0 0 0\n");
  const TouchstoneData d = parse_touchstone(path);
  ASSERT_EQ(d.n_ports, 2);
  ASSERT_EQ(d.frequencies_hz.size(), 1u);
  EXPECT_EQ(d.frequencies_hz[0], 1e9);
  // S11 S21 S12 S22 ordering
  EXPECT_EQ(d.matrices[0](0, 0), std::complex<double>(0.0, 0.0));
  EXPECT_EQ(d.matrices[0](1, 0), std::complex<double>(0.5, 0.0));
  EXPECT_EQ(d.matrices[0](0, 1), std::complex<double>(0.5, 0.0));
  EXPECT_EQ(d.matrices[0](1, 1), std::complex<double>(0.0, 0.0));
}

TEST(Touchstone, MagnitudeAngleConversion) {
  const auto path = temp_file("fdlink_ma.s1p");
  write_file(path, "# MHz S MA R 50\n100 0.5 90\n");
  const TouchstoneData d = parse_touchstone(path);
  EXPECT_NEAR(std::abs(d.matrices[0](0, 0) - std::complex<double>(0.0, 0.5)), 0.0, 1e-12);
  EXPECT_EQ(d.frequencies_hz[0], 1e8);
}

TEST(Touchstone, DbConversion) {
  const auto path = temp_file("fdlink_db.s1p");
  write_file(path, "# HZ S DB R 50\n42 -6.0206 0\n");
  const TouchstoneData d = parse_touchstone(path);
  EXPECT_NEAR(d.matrices[0](0, 0).real(), 0.5, 1e-4);
  EXPECT_NEAR(d.matrices[0](0, 0).imag(), 0.0, 1e-12);
}

TEST(Touchstone, BundledTwoPortVariantsAgree) {
  const TouchstoneData ri = parse_touchstone(kData / "twoport_ri.s2p");
  const TouchstoneData ma = parse_touchstone(kData / "twoport_ma.s2p");
  const TouchstoneData db = parse_touchstone(kData / "twoport_db.s2p");
  ASSERT_EQ(ri.frequencies_hz.size(), 3u);
  ASSERT_EQ(ma.frequencies_hz.size(), 3u);
  ASSERT_EQ(db.frequencies_hz.size(), 3u);
  for (std::size_t f = 0; f < 3; ++f)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        EXPECT_NEAR(std::abs(ri.matrices[f](i, j) - ma.matrices[f](i, j)), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(ri.matrices[f](i, j) - db.matrices[f](i, j)), 0.0, 1e-9);
      }
}

TEST(Touchstone, BundledFourPortVariantsAgree) {
  const TouchstoneData ri = parse_touchstone(kData / "fourport_ri.s4p");
  const TouchstoneData ma = parse_touchstone(kData / "fourport_ma.s4p");
  const TouchstoneData db = parse_touchstone(kData / "fourport_db.s4p");
  ASSERT_EQ(ri.n_ports, 4);
  ASSERT_EQ(ri.frequencies_hz.size(), 1u);
  EXPECT_EQ(ri.frequencies_hz[0], 3.5e9);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(std::abs(ri.matrices[0](i, j) - ma.matrices[0](i, j)), 0.0, 1e-9);
      EXPECT_NEAR(std::abs(ri.matrices[0](i, j) - db.matrices[0](i, j)), 0.0, 1e-9);
    }
  // reciprocal fixture
  ScatteringMatrix s{ri.matrices[0], ri.frequencies_hz[0], 50.0};
  EXPECT_LT(reciprocity_defect(s), 1e-12);
}

TEST(Touchstone, NearestFrequencySelection) {
  const TouchstoneData d = parse_touchstone(kData / "twoport_ri.s2p");
  const FrequencySelection sel = select_frequency(d, 2.2e9);
  EXPECT_EQ(sel.matrix.frequency_hz, 2e9);
  EXPECT_NEAR(sel.delta_hz, -0.2e9, 1.0);
  double delta = 0.0;
  const ScatteringMatrix s = load_touchstone(kData / "twoport_ri.s2p", 2.9e9, &delta);
  EXPECT_EQ(s.frequency_hz, 3e9);
  EXPECT_NEAR(delta, 0.1e9, 1.0);
}

TEST(Touchstone, WriteReadRoundTrip) {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> dist(-0.6, 0.6);
  TouchstoneData d;
  d.n_ports = 3;
  d.reference_impedance_ohm = 75.0;
  for (double f : {1.0e9, 1.5e9}) {
    Eigen::MatrixXcd s(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s(i, j) = std::complex<double>(dist(gen), dist(gen));
    d.frequencies_hz.push_back(f);
    d.matrices.push_back(s);
  }
  const auto path = temp_file("fdlink_rt.s3p");
  write_touchstone(d, path);
  const TouchstoneData back = parse_touchstone(path);
  ASSERT_EQ(back.n_ports, 3);
  ASSERT_EQ(back.frequencies_hz.size(), 2u);
  EXPECT_EQ(back.reference_impedance_ohm, 75.0);
  for (std::size_t f = 0; f < 2; ++f) {
    EXPECT_NEAR(back.frequencies_hz[f], d.frequencies_hz[f], 1e-9);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(std::abs(back.matrices[f](i, j) - d.matrices[f](i, j)), 0.0, 1e-9);
  }
}

TEST(Touchstone, TwoPortRoundTripKeepsOrderingQuirk) {
  TouchstoneData d;
  d.n_ports = 2;
  d.frequencies_hz = {1e9};
  Eigen::MatrixXcd s(2, 2);
  s << std::complex<double>(0.1, 0.0), std::complex<double>(0.3, 0.1),
      std::complex<double>(0.2, -0.1), std::complex<double>(0.4, 0.0);
  d.matrices = {s};
  const auto path = temp_file("fdlink_rt2.s2p");
  write_touchstone(d, path);
  const TouchstoneData back = parse_touchstone(path);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      EXPECT_NEAR(std::abs(back.matrices[0](i, j) - s(i, j)), 0.0, 1e-9);
}

TEST(Touchstone, ErrorsAreDiagnosed) {
  const auto y_type = temp_file("fdlink_y.s2p");
  write_file(y_type, "# GHz Y RI R 50\n1 0 0 0 0 0 0 0 0\n");
  EXPECT_THROW(parse_touchstone(y_type), ParseError);

  const auto bad_tok = temp_file("fdlink_badopt.s2p");
  write_file(bad_tok, "# GHz S RI R50\n1 0 0 0 0 0 0 0 0\n");
  EXPECT_THROW(parse_touchstone(bad_tok), ParseError);

  const auto truncated = temp_file("fdlink_short.s2p");
  write_file(truncated, "# GHz S RI R 50\n1 0 0 0.5 0 0.5 0\n");
  EXPECT_THROW(parse_touchstone(truncated), ParseError);

  const auto empty = temp_file("fdlink_empty.s2p");
  write_file(empty, "! nothing here\n# GHz S RI R 50\n");
  EXPECT_THROW(parse_touchstone(empty), ParseError);

  const auto bad_ext = temp_file("fdlink_bad.snp");
  write_file(bad_ext, "# GHz S RI R 50\n1 0 0\n");
  EXPECT_THROW(parse_touchstone(bad_ext), ParseError);

  const auto descending = temp_file("fdlink_desc.s1p");
  write_file(descending, "# GHz S RI R 50\n2 0 0\n1 0 0\n");
  EXPECT_THROW(parse_touchstone(descending), ParseError);

  EXPECT_THROW(parse_touchstone("/nonexistent/file.s2p"), IoError);
}

TEST(Scattering, PassivityWarningsAreWarningsOnly) {
  ScatteringMatrix s;
  s.entries = Eigen::MatrixXcd::Zero(2, 2);
  s.entries(0, 1) = {1.005, 0.0};
  s.frequency_hz = 1e9;
  const auto warnings = scattering_warnings(s);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("non-passive"), std::string::npos);
  s.entries(0, 1) = {0.5, 0.0};
  EXPECT_TRUE(scattering_warnings(s).empty());
}

TEST(Scattering, ReciprocityCheck) {
  ScatteringMatrix s;
  s.entries = Eigen::MatrixXcd::Zero(2, 2);
  s.entries(0, 1) = {0.5, 0.0};
  s.entries(1, 0) = {0.5, 1e-3};
  EXPECT_THROW(check_reciprocal(s), std::invalid_argument);
  s.entries(1, 0) = {0.5, 0.0};
  EXPECT_NO_THROW(check_reciprocal(s));
}

TEST(HSelf, PicksSingleCoupling) {
  ScatteringMatrix s;
  s.entries = Eigen::MatrixXcd::Zero(2, 2);
  s.entries(0, 1) = {0.25, -0.1};
  s.entries(1, 0) = {0.25, -0.1};
  const SelfInterferenceMatrix h = build_h_self(s, {1}, {2});
  ASSERT_EQ(h.entries.rows(), 1);
  ASSERT_EQ(h.entries.cols(), 1);
  EXPECT_EQ(h.entries(0, 0), s.entries(0, 1));
}

TEST(HSelf, SwappedSidesTransposeForReciprocalNetworks) {
  const ArrayGeometry g = build_planar_array(2, 2, 0.05, 0.05);
  const ScatteringMatrix s = synthesize_coupling(g, 0.1, 0.3, 1.0);
  const SelfInterferenceMatrix a = build_h_self(s, {1, 2}, {3, 4});
  const SelfInterferenceMatrix b = build_h_self(s, {3, 4}, {1, 2});
  EXPECT_EQ(a.entries, b.entries.transpose().eval());
}

TEST(HSelf, OverlapAndRangeRejected) {
  ScatteringMatrix s;
  s.entries = Eigen::MatrixXcd::Zero(2, 2);
  try {
    build_h_self(s, {1}, {1});
    FAIL() << "expected overlap rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("overlapping"), std::string::npos);
  }
  EXPECT_THROW(build_h_self(s, {1}, {3}), std::invalid_argument);
  EXPECT_THROW(build_h_self(s, {}, {1}), std::invalid_argument);
}

TEST(HSelf, ExhaustiveIndexAudit) {
  std::mt19937 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 3 + int(gen() % 5);
    Eigen::MatrixXcd e(m, m);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) e(i, j) = std::complex<double>(dist(gen), dist(gen));
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) order[std::size_t(k)] = k + 1;
    std::shuffle(order.begin(), order.end(), gen);
    const int n_up = 1 + int(gen() % (m - 1));
    const std::vector<int> up(order.begin(), order.begin() + n_up);
    const std::vector<int> down(order.begin() + n_up, order.end());
    const ScatteringMatrix s{e, 1e9, 50.0};
    const SelfInterferenceMatrix h = build_h_self(s, up, down);
    for (std::size_t r = 0; r < up.size(); ++r)
      for (std::size_t c = 0; c < down.size(); ++c)
        EXPECT_EQ(h.entries(Eigen::Index(r), Eigen::Index(c)),
                  e(up[r] - 1, down[c] - 1));
  }
}

TEST(SyntheticCoupling, ReferenceSpacingMagnitude) {
  const double lambda = 0.1;
  const ArrayGeometry g = build_planar_array(2, 1, 0.5 * lambda, 0.5 * lambda);
  const ScatteringMatrix s = synthesize_coupling(g, lambda, 0.3, 1.0);
  EXPECT_NEAR(std::abs(s.entries(0, 1)), 0.3, 1e-12);
}

TEST(SyntheticCoupling, DecayLaw) {
  const double lambda = 0.1;
  const ArrayGeometry g = build_planar_array(2, 1, lambda, lambda);
  const ScatteringMatrix s = synthesize_coupling(g, lambda, 0.3, 1.0);
  EXPECT_NEAR(std::abs(s.entries(0, 1)), 0.15, 1e-12);
  const ScatteringMatrix s2 = synthesize_coupling(g, lambda, 0.3, 2.0);
  EXPECT_NEAR(std::abs(s2.entries(0, 1)), 0.075, 1e-12);
}

TEST(SyntheticCoupling, SymmetricZeroDiagonalPassive) {
  const double lambda = 0.1;
  const ArrayGeometry g = build_planar_array(2, 2, 0.5 * lambda, 0.5 * lambda);
  const ScatteringMatrix s = synthesize_coupling(g, lambda, 0.5, 1.0);
  EXPECT_EQ(reciprocity_defect(s), 0.0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s.entries(i, i), std::complex<double>(0.0, 0.0));
  EXPECT_TRUE(scattering_warnings(s).empty());
}

TEST(SyntheticCoupling, CoincidentElementsRejected) {
  ArrayGeometry g = build_planar_array(2, 1, 0.05, 0.05);
  g.element_positions[1] = g.element_positions[0];
  EXPECT_THROW(synthesize_coupling(g, 0.1, 0.3, 1.0), std::invalid_argument);
  const ArrayGeometry ok = build_planar_array(2, 1, 0.05, 0.05);
  EXPECT_THROW(synthesize_coupling(ok, 0.1, 1.5, 1.0), std::invalid_argument);
  EXPECT_THROW(synthesize_coupling(ok, 0.1, 0.3, 0.0), std::invalid_argument);
}
