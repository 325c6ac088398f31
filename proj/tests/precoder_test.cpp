#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "fdlink/coupling.hpp"
#include "fdlink/partition_search.hpp"
#include "fdlink/precoder.hpp"

using namespace fdlink;

namespace {

Eigen::MatrixXcd random_complex(int rows, int cols, std::mt19937& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = std::complex<double>(dist(gen), dist(gen));
  return m;
}

// Naive loop-based recomputation of P_down * ||S_r^T Sigma S_t||_F^2 with
// explicit 0/1 matrices; the oracle for the direct form.
double brute_force_si_power(const Eigen::VectorXd& sigma, int m_up, int m_down, int n_up,
                            int n_down, double p_down) {
  std::vector<std::vector<double>> s_rt(std::size_t(n_up),
                                        std::vector<double>(std::size_t(m_up), 0.0));
  for (int r = 0; r < n_up; ++r) s_rt[std::size_t(r)][std::size_t(m_up - n_up + r)] = 1.0;
  std::vector<std::vector<double>> s_t(std::size_t(m_down),
                                       std::vector<double>(std::size_t(n_down), 0.0));
  for (int c = 0; c < n_down; ++c) s_t[std::size_t(m_down - n_down + c)][std::size_t(c)] = 1.0;
  std::vector<std::vector<double>> big(std::size_t(m_up),
                                       std::vector<double>(std::size_t(m_down), 0.0));
  for (int i = 0; i < std::min(m_up, m_down); ++i)
    big[std::size_t(i)][std::size_t(i)] = sigma(i);
  // A = S_r^T * Sigma
  std::vector<std::vector<double>> a(std::size_t(n_up),
                                     std::vector<double>(std::size_t(m_down), 0.0));
  for (int r = 0; r < n_up; ++r)
    for (int c = 0; c < m_down; ++c)
      for (int k = 0; k < m_up; ++k)
        a[std::size_t(r)][std::size_t(c)] +=
            s_rt[std::size_t(r)][std::size_t(k)] * big[std::size_t(k)][std::size_t(c)];
  // B = A * S_t
  double acc = 0.0;
  for (int r = 0; r < n_up; ++r)
    for (int c = 0; c < n_down; ++c) {
      double v = 0.0;
      for (int k = 0; k < m_down; ++k)
        v += a[std::size_t(r)][std::size_t(k)] * s_t[std::size_t(k)][std::size_t(c)];
      acc += v * v;
    }
  return p_down * acc;
}

} // namespace

TEST(Svd, DiagonalMatrixIsItsOwnFactorization) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = 1.0;
  const SvdTriple t = svd_decompose(h);
  EXPECT_NEAR(t.singular_values(0), 2.0, 1e-14);
  EXPECT_NEAR(t.singular_values(1), 1.0, 1e-14);
  EXPECT_LT((t.u - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LT((t.v - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-12);
}

TEST(Svd, ZeroMatrixHasZeroSpectrum) {
  const SvdTriple t = svd_decompose(Eigen::MatrixXcd::Zero(3, 2));
  EXPECT_EQ(t.singular_values.size(), 2);
  EXPECT_EQ(t.singular_values.maxCoeff(), 0.0);
  EXPECT_LT((t.u.adjoint() * t.u - Eigen::MatrixXcd::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LT((t.v.adjoint() * t.v - Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-12);
}

TEST(Svd, RandomMatrixSuite) {
  std::mt19937 gen(42);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 1 + int(gen() % 8), n = 1 + int(gen() % 8);
    const Eigen::MatrixXcd h = random_complex(m, n, gen);
    const SvdTriple t = svd_decompose(h);
    EXPECT_LT((t.u.adjoint() * t.u - Eigen::MatrixXcd::Identity(m, m)).norm(), 1e-10);
    EXPECT_LT((t.v.adjoint() * t.v - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-10);
    const Eigen::MatrixXcd rebuilt = t.u * t.sigma_matrix() * t.v.adjoint();
    EXPECT_LT((rebuilt - h).norm(), 1e-10 * std::max(1.0, h.norm()));
    for (Eigen::Index i = 0; i + 1 < t.singular_values.size(); ++i)
      EXPECT_GE(t.singular_values(i), t.singular_values(i + 1));
    if (t.singular_values.size() > 0) EXPECT_GE(t.singular_values.minCoeff(), 0.0);
  }
}

TEST(Svd, PhaseConventionIsDeterministic) {
  std::mt19937 gen(3);
  const Eigen::MatrixXcd h = random_complex(4, 3, gen);
  const SvdTriple a = svd_decompose(h);
  const SvdTriple b = svd_decompose(h);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.singular_values, b.singular_values);
  for (Eigen::Index c = 0; c < a.u.cols(); ++c) {
    Eigen::Index imax = 0;
    a.u.col(c).cwiseAbs().maxCoeff(&imax);
    EXPECT_GT(a.u(imax, c).real(), 0.0);
    EXPECT_NEAR(a.u(imax, c).imag(), 0.0, 1e-12);
  }
}

TEST(Svd, NonFiniteRejected) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd_decompose(h), std::invalid_argument);
}

TEST(Selection, FullSelectionIsIdentity) {
  const SelectionMatrices s = selection_matrices(2, 2, 2, 2);
  EXPECT_EQ(s.s_r, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(s.s_t, Eigen::MatrixXd::Identity(2, 2));
}

TEST(Selection, BlockFormPicksLastIndices) {
  const SelectionMatrices s = selection_matrices(2, 2, 1, 1);
  Eigen::MatrixXd expect_r(2, 1);
  expect_r << 0, 1;
  EXPECT_EQ(s.s_r, expect_r);
  EXPECT_EQ(s.s_t, expect_r);
}

TEST(Selection, ExtractsTrailingSigmaBlock) {
  std::mt19937 gen(11);
  const Eigen::MatrixXcd h = random_complex(3, 2, gen);
  const SvdTriple t = svd_decompose(h);
  const SelectionMatrices s = selection_matrices(3, 2, 2, 1);
  const Eigen::MatrixXcd block = s.s_r.transpose().cast<std::complex<double>>() *
                                 t.sigma_matrix() *
                                 s.s_t.cast<std::complex<double>>();
  EXPECT_EQ(block.rows(), 2);
  EXPECT_EQ(block.cols(), 1);
  EXPECT_EQ(block(0, 0), t.sigma_matrix()(1, 1));
  EXPECT_EQ(block(1, 0), t.sigma_matrix()(2, 1));
}

TEST(Selection, BoundsRejected) {
  EXPECT_THROW(selection_matrices(2, 2, 0, 1), std::invalid_argument);
  EXPECT_THROW(selection_matrices(2, 2, 3, 1), std::invalid_argument);
  EXPECT_THROW(selection_matrices(2, 2, 1, 3), std::invalid_argument);
}

TEST(PartitionPlan, PrecodersAreOrthonormal) {
  std::mt19937 gen(13);
  const Eigen::MatrixXcd h = random_complex(4, 3, gen);
  const SvdTriple t = svd_decompose(h);
  const PartitionPlan plan = make_partition_plan(t, 2, 2);
  EXPECT_LT((plan.p_r * plan.p_r.adjoint() - Eigen::MatrixXcd::Identity(2, 2)).norm(),
            1e-12);
  EXPECT_LT((plan.p_t.adjoint() * plan.p_t - Eigen::MatrixXcd::Identity(2, 2)).norm(),
            1e-12);
}

TEST(SiPower, FullSelectionEqualsFrobeniusNorm) {
  std::mt19937 gen(17);
  const Eigen::MatrixXcd h = random_complex(4, 4, gen);
  const SvdTriple t = svd_decompose(h);
  const PartitionPlan plan = make_partition_plan(t, 4, 4);
  const double p_i = residual_si_power(t, plan, 2.0);
  EXPECT_NEAR(p_i, 2.0 * h.squaredNorm(), 1e-10 * p_i);
  const double closed = residual_si_power_closed_form(t, plan, 2.0);
  EXPECT_NEAR(p_i, closed, 1e-12 * p_i);
}

TEST(SiPower, TwoByTwoSpecCases) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = 1.0;
  const SvdTriple t = svd_decompose(h);
  // keep both receive directions, drop the strong transmit direction
  const PartitionPlan a = make_partition_plan(t, 2, 1);
  EXPECT_NEAR(residual_si_power(t, a, 1.0), 1.0, 1e-14);
  // interior partition: direct block norm keeps sigma_2, closed form is empty
  const PartitionPlan b = make_partition_plan(t, 1, 1);
  const SiPowerDiagnostic d = residual_si_power_diagnostic(t, b, 1.0);
  EXPECT_NEAR(d.direct_w, 1.0, 1e-14);
  EXPECT_EQ(d.closed_form_w, 0.0);
  EXPECT_FALSE(d.agree);
}

TEST(SiPower, DirectFormMatchesBruteForceExactly) {
  std::mt19937 gen(19);
  const Eigen::MatrixXcd h = random_complex(4, 4, gen);
  const SvdTriple t = svd_decompose(h);
  for (int n_up = 1; n_up <= 4; ++n_up)
    for (int n_down = 1; n_down <= 4; ++n_down) {
      const PartitionPlan plan = make_partition_plan(t, n_up, n_down);
      const double direct = residual_si_power(t, plan, 1.3);
      const double brute = brute_force_si_power(t.singular_values, 4, 4, n_up, n_down, 1.3);
      EXPECT_EQ(direct, brute);
    }
}

TEST(SiPower, MonotoneInBothSelections) {
  std::mt19937 gen(23);
  const Eigen::MatrixXcd h = random_complex(4, 4, gen);
  const SvdTriple t = svd_decompose(h);
  for (int n_up = 1; n_up <= 4; ++n_up)
    for (int n_down = 1; n_down <= 4; ++n_down) {
      const double here =
          residual_si_power(t, make_partition_plan(t, n_up, n_down), 1.0);
      if (n_up < 4)
        EXPECT_LE(here,
                  residual_si_power(t, make_partition_plan(t, n_up + 1, n_down), 1.0));
      if (n_down < 4)
        EXPECT_LE(here,
                  residual_si_power(t, make_partition_plan(t, n_up, n_down + 1), 1.0));
    }
}

TEST(SiPower, ClosedFormAgreesWhenOneSideFull) {
  std::mt19937 gen(29);
  const Eigen::MatrixXcd h = random_complex(5, 3, gen);
  const SvdTriple t = svd_decompose(h);
  for (int n_down = 1; n_down <= 3; ++n_down) {
    const SiPowerDiagnostic d =
        residual_si_power_diagnostic(t, make_partition_plan(t, 5, n_down), 1.0);
    EXPECT_TRUE(d.agree) << "n_down=" << n_down;
  }
  for (int n_up = 1; n_up <= 5; ++n_up) {
    const SiPowerDiagnostic d =
        residual_si_power_diagnostic(t, make_partition_plan(t, n_up, 3), 1.0);
    EXPECT_TRUE(d.agree) << "n_up=" << n_up;
  }
}

TEST(DesiredPower, FullSelectionIsUnitaryInvariant) {
  std::mt19937 gen(31);
  const Eigen::MatrixXcd h_self = random_complex(4, 4, gen);
  const Eigen::MatrixXcd h_up = random_complex(4, 2, gen);
  const SvdTriple t = svd_decompose(h_self);
  const PartitionPlan plan = make_partition_plan(t, 4, 4);
  const double p_s = desired_signal_power(plan, h_up, 1.7);
  EXPECT_NEAR(p_s, 1.7 * h_up.squaredNorm(), 1e-12 * p_s);
}

TEST(DesiredPower, ZeroChannelGivesZero) {
  std::mt19937 gen(37);
  const SvdTriple t = svd_decompose(random_complex(3, 3, gen));
  const PartitionPlan plan = make_partition_plan(t, 2, 2);
  EXPECT_EQ(desired_signal_power(plan, Eigen::MatrixXcd::Zero(3, 2), 1.0), 0.0);
}

TEST(DesiredPower, MatchesEntrywiseRecomputation) {
  std::mt19937 gen(41);
  const Eigen::MatrixXcd h_self = random_complex(4, 4, gen);
  const Eigen::MatrixXcd h_up = random_complex(4, 2, gen);
  const SvdTriple t = svd_decompose(h_self);
  const PartitionPlan plan = make_partition_plan(t, 2, 3);
  const Eigen::MatrixXcd rotated = t.u.adjoint() * h_up;
  double expect = 0.0;
  for (Eigen::Index r = 2; r < 4; ++r) // last n_up = 2 rows
    for (Eigen::Index c = 0; c < 2; ++c) expect += std::norm(rotated(r, c));
  expect *= 0.9;
  const double p_s = desired_signal_power(plan, h_up, 0.9);
  EXPECT_NEAR(p_s, expect, 1e-12 * std::max(1.0, expect));
}

TEST(Search, ZeroCouplingPrefersFullSelection) {
  const Eigen::MatrixXcd h_self = Eigen::MatrixXcd::Zero(4, 4);
  Eigen::MatrixXcd h_up(4, 1), h_down(1, 4);
  h_up << 4.0, 3.0, 2.0, 1.0;   // row powers decreasing in index
  h_down << 4.0, 3.0, 2.0, 1.0; // column powers decreasing in index
  const auto scores =
      search_partition(h_self, h_up, h_down, {1.0, 1.0}, {1e-9, 0.0});
  ASSERT_EQ(scores.size(), 16u);
  EXPECT_EQ(scores.front().n_up, 4);
  EXPECT_EQ(scores.front().n_down, 4);
  for (std::size_t i = 1; i < scores.size(); ++i)
    EXPECT_GE(scores[i - 1].sum_capacity, scores[i].sum_capacity);
}

TEST(Search, SingleFeasiblePair) {
  const Eigen::MatrixXcd h_self = Eigen::MatrixXcd::Zero(1, 1);
  Eigen::MatrixXcd h_up(1, 1), h_down(1, 1);
  h_up << 1.0;
  h_down << 1.0;
  const auto scores = search_partition(h_self, h_up, h_down, {1.0, 1.0}, {1e-9, 0.0});
  ASSERT_EQ(scores.size(), 1u);
  EXPECT_EQ(scores[0].n_up, 1);
  EXPECT_EQ(scores[0].n_down, 1);
}

TEST(Search, ConstraintsPruneThePairSet) {
  std::mt19937 gen(47);
  const Eigen::MatrixXcd h_self = random_complex(3, 3, gen);
  const Eigen::MatrixXcd h_up = random_complex(3, 1, gen);
  const Eigen::MatrixXcd h_down = random_complex(1, 3, gen);
  PartitionSearchOptions opts;
  opts.constraint.max_total = 4;
  const auto scores = search_partition(h_self, h_up, h_down, {1.0, 1.0}, {1e-9, 0.0}, opts);
  for (const auto& s : scores) EXPECT_LE(s.n_up + s.n_down, 4);
  EXPECT_EQ(scores.size(), 6u); // pairs of (1..3)x(1..3) with sum <= 4
}

TEST(Search, RerunIsDeterministic) {
  std::mt19937 gen(53);
  const Eigen::MatrixXcd h_self = random_complex(3, 3, gen);
  const Eigen::MatrixXcd h_up = random_complex(3, 2, gen);
  const Eigen::MatrixXcd h_down = random_complex(2, 3, gen);
  const auto a = search_partition(h_self, h_up, h_down, {1.0, 1.0}, {1e-10, 1e-4});
  const auto b = search_partition(h_self, h_up, h_down, {1.0, 1.0}, {1e-10, 1e-4});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].n_up, b[i].n_up);
    EXPECT_EQ(a[i].n_down, b[i].n_down);
    EXPECT_EQ(a[i].sum_capacity, b[i].sum_capacity);
  }
}
