#ifndef FDLINK_PRECODER_HPP
#define FDLINK_PRECODER_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fdlink/errors.hpp"

namespace fdlink {

/// Full SVD of the self-interference channel, H_self = U * Sigma * V^H,
/// singular values descending. Column phases follow a deterministic
/// convention so repeated runs produce identical factors.
struct SvdTriple {
  Eigen::MatrixXcd u;               // M_up x M_up, unitary
  Eigen::VectorXd singular_values;  // min(M_up, M_down), descending
  Eigen::MatrixXcd v;               // M_down x M_down, unitary

  Eigen::Index m_up() const { return u.rows(); }
  Eigen::Index m_down() const { return v.rows(); }

  /// Sigma as the rectangular M_up x M_down diagonal matrix.
  Eigen::MatrixXcd sigma_matrix() const {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m_up(), m_down());
    for (Eigen::Index i = 0; i < singular_values.size(); ++i)
      s(i, i) = singular_values(i);
    return s;
  }
};

namespace detail {

// Rotate column c of m so its largest-magnitude entry becomes real positive;
// returns the applied rotation (1 when the column is all zero).
inline std::complex<double> phase_normalize_column(Eigen::MatrixXcd& m, Eigen::Index c) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double a = std::abs(m(i, c));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best <= 0.0) return {1.0, 0.0};
  const std::complex<double> rot = std::conj(m(imax, c)) / best;
  m.col(c) *= rot;
  return rot;
}

} // namespace detail

/// Full SVD with descending singular values and the phase convention: the
/// largest-magnitude entry of each U column is made real positive, the same
/// rotation applied to the paired V column; unpaired trailing columns are
/// normalized independently.
inline SvdTriple svd_decompose(const Eigen::MatrixXcd& h_self) {
  if (!h_self.allFinite())
    throw std::invalid_argument("svd_decompose: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_self,
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdTriple t;
  t.u = svd.matrixU();
  t.v = svd.matrixV();
  t.singular_values = svd.singularValues();
  if (!t.u.allFinite() || !t.v.allFinite() || !t.singular_values.allFinite())
    throw NumericalError("svd_decompose: SVD did not converge");

  const Eigen::Index paired = std::min(t.u.cols(), t.v.cols());
  for (Eigen::Index c = 0; c < t.u.cols(); ++c) {
    const std::complex<double> rot = detail::phase_normalize_column(t.u, c);
    if (c < paired) t.v.col(c) *= rot;
  }
  for (Eigen::Index c = paired; c < t.v.cols(); ++c)
    detail::phase_normalize_column(t.v, c);
  return t;
}

/// 0/1 selection matrices of the block form S_r^T = [0 I_{n_up}],
/// S_t = [0; I_{n_down}]: with descending singular values, the last n
/// effective antennas are the weakest coupling directions.
struct SelectionMatrices {
  Eigen::MatrixXd s_r; // m_up x n_up
  Eigen::MatrixXd s_t; // m_down x n_down
};

inline SelectionMatrices selection_matrices(int m_up, int m_down, int n_up, int n_down) {
  if (n_up < 1 || n_up > m_up || n_down < 1 || n_down > m_down)
    throw std::invalid_argument("selection_matrices: need 1 <= n <= m on both sides");
  SelectionMatrices s;
  s.s_r = Eigen::MatrixXd::Zero(m_up, n_up);
  for (int c = 0; c < n_up; ++c) s.s_r(m_up - n_up + c, c) = 1.0;
  s.s_t = Eigen::MatrixXd::Zero(m_down, n_down);
  for (int c = 0; c < n_down; ++c) s.s_t(m_down - n_down + c, c) = 1.0;
  return s;
}

/// Antenna partition (N_up, N_down) with the derived eigen-beamforming
/// precoders P_r = S_r^T U^H (rows orthonormal) and P_t = V S_t (columns
/// orthonormal).
struct PartitionPlan {
  int n_up = 0;
  int n_down = 0;
  Eigen::MatrixXd s_r; // m_up x n_up
  Eigen::MatrixXd s_t; // m_down x n_down
  Eigen::MatrixXcd p_r; // n_up x m_up
  Eigen::MatrixXcd p_t; // m_down x n_down
};

inline PartitionPlan make_partition_plan(const SvdTriple& svd, int n_up, int n_down) {
  SelectionMatrices sel =
      selection_matrices(int(svd.m_up()), int(svd.m_down()), n_up, n_down);
  PartitionPlan plan;
  plan.n_up = n_up;
  plan.n_down = n_down;
  plan.s_r = std::move(sel.s_r);
  plan.s_t = std::move(sel.s_t);
  plan.p_r = plan.s_r.transpose() * svd.u.adjoint();
  plan.p_t = svd.v * plan.s_t;
  return plan;
}

namespace detail {

// Frobenius norm squared accumulated in row-major entry order, so results
// are bit-for-bit comparable with a naive loop-based recomputation.
inline double frobenius_squared_rowmajor(const Eigen::MatrixXcd& m) {
  double acc = 0.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) acc += std::norm(m(r, c));
  return acc;
}

} // namespace detail

/// Residual self-interference power after precoding, the definitional form:
/// P_I = P_down * ||S_r^T Sigma S_t||_F^2.
inline double residual_si_power(const SvdTriple& svd, const PartitionPlan& plan,
                                double p_down_w) {
  if (plan.s_r.rows() != svd.m_up() || plan.s_t.rows() != svd.m_down())
    throw std::invalid_argument("residual_si_power: plan does not match SVD dimensions");
  const Eigen::MatrixXcd block =
      plan.s_r.transpose().cast<std::complex<double>>() * svd.sigma_matrix() *
      plan.s_t.cast<std::complex<double>>();
  return p_down_w * detail::frobenius_squared_rowmajor(block);
}

/// The literature's closed-form index sum for the residual SI power. For
/// interior partitions its lower index overshoots the first selected
/// diagonal entry and the sum comes out too small (possibly empty); use the
/// diagnostic below to surface such cases. Correct whenever one side is
/// fully selected.
inline double residual_si_power_closed_form(const SvdTriple& svd, const PartitionPlan& plan,
                                            double p_down_w) {
  const int m_up = int(svd.m_up());
  const int m_down = int(svd.m_down());
  const int lo = m_up + m_down - (plan.n_up + plan.n_down) + 1; // 1-based
  const int hi = std::min(m_up, m_down);
  double acc = 0.0;
  for (int i = lo; i <= hi; ++i) {
    const double s = svd.singular_values(i - 1);
    acc += s * s;
  }
  return p_down_w * acc;
}

/// Side-by-side comparison of the direct and closed-form SI powers.
struct SiPowerDiagnostic {
  double direct_w = 0.0;
  double closed_form_w = 0.0;
  bool agree = true; // within 1e-12 relative
};

inline SiPowerDiagnostic residual_si_power_diagnostic(const SvdTriple& svd,
                                                      const PartitionPlan& plan,
                                                      double p_down_w) {
  SiPowerDiagnostic d;
  d.direct_w = residual_si_power(svd, plan, p_down_w);
  d.closed_form_w = residual_si_power_closed_form(svd, plan, p_down_w);
  const double scale = std::max(d.direct_w, d.closed_form_w);
  d.agree = scale == 0.0 || std::abs(d.direct_w - d.closed_form_w) <= 1e-12 * scale;
  return d;
}

/// Desired uplink signal power, P_S = P_up * ||P_r H_up||_F^2.
inline double desired_signal_power(const PartitionPlan& plan, const Eigen::MatrixXcd& h_up,
                                   double p_up_w) {
  if (h_up.rows() != plan.p_r.cols())
    throw std::invalid_argument("desired_signal_power: H_up rows must match M_up");
  return p_up_w * (plan.p_r * h_up).squaredNorm();
}

} // namespace fdlink

#endif
