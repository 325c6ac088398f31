#ifndef FDLINK_LINKBUDGET_HPP
#define FDLINK_LINKBUDGET_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

#include "fdlink/precoder.hpp"
#include "fdlink/random.hpp"

namespace fdlink {

/// Thermal floor and dynamic-range ratio of the receiver noise model.
struct NoiseConfig {
  double p_n_w = 0.0; // thermal noise floor, watts
  double k_dyn = 0.0; // dimensionless dynamic-range ratio
};

inline void validate_noise(const NoiseConfig& cfg) {
  if (!(cfg.p_n_w > 0.0))
    throw std::invalid_argument("noise: p_n_w must be > 0");
  if (!(cfg.k_dyn >= 0.0))
    throw std::invalid_argument("noise: k_dyn must be >= 0");
}

/// Per-stream transmit powers under the identity-covariance assumption.
struct TransmitPowers {
  double p_up_w = 0.0;
  double p_down_w = 0.0;
};

inline void validate_powers(const TransmitPowers& p) {
  if (!(p.p_up_w > 0.0) || !(p.p_down_w > 0.0))
    throw std::invalid_argument("powers: transmit powers must be > 0");
}

/// How the vector of per-antenna noise levels enters the SINR denominators.
/// `covariance` treats it as a diagonal noise covariance (the default,
/// dimensionally consistent and scale-invariant); `power_vector` is the
/// literal reading of the noise vector inside a Frobenius norm, kept for
/// comparison.
enum class NoiseConvention { covariance, power_vector };

/// Evaluation switches shared by the SINR operations. strict_paper swaps in
/// the literal published forms (closed-form SI index sum, downlink reference
/// numerator on the uplink channel) for side-by-side comparison.
struct LinkBudgetOptions {
  NoiseConvention convention = NoiseConvention::covariance;
  bool strict_paper = false;
};

enum class DuplexMode { precoded, reference, full_ideal, half };

/// Dynamic-range noise floor: max{P_n, K * (P_S,i + P_I,i)}. Modes without
/// self-interference pass p_i_i = 0.
inline double per_antenna_noise(double p_s_i, double p_i_i, const NoiseConfig& cfg) {
  if (p_s_i < 0.0 || p_i_i < 0.0)
    throw std::invalid_argument("per_antenna_noise: powers must be >= 0");
  return std::max(cfg.p_n_w, cfg.k_dyn * (p_s_i + p_i_i));
}

/// Per-row received powers P * ||row_i||^2 of a channel matrix.
inline Eigen::VectorXd row_powers(const Eigen::MatrixXcd& m, double p_w) {
  Eigen::VectorXd out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out(i) = p_w * m.row(i).squaredNorm();
  return out;
}

inline Eigen::VectorXd noise_levels(const Eigen::VectorXd& p_s,
                                    const Eigen::VectorXd& p_i,
                                    const NoiseConfig& cfg) {
  Eigen::VectorXd out(p_s.size());
  for (Eigen::Index i = 0; i < p_s.size(); ++i)
    out(i) = per_antenna_noise(p_s(i), p_i.size() ? p_i(i) : 0.0, cfg);
  return out;
}

namespace detail {

// Expected noise power after a linear receive stage: tr(P diag(levels) P^H)
// under the covariance convention, ||P * levels||^2 under the literal one.
inline double projected_noise_power(const Eigen::MatrixXcd& projection,
                                    const Eigen::VectorXd& levels,
                                    NoiseConvention convention) {
  if (projection.cols() != levels.size())
    throw std::invalid_argument("projected_noise_power: dimension mismatch");
  if (convention == NoiseConvention::covariance) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < projection.rows(); ++r)
      for (Eigen::Index c = 0; c < projection.cols(); ++c)
        acc += std::norm(projection(r, c)) * levels(c);
    return acc;
  }
  return (projection * levels.cast<std::complex<double>>()).squaredNorm();
}

// Unprojected aggregate: sum of levels (trace of the diagonal covariance),
// or the literal sum of squared levels.
inline double aggregate_noise_power(const Eigen::VectorXd& levels,
                                    NoiseConvention convention) {
  if (convention == NoiseConvention::covariance) return levels.sum();
  return levels.squaredNorm();
}

} // namespace detail

/// Per-antenna uplink noise levels under a partition plan: the dynamic-range
/// rule applied to P_S,i = P_up|{H_up}_i|^2 and P_I,i = P_down|{H_self V S_t}_i|^2.
inline Eigen::VectorXd uplink_noise_levels(const Eigen::MatrixXcd& h_up,
                                           const Eigen::MatrixXcd& h_self,
                                           const PartitionPlan& plan,
                                           const TransmitPowers& powers,
                                           const NoiseConfig& cfg) {
  const Eigen::VectorXd p_s = row_powers(h_up, powers.p_up_w);
  const Eigen::VectorXd p_i = row_powers(h_self * plan.p_t, powers.p_down_w);
  return noise_levels(p_s, p_i, cfg);
}

/// Uplink SINR with eigen-beamforming precoders:
/// P_up ||S_r^T U^H H_up||_F^2 over the residual SI power plus the
/// projected receiver noise.
inline double sinr_uplink_precoded(const Eigen::MatrixXcd& h_up, const SvdTriple& svd,
                                   const PartitionPlan& plan, const TransmitPowers& powers,
                                   const NoiseConfig& noise_cfg,
                                   const LinkBudgetOptions& opts = {}) {
  validate_noise(noise_cfg);
  validate_powers(powers);
  const double p_signal = desired_signal_power(plan, h_up, powers.p_up_w);
  const double p_si = opts.strict_paper
                          ? residual_si_power_closed_form(svd, plan, powers.p_down_w)
                          : residual_si_power(svd, plan, powers.p_down_w);
  // H_self V S_t = U Sigma S_t, exact through the decomposition
  const Eigen::MatrixXcd si_rows =
      svd.u * svd.sigma_matrix() * plan.s_t.cast<std::complex<double>>();
  const Eigen::VectorXd levels =
      noise_levels(row_powers(h_up, powers.p_up_w),
                   row_powers(si_rows, powers.p_down_w), noise_cfg);
  const double p_noise = detail::projected_noise_power(plan.p_r, levels, opts.convention);
  return p_signal / (p_si + p_noise);
}

/// Per-user downlink noise levels: P_S,j = P_down|{H_down V S_t}_j|^2 and no
/// interference term (no uplink-user leakage into downlink users).
inline Eigen::VectorXd downlink_noise_levels(const Eigen::MatrixXcd& h_down_effective,
                                             const TransmitPowers& powers,
                                             const NoiseConfig& cfg) {
  const Eigen::VectorXd p_s = row_powers(h_down_effective, powers.p_down_w);
  return noise_levels(p_s, Eigen::VectorXd(), cfg);
}

/// Downlink SINR with the transmit precoder: P_down ||H_down V S_t||_F^2
/// over the aggregate per-user noise.
inline double sinr_downlink_precoded(const Eigen::MatrixXcd& h_down, const SvdTriple& svd,
                                     const PartitionPlan& plan,
                                     const TransmitPowers& powers,
                                     const NoiseConfig& noise_cfg,
                                     const LinkBudgetOptions& opts = {}) {
  validate_noise(noise_cfg);
  validate_powers(powers);
  if (h_down.cols() != svd.m_down())
    throw std::invalid_argument("sinr_downlink_precoded: H_down cols must match M_down");
  const Eigen::MatrixXcd effective = h_down * plan.p_t;
  const double p_signal = powers.p_down_w * effective.squaredNorm();
  const Eigen::VectorXd levels = downlink_noise_levels(effective, powers, noise_cfg);
  return p_signal / detail::aggregate_noise_power(levels, opts.convention);
}

struct UpDownSinr {
  double up = 0.0;
  double down = 0.0;
};

/// Reference SINRs without SI reduction: all antennas transmit and receive,
/// the full coupling power lands in the uplink denominator. In strict-paper
/// mode the downlink numerator reproduces the literal uplink-channel
/// Frobenius norm.
inline UpDownSinr sinr_reference(const Eigen::MatrixXcd& h_up,
                                 const Eigen::MatrixXcd& h_down,
                                 const Eigen::MatrixXcd& h_self,
                                 const TransmitPowers& powers, const NoiseConfig& noise_cfg,
                                 const LinkBudgetOptions& opts = {}) {
  validate_noise(noise_cfg);
  validate_powers(powers);
  UpDownSinr out;
  {
    const Eigen::VectorXd p_s = row_powers(h_up, powers.p_up_w);
    const Eigen::VectorXd p_i = row_powers(h_self, powers.p_down_w);
    const Eigen::VectorXd levels = noise_levels(p_s, p_i, noise_cfg);
    const double p_si = powers.p_down_w * h_self.squaredNorm();
    out.up = powers.p_up_w * h_up.squaredNorm() /
             (p_si + detail::aggregate_noise_power(levels, opts.convention));
  }
  {
    const Eigen::VectorXd levels = downlink_noise_levels(h_down, powers, noise_cfg);
    const double numerator = opts.strict_paper ? powers.p_down_w * h_up.squaredNorm()
                                               : powers.p_down_w * h_down.squaredNorm();
    out.down = numerator / detail::aggregate_noise_power(levels, opts.convention);
  }
  return out;
}

/// Ideal full-duplex SINRs: no self-interference at all, noise from the
/// signal terms alone.
inline UpDownSinr sinr_full_ideal(const Eigen::MatrixXcd& h_up,
                                  const Eigen::MatrixXcd& h_down,
                                  const TransmitPowers& powers,
                                  const NoiseConfig& noise_cfg,
                                  const LinkBudgetOptions& opts = {}) {
  validate_noise(noise_cfg);
  validate_powers(powers);
  UpDownSinr out;
  {
    const Eigen::VectorXd levels =
        noise_levels(row_powers(h_up, powers.p_up_w), Eigen::VectorXd(), noise_cfg);
    out.up = powers.p_up_w * h_up.squaredNorm() /
             detail::aggregate_noise_power(levels, opts.convention);
  }
  {
    const Eigen::VectorXd levels = downlink_noise_levels(h_down, powers, noise_cfg);
    out.down = powers.p_down_w * h_down.squaredNorm() /
               detail::aggregate_noise_power(levels, opts.convention);
  }
  return out;
}

/// Half-duplex SINRs: each direction gets the whole M-element array for its
/// half of the time. The time sharing halves capacity, not SINR.
inline UpDownSinr sinr_half_duplex(const Eigen::MatrixXcd& h_up_half,
                                   const Eigen::MatrixXcd& h_down_half,
                                   const TransmitPowers& powers,
                                   const NoiseConfig& noise_cfg,
                                   const LinkBudgetOptions& opts = {}) {
  return sinr_full_ideal(h_up_half, h_down_half, powers, noise_cfg, opts);
}

/// Shannon capacity in bit/s/Hz; halved for half-duplex time sharing.
inline double capacity(double sinr_linear, DuplexMode mode) {
  if (!(sinr_linear >= 0.0))
    throw std::invalid_argument("capacity: SINR must be >= 0");
  const double c = std::log2(1.0 + sinr_linear);
  return mode == DuplexMode::half ? 0.5 * c : c;
}

inline double to_db(double linear) {
  return 10.0 * std::log10(linear);
}

/// Empirical mean powers of the desired, self-interference and noise terms
/// of the received uplink signal, with standard errors of the means.
struct SymbolStats {
  double p_s_w = 0.0;
  double p_i_w = 0.0;
  double p_n_w = 0.0;
  double se_p_s = 0.0;
  double se_p_i = 0.0;
  double se_p_n = 0.0;
  std::int64_t n_symbols = 0;

  double sinr() const { return p_s_w / (p_i_w + p_n_w); }
};

namespace detail {

struct RunningMean {
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t n = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  double standard_error() const {
    return n > 1 ? std::sqrt(m2 / (double(n) * double(n - 1))) : 0.0;
  }
};

inline Eigen::VectorXcd draw_cn(GaussianStream& rng, Eigen::Index n, double power_w) {
  Eigen::VectorXcd v(n);
  const double amp = std::sqrt(power_w);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = amp * rng.complex_normal();
  return v;
}

} // namespace detail

/// Symbol-level Monte-Carlo of the received uplink signal
/// y = H_up x_up + H_self x_down + n, optionally through the precoders
/// (y_hat = P_r y with x_down entering via P_t). Transmit symbols are
/// i.i.d. circular complex Gaussian; noise is drawn per antenna at its
/// dynamic-range level. Deterministic under a fixed stream.
inline SymbolStats simulate_symbols(const Eigen::MatrixXcd& h_up,
                                    const Eigen::MatrixXcd& h_self,
                                    const PartitionPlan* plan,
                                    const TransmitPowers& powers,
                                    const NoiseConfig& noise_cfg, std::int64_t n_symbols,
                                    GaussianStream& rng) {
  validate_noise(noise_cfg);
  validate_powers(powers);
  if (n_symbols < 1)
    throw std::invalid_argument("simulate_symbols: n_symbols must be >= 1");

  Eigen::MatrixXcd signal_map, interference_map, noise_map;
  Eigen::VectorXd levels;
  if (plan) {
    signal_map = plan->p_r * h_up;
    interference_map = plan->p_r * h_self * plan->p_t;
    levels = noise_levels(row_powers(h_up, powers.p_up_w),
                          row_powers(h_self * plan->p_t, powers.p_down_w), noise_cfg);
    noise_map = plan->p_r;
  } else {
    signal_map = h_up;
    interference_map = h_self;
    levels = noise_levels(row_powers(h_up, powers.p_up_w),
                          row_powers(h_self, powers.p_down_w), noise_cfg);
    noise_map = Eigen::MatrixXcd::Identity(h_up.rows(), h_up.rows());
  }
  const Eigen::VectorXd amplitudes = levels.cwiseSqrt();

  detail::RunningMean ps, pi, pn;
  for (std::int64_t s = 0; s < n_symbols; ++s) {
    const Eigen::VectorXcd x_up = detail::draw_cn(rng, signal_map.cols(), powers.p_up_w);
    const Eigen::VectorXcd x_down =
        detail::draw_cn(rng, interference_map.cols(), powers.p_down_w);
    Eigen::VectorXcd noise(amplitudes.size());
    for (Eigen::Index i = 0; i < amplitudes.size(); ++i)
      noise(i) = amplitudes(i) * rng.complex_normal();
    ps.add((signal_map * x_up).squaredNorm());
    pi.add((interference_map * x_down).squaredNorm());
    pn.add((noise_map * noise).squaredNorm());
  }

  SymbolStats out;
  out.p_s_w = ps.mean;
  out.p_i_w = pi.mean;
  out.p_n_w = pn.mean;
  out.se_p_s = ps.standard_error();
  out.se_p_i = pi.standard_error();
  out.se_p_n = pn.standard_error();
  out.n_symbols = n_symbols;
  return out;
}

} // namespace fdlink

#endif
