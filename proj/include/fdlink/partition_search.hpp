#ifndef FDLINK_PARTITION_SEARCH_HPP
#define FDLINK_PARTITION_SEARCH_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fdlink/linkbudget.hpp"
#include "fdlink/precoder.hpp"

namespace fdlink {

/// Feasibility limits for the exhaustive partition search. Unset fields
/// leave the full 1..M range on each side.
struct PartitionConstraint {
  std::optional<int> max_total;  // n_up + n_down <= max_total
  std::optional<int> max_n_up;
  std::optional<int> max_n_down;

  bool feasible(int n_up, int n_down) const {
    if (max_total && n_up + n_down > *max_total) return false;
    if (max_n_up && n_up > *max_n_up) return false;
    if (max_n_down && n_down > *max_n_down) return false;
    return true;
  }
};

/// One evaluated partition: both link SINRs and capacities at that
/// (N_up, N_down) choice.
struct PartitionScore {
  int n_up = 0;
  int n_down = 0;
  double sinr_up = 0.0;   // linear
  double sinr_down = 0.0; // linear
  double capacity_up = 0.0;
  double capacity_down = 0.0;
  double sum_capacity = 0.0;
};

struct PartitionSearchOptions {
  PartitionConstraint constraint;
  LinkBudgetOptions budget;
};

/// Exhaustive evaluation of every feasible (n_up, n_down) pair, ranked by
/// descending sum capacity; ties break toward smaller n_up, then smaller
/// n_down. At most M_up * M_down evaluations.
inline std::vector<PartitionScore> search_partition(const Eigen::MatrixXcd& h_self,
                                                    const Eigen::MatrixXcd& h_up,
                                                    const Eigen::MatrixXcd& h_down,
                                                    const TransmitPowers& powers,
                                                    const NoiseConfig& noise_cfg,
                                                    const PartitionSearchOptions& opts = {}) {
  const SvdTriple svd = svd_decompose(h_self);
  std::vector<PartitionScore> scores;
  for (int n_up = 1; n_up <= int(svd.m_up()); ++n_up)
    for (int n_down = 1; n_down <= int(svd.m_down()); ++n_down) {
      if (!opts.constraint.feasible(n_up, n_down)) continue;
      const PartitionPlan plan = make_partition_plan(svd, n_up, n_down);
      PartitionScore s;
      s.n_up = n_up;
      s.n_down = n_down;
      s.sinr_up = sinr_uplink_precoded(h_up, svd, plan, powers, noise_cfg, opts.budget);
      s.sinr_down =
          sinr_downlink_precoded(h_down, svd, plan, powers, noise_cfg, opts.budget);
      s.capacity_up = capacity(s.sinr_up, DuplexMode::precoded);
      s.capacity_down = capacity(s.sinr_down, DuplexMode::precoded);
      s.sum_capacity = s.capacity_up + s.capacity_down;
      scores.push_back(s);
    }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const PartitionScore& a, const PartitionScore& b) {
                     if (a.sum_capacity != b.sum_capacity)
                       return a.sum_capacity > b.sum_capacity;
                     if (a.n_up != b.n_up) return a.n_up < b.n_up;
                     return a.n_down < b.n_down;
                   });
  return scores;
}

} // namespace fdlink

#endif
