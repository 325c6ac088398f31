#ifndef FDLINK_REPORT_HPP
#define FDLINK_REPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fdlink/errors.hpp"
#include "fdlink/linkbudget.hpp"
#include "fdlink/partition_search.hpp"

namespace fdlink {

/// SINR/capacity pair for one operating mode.
struct ModeReport {
  double sinr_up = 0.0;
  double sinr_down = 0.0;
  double capacity_up = 0.0;
  double capacity_down = 0.0;

  double sum_capacity() const { return capacity_up + capacity_down; }
};

/// Everything one scenario evaluation produces: the per-antenna power
/// breakdown under the chosen partition, the four operating modes, and the
/// SI-power diagnostic.
struct LinkReport {
  int n_up = 0;
  int n_down = 0;
  std::vector<int> uplink_elements;
  std::vector<int> downlink_elements;
  Eigen::VectorXd singular_values;
  Eigen::VectorXd p_s_w;        // per uplink antenna
  Eigen::VectorXd p_i_w;        // per uplink antenna
  Eigen::VectorXd p_n_w;        // per uplink antenna
  Eigen::VectorXd p_n_down_w;   // per downlink user
  ModeReport precoded;
  ModeReport reference;
  ModeReport full_ideal;
  ModeReport half; // capacities carry the 1/2 time-sharing factor
  SiPowerDiagnostic si_power;
  std::vector<PartitionScore> partition_table; // filled when partition was searched
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::ordered_json vector_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline nlohmann::ordered_json mode_json(const ModeReport& m, bool half) {
  nlohmann::ordered_json j;
  j["sinr_up"] = m.sinr_up;
  j["sinr_up_db"] = to_db(m.sinr_up);
  j["sinr_down"] = m.sinr_down;
  j["sinr_down_db"] = to_db(m.sinr_down);
  j["capacity_up_bps_hz"] = m.capacity_up;
  j["capacity_down_bps_hz"] = m.capacity_down;
  j["sum_capacity_bps_hz"] = m.sum_capacity();
  j["time_share"] = half ? 0.5 : 1.0;
  return j;
}

inline nlohmann::ordered_json partition_score_json(const PartitionScore& s) {
  nlohmann::ordered_json j;
  j["n_up"] = s.n_up;
  j["n_down"] = s.n_down;
  j["sinr_up"] = s.sinr_up;
  j["sinr_down"] = s.sinr_down;
  j["capacity_up_bps_hz"] = s.capacity_up;
  j["capacity_down_bps_hz"] = s.capacity_down;
  j["sum_capacity_bps_hz"] = s.sum_capacity;
  return j;
}

} // namespace detail

inline nlohmann::ordered_json report_to_json(const LinkReport& r) {
  nlohmann::ordered_json j;
  j["plan"] = {{"n_up", r.n_up}, {"n_down", r.n_down}};
  j["uplink_elements"] = r.uplink_elements;
  j["downlink_elements"] = r.downlink_elements;
  j["singular_values"] = detail::vector_json(r.singular_values);
  j["per_antenna"] = {{"p_s_w", detail::vector_json(r.p_s_w)},
                      {"p_i_w", detail::vector_json(r.p_i_w)},
                      {"p_n_w", detail::vector_json(r.p_n_w)}};
  j["per_downlink_user"] = {{"p_n_w", detail::vector_json(r.p_n_down_w)}};
  j["si_power"] = {{"direct_w", r.si_power.direct_w},
                   {"closed_form_w", r.si_power.closed_form_w},
                   {"agree", r.si_power.agree}};
  j["modes"] = {{"precoded", detail::mode_json(r.precoded, false)},
                {"reference", detail::mode_json(r.reference, false)},
                {"full_ideal", detail::mode_json(r.full_ideal, false)},
                {"half", detail::mode_json(r.half, true)}};
  if (!r.partition_table.empty()) {
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const PartitionScore& s : r.partition_table)
      table.push_back(detail::partition_score_json(s));
    j["partition_search"] = std::move(table);
  }
  j["warnings"] = r.warnings;
  return j;
}

inline std::string report_csv_header() {
  return "n_up,n_down,"
         "sinr_up_db_precoded,sinr_down_db_precoded,sum_capacity_precoded,"
         "sinr_up_db_reference,sinr_down_db_reference,sum_capacity_reference,"
         "sinr_up_db_full_ideal,sinr_down_db_full_ideal,sum_capacity_full_ideal,"
         "sinr_up_db_half,sinr_down_db_half,sum_capacity_half";
}

inline std::string report_csv_row(const LinkReport& r) {
  auto mode_cols = [](const ModeReport& m) {
    return detail::csv_double(to_db(m.sinr_up)) + "," +
           detail::csv_double(to_db(m.sinr_down)) + "," +
           detail::csv_double(m.sum_capacity());
  };
  return std::to_string(r.n_up) + "," + std::to_string(r.n_down) + "," +
         mode_cols(r.precoded) + "," + mode_cols(r.reference) + "," +
         mode_cols(r.full_ideal) + "," + mode_cols(r.half);
}

/// One row of a spacing sweep: the best partition at that element spacing.
struct SpacingScore {
  double spacing_wavelengths = 0.0;
  int best_n_up = 0;
  int best_n_down = 0;
  double best_sum_capacity = 0.0;
  double h_self_frobenius = 0.0;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

} // namespace fdlink

#endif
