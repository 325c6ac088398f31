// Command-line front end: single scenario runs, exhaustive partition
// sweeps, and element-spacing sweeps. Reports go to <out>.json and
// <out>.csv; sweeps emit CSV with verdict comment lines up front.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdlink/fdlink.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::filesystem::path with_extension(std::filesystem::path base, const char* ext) {
  if (base.extension() == ".json" || base.extension() == ".csv") base.replace_extension();
  base += ext;
  return base;
}

void write_report_files(const fdlink::LinkReport& report, const fdlink::ScenarioConfig& cfg,
                        const std::filesystem::path& out) {
  nlohmann::ordered_json j;
  j["scenario"] = fdlink::config_to_json(cfg);
  j["report"] = fdlink::report_to_json(report);
  fdlink::write_text_file(with_extension(out, ".json"), j.dump(2) + "\n");

  std::ostringstream csv;
  csv << fdlink::report_csv_header() << "\n" << fdlink::report_csv_row(report) << "\n";
  fdlink::write_text_file(with_extension(out, ".csv"), csv.str());
}

int cmd_run(const std::string& cfg_path, const std::string& out_path,
            const fdlink::RunOptions& opts) {
  const fdlink::ScenarioConfig cfg = fdlink::load_config(cfg_path);
  const fdlink::LinkReport report = fdlink::run_scenario(cfg, opts);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  write_report_files(report, cfg, out_path);
  std::cout << "plan (n_up, n_down) = (" << report.n_up << ", " << report.n_down << ")\n"
            << "precoded sum capacity   " << report.precoded.sum_capacity() << " bit/s/Hz\n"
            << "reference sum capacity  " << report.reference.sum_capacity() << " bit/s/Hz\n"
            << "full-ideal sum capacity " << report.full_ideal.sum_capacity() << " bit/s/Hz\n"
            << "half-duplex sum capacity " << report.half.sum_capacity() << " bit/s/Hz\n";
  return kExitOk;
}

int cmd_sweep_partition(const std::string& cfg_path, const std::string& out_path,
                        const fdlink::RunOptions& opts) {
  const fdlink::ScenarioConfig cfg = fdlink::load_config(cfg_path);
  const auto table = fdlink::sweep_partition(cfg, opts);
  const std::string verdict =
      fdlink::partition_claim_verdict(table, int(cfg.downlink_elements.size()));

  std::ostringstream csv;
  csv << "# " << verdict << "\n";
  csv << "n_up,n_down,sinr_up,sinr_down,capacity_up,capacity_down,sum_capacity\n";
  for (const auto& row : table)
    csv << row.n_up << ',' << row.n_down << ',' << fdlink::detail::csv_double(row.sinr_up)
        << ',' << fdlink::detail::csv_double(row.sinr_down) << ','
        << fdlink::detail::csv_double(row.capacity_up) << ','
        << fdlink::detail::csv_double(row.capacity_down) << ','
        << fdlink::detail::csv_double(row.sum_capacity) << "\n";
  fdlink::write_text_file(with_extension(out_path, ".csv"), csv.str());
  std::cout << verdict << "\n";
  return kExitOk;
}

int cmd_sweep_spacing(const std::string& cfg_path, const std::string& out_path,
                      const std::vector<double>& spacings, const fdlink::RunOptions& opts) {
  const fdlink::ScenarioConfig cfg = fdlink::load_config(cfg_path);
  const auto rows = fdlink::sweep_spacing(cfg, spacings, opts);
  const std::string verdict = fdlink::spacing_claim_verdict(rows);

  std::ostringstream csv;
  csv << "# " << verdict << "\n";
  csv << "spacing_wavelengths,best_n_up,best_n_down,best_sum_capacity,h_self_frobenius\n";
  for (const auto& row : rows)
    csv << fdlink::detail::csv_double(row.spacing_wavelengths) << ',' << row.best_n_up
        << ',' << row.best_n_down << ','
        << fdlink::detail::csv_double(row.best_sum_capacity) << ','
        << fdlink::detail::csv_double(row.h_self_frobenius) << "\n";
  fdlink::write_text_file(with_extension(out_path, ".csv"), csv.str());
  std::cout << verdict << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fdlink: full-duplex massive-MIMO link-level simulator"};
  app.require_subcommand(1);

  std::string cfg_path, out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool strict_paper = false;
  std::vector<double> spacings;

  app.add_flag("--strict-paper", strict_paper,
               "use the literal published formula variants (closed-form SI sum, "
               "uplink-channel numerator in the downlink reference SINR)");
  auto* seed_opt = app.add_option("--seed", seed, "override the config channel seed");

  auto* run = app.add_subcommand("run", "evaluate one scenario");
  run->fallthrough();
  run->add_option("config", cfg_path, "scenario config file")->required();
  run->add_option("-o,--output", out_path, "output base path (.json/.csv)")->required();

  auto* sp = app.add_subcommand("sweep-partition",
                                "evaluate every (n_up, n_down) partition");
  sp->fallthrough();
  sp->add_option("config", cfg_path, "scenario config file")->required();
  sp->add_option("-o,--output", out_path, "output CSV path")->required();

  auto* ss = app.add_subcommand("sweep-spacing",
                                "re-evaluate the best partition per element spacing");
  ss->fallthrough();
  ss->add_option("config", cfg_path, "scenario config file")->required();
  ss->add_option("-o,--output", out_path, "output CSV path")->required();
  ss->add_option("--spacings", spacings, "spacings in wavelengths (comma separated)")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  seed_given = seed_opt->count() > 0;

  fdlink::RunOptions opts;
  opts.strict_paper = strict_paper;
  if (seed_given) opts.seed_override = seed;

  try {
    if (app.got_subcommand(run)) return cmd_run(cfg_path, out_path, opts);
    if (app.got_subcommand(sp)) return cmd_sweep_partition(cfg_path, out_path, opts);
    if (app.got_subcommand(ss)) return cmd_sweep_spacing(cfg_path, out_path, spacings, opts);
  } catch (const fdlink::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fdlink::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fdlink::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
