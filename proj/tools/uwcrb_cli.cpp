// Command-line driver: grid sweeps, point queries, Monte Carlo validation
// and heatmap rendering.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <cmath>
#include <string>

#include <CLI11.hpp>

#include "uwcrb/config.hpp"
#include "uwcrb/error.hpp"
#include "uwcrb/heatmap.hpp"
#include "uwcrb/montecarlo.hpp"
#include "uwcrb/report.hpp"
#include "uwcrb/sweep.hpp"

namespace {

using uwcrb::Error;
using uwcrb::ErrorCode;

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
      return kConfigError;
    case ErrorCode::IoError:
    case ErrorCode::MalformedCsv:
    case ErrorCode::UnknownColumn:
      return kIoError;
    default:
      return kNumericalError;
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

int run_sweep_command(const std::string& config_path, const std::optional<std::string>& out,
                      bool serial) {
  const uwcrb::SweepConfig cfg = uwcrb::load_config(config_path);
  const auto start = std::chrono::steady_clock::now();
  const uwcrb::SweepGrid grid = serial ? uwcrb::run_sweep_serial(cfg) : uwcrb::run_sweep(cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string path = out.value_or(cfg.output.csv);
  uwcrb::write_sweep_csv(path, grid);
  std::size_t valid = 0;
  for (const auto& c : grid.cells) valid += c.valid ? 1 : 0;
  std::fprintf(stderr, "%zu x %zu grid, %zu valid cells, %.2f s -> %s\n", grid.n_h, grid.n_z, valid,
               seconds, path.c_str());
  return kOk;
}

int run_point_command(const std::string& config_path, double h, double z_d, bool as_json) {
  const uwcrb::SweepConfig cfg = uwcrb::load_config(config_path);
  const uwcrb::CrbReport report = uwcrb::query_point(cfg, h, z_d);
  if (as_json) {
    std::cout << uwcrb::to_json(report).dump(2) << '\n';
  } else {
    uwcrb::write_text(std::cout, report);
  }
  return kOk;
}

struct McArgs {
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
  std::optional<double> z_d;
  std::optional<std::string> csv;
  std::optional<std::string> json;
  bool serial = false;
};

int run_mc_command(const std::string& config_path, const McArgs& args) {
  const uwcrb::SweepConfig cfg = uwcrb::load_config(config_path);
  const double h = args.h.value_or(cfg.montecarlo.h);
  const double z_d = args.z_d.value_or(cfg.montecarlo.z_d);
  const std::size_t trials = args.trials.value_or(cfg.montecarlo.trials);
  const std::uint64_t seed = args.seed.value_or(cfg.montecarlo.seed);

  // Reuses the point query for its geometry checks.
  const uwcrb::CrbReport point = uwcrb::query_point(cfg, h, z_d);
  const uwcrb::RayScenario truth{cfg.profile, cfg.source_depth, z_d, point.k0};
  const uwcrb::BoundValidationReport rep =
      args.serial ? uwcrb::validate_bound_serial(truth, cfg.noise, trials, seed)
                  : uwcrb::validate_bound(truth, cfg.noise, trials, seed);

  const std::string json_text = uwcrb::to_json(rep).dump(2) + "\n";
  std::ostringstream csv;
  uwcrb::write_csv(csv, rep);
  write_file(args.csv.value_or(cfg.output.mc_csv), csv.str());
  write_file(args.json.value_or(cfg.output.mc_json), json_text);
  std::cout << json_text;
  return kOk;
}

int run_render_command(const std::string& csv, const std::string& column, const std::string& out) {
  const uwcrb::Heatmap map = uwcrb::render_heatmap(csv, column, out);
  if (map.scale.any_positive) {
    std::printf("%s: log10 range [%.6f, %.6f] (%.6e .. %.6e)\n", column.c_str(), map.scale.log10_min,
                map.scale.log10_max, std::pow(10.0, map.scale.log10_min),
                std::pow(10.0, map.scale.log10_max));
  } else {
    std::printf("%s: no positive values\n", column.c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range-estimation Cramer-Rao bounds for underwater acoustic links"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> sweep_out;
  bool serial = false;
  auto* sweep = app.add_subcommand("sweep", "Evaluate the bound decomposition over the (h, z_d) grid");
  sweep->add_option("config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Results CSV (default: output.csv from the config)");
  sweep->add_flag("--serial", serial, "Use the single-threaded reference kernel");

  double point_h = 0.0;
  double point_zd = 0.0;
  bool point_json = false;
  auto* point = app.add_subcommand("point", "Full bound report at one destination");
  point->set_help_flag("--help", "Print this help message and exit");
  point->add_option("config", config_path, "Experiment config (JSON)")->required();
  point->add_option("--h", point_h, "Horizontal distance [m]")->required();
  point->add_option("--zd", point_zd, "Destination depth [m]")->required();
  point->add_flag("--json", point_json, "Print the machine-readable record");

  McArgs mc_args;
  auto* mc = app.add_subcommand("mc", "Monte Carlo check of the range bound");
  mc->set_help_flag("--help", "Print this help message and exit");
  mc->add_option("config", config_path, "Experiment config (JSON)")->required();
  mc->add_option("--trials", mc_args.trials, "Number of trials");
  mc->add_option("--seed", mc_args.seed, "Base seed; trial i uses seed + i");
  mc->add_option("--h", mc_args.h, "Horizontal distance of the true destination [m]");
  mc->add_option("--zd", mc_args.z_d, "Depth of the true destination [m]");
  mc->add_option("--csv", mc_args.csv, "Report CSV path");
  mc->add_option("--json", mc_args.json, "Report JSON path");
  mc->add_flag("--serial", mc_args.serial, "Use the single-threaded reference kernel");

  std::string csv_path, column, ppm_path;
  auto* render = app.add_subcommand("render", "Render one CSV column as a PPM heatmap");
  render->add_option("csv", csv_path, "Sweep results CSV")->required();
  render->add_option("--column", column, "Column to render")->required();
  render->add_option("--out", ppm_path, "Output PPM path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sweep) return run_sweep_command(config_path, sweep_out, serial);
    if (*point) return run_point_command(config_path, point_h, point_zd, point_json);
    if (*mc) return run_mc_command(config_path, mc_args);
    if (*render) return run_render_command(csv_path, column, ppm_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
