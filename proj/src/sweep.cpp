#include "uwcrb/sweep.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "uwcrb/error.hpp"

namespace uwcrb {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

RayScenario cell_scenario(const SweepContext& ctx, double h, double z_d) {
  const double k0 = solve_k0_from_h(ctx.profile, ctx.source_depth, z_d, h);
  return {ctx.profile, ctx.source_depth, z_d, k0};
}

}  // namespace

SweepContext SweepContext::from_config(const SweepConfig& config) {
  return {config.profile, config.noise, build_sampling_matrix(config.profile, config.noise.sample_depths),
          config.source_depth};
}

std::vector<double> grid_axis(double extent, std::size_t count) {
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) {
    axis[i] = extent * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return axis;
}

SweepCell evaluate_cell(const SweepContext& ctx, double h, double z_d) {
  SweepCell cell;
  cell.h = h;
  cell.z_d = z_d;
  if (z_d == ctx.source_depth || !(h > 0.0)) return cell;
  try {
    const RayScenario s = cell_scenario(ctx, h, z_d);
    if (s.k0 < kMinK0 || !validate_single_crossing(s).valid) return cell;
    const CrbReport r = crb_report(s, ctx.noise, ctx.F);
    cell.k0 = s.k0;
    cell.terms = r.crb_d;
    cell.crb_total = r.crb_d_total;
    cell.crb_transform = r.crb_d_transform;
    cell.valid = std::isfinite(cell.crb_total) && std::isfinite(cell.crb_transform);
  } catch (const Error&) {
    cell.valid = false;
  }
  if (!cell.valid) {
    cell = SweepCell{};
    cell.h = h;
    cell.z_d = z_d;
  }
  return cell;
}

SweepGrid run_sweep_serial(const SweepConfig& config) {
  const SweepContext ctx = SweepContext::from_config(config);
  const auto hs = grid_axis(config.horizontal_extent, config.n_h);
  const auto zs = grid_axis(config.depth_extent, config.n_z);
  SweepGrid grid{config.n_h, config.n_z, std::vector<SweepCell>(config.n_h * config.n_z)};
  for (std::size_t iz = 0; iz < config.n_z; ++iz) {
    for (std::size_t ih = 0; ih < config.n_h; ++ih) {
      grid.cells[iz * config.n_h + ih] = evaluate_cell(ctx, hs[ih], zs[iz]);
    }
  }
  return grid;
}

SweepGrid run_sweep(const SweepConfig& config) {
  const SweepContext ctx = SweepContext::from_config(config);
  const auto hs = grid_axis(config.horizontal_extent, config.n_h);
  const auto zs = grid_axis(config.depth_extent, config.n_z);
  SweepGrid grid{config.n_h, config.n_z, std::vector<SweepCell>(config.n_h * config.n_z)};
  const auto total = static_cast<std::int64_t>(grid.cells.size());
  const std::size_t n_h = config.n_h;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    grid.cells[i] = evaluate_cell(ctx, hs[i % n_h], zs[i / n_h]);
  }
  return grid;
}

void write_sweep_csv(std::ostream& out, const SweepGrid& grid) {
  out << kSweepCsvHeader << '\n';
  for (const auto& c : grid.cells) {
    out << format_double(c.h) << ',' << format_double(c.z_d) << ',' << (c.valid ? 1 : 0);
    if (c.valid) {
      for (double v : {c.k0, c.terms.tof, c.terms.depth_s, c.terms.depth_d, c.terms.ssp, c.crb_total}) {
        out << ',' << format_double(v);
      }
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_sweep_csv(out, grid);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

SweepGrid read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw Error(ErrorCode::MalformedCsv, "missing or unexpected header");
  }
  SweepGrid grid;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 9) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + ": expected 9 fields");
    }
    SweepCell c;
    c.h = parse_double(f[0], line_no);
    c.z_d = parse_double(f[1], line_no);
    if (f[2] != "0" && f[2] != "1") {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + ": valid must be 0 or 1");
    }
    c.valid = f[2] == "1";
    if (c.valid) {
      c.k0 = parse_double(f[3], line_no);
      c.terms = {parse_double(f[4], line_no), parse_double(f[5], line_no),
                 parse_double(f[6], line_no), parse_double(f[7], line_no)};
      c.crb_total = parse_double(f[8], line_no);
    }
    grid.cells.push_back(c);
  }
  if (grid.cells.empty()) throw Error(ErrorCode::MalformedCsv, "no data rows");
  // Columns: run of rows sharing the first z_d value.
  std::size_t n_h = 0;
  while (n_h < grid.cells.size() && grid.cells[n_h].z_d == grid.cells.front().z_d) ++n_h;
  if (grid.cells.size() % n_h != 0) {
    throw Error(ErrorCode::MalformedCsv, "row count is not a multiple of the row length");
  }
  grid.n_h = n_h;
  grid.n_z = grid.cells.size() / n_h;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    if (grid.cells[i].z_d != grid.cells[(i / n_h) * n_h].z_d ||
        grid.cells[i].h != grid.cells[i % n_h].h) {
      throw Error(ErrorCode::MalformedCsv, "cells do not form a row-major grid");
    }
  }
  return grid;
}

SweepGrid read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return read_sweep_csv(in);
}

CrbReport query_point(const SweepConfig& config, double h, double z_d) {
  auto infeasible = [&](const std::string& why) {
    std::ostringstream msg;
    msg << "(h=" << h << ", z_d=" << z_d << "): " << why;
    return Error(ErrorCode::InfeasibleGeometry, msg.str());
  };
  if (!(h >= 0.0 && h <= config.horizontal_extent && z_d >= 0.0 && z_d <= config.depth_extent)) {
    throw infeasible("outside the environment");
  }
  if (z_d == config.source_depth) throw infeasible("destination at the source depth");
  if (!(h > 0.0)) throw infeasible("vertical ray (k0 = 0)");
  const SweepContext ctx = SweepContext::from_config(config);
  RayScenario s{config.profile, config.source_depth, z_d, 0.0};
  try {
    s = cell_scenario(ctx, h, z_d);
  } catch (const Error& e) {
    throw infeasible(e.what());
  }
  if (s.k0 < kMinK0) throw infeasible("vertical ray (k0 = 0)");
  const SingleCrossingReport crossing = validate_single_crossing(s);
  if (!crossing.valid) throw infeasible("ray turns inside the path");
  return crb_report(s, ctx.noise, ctx.F);
}

}  // namespace uwcrb
