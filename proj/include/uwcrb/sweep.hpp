#pragma once

// Grid sweep of the range bound over destination coordinates (h, z_d) with
// the source fixed, point queries, and the results CSV.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "uwcrb/config.hpp"
#include "uwcrb/crb.hpp"

namespace uwcrb {

struct SweepCell {
  double h = 0.0;
  double z_d = 0.0;
  bool valid = false;
  double k0 = 0.0;
  CrbTerms terms;              // range-bound decomposition
  double crb_total = 0.0;
  double crb_transform = 0.0;  // same bound through the Jacobian transform
};

struct SweepGrid {
  std::size_t n_h = 0;
  std::size_t n_z = 0;
  std::vector<SweepCell> cells;  // row-major: z_d outer, h inner

  const SweepCell& at(std::size_t iz, std::size_t ih) const { return cells[iz * n_h + ih]; }
};

/// Shared, read-only inputs for cell evaluation.
struct SweepContext {
  SoundSpeedProfile profile;
  NoiseModel noise;
  SamplingMatrix F;
  double source_depth = 0.0;

  static SweepContext from_config(const SweepConfig& config);
};

/// Never throws for numerical reasons: any failure marks the cell invalid.
SweepCell evaluate_cell(const SweepContext& ctx, double h, double z_d);

std::vector<double> grid_axis(double extent, std::size_t count);

/// Cells evaluated with OpenMP; output order is independent of scheduling.
SweepGrid run_sweep(const SweepConfig& config);
/// Single-threaded reference implementation of run_sweep.
SweepGrid run_sweep_serial(const SweepConfig& config);

inline constexpr const char* kSweepCsvHeader =
    "h,z_d,valid,k0,crb_tof,crb_depth_s,crb_depth_d,crb_ssp,crb_total";

void write_sweep_csv(std::ostream& out, const SweepGrid& grid);
void write_sweep_csv(const std::filesystem::path& path, const SweepGrid& grid);
/// Inverse of write_sweep_csv (crb_transform is not stored and reads as 0).
SweepGrid read_sweep_csv(std::istream& in);
SweepGrid read_sweep_csv(const std::filesystem::path& path);

/// Full report at one destination. InfeasibleGeometry if the point is
/// outside the environment, vertical, or violates the single-crossing
/// assumption.
CrbReport query_point(const SweepConfig& config, double h, double z_d);

}  // namespace uwcrb
