#include "uwcrb/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "uwcrb/error.hpp"

namespace uwcrb {

Rgb colormap(double s) {
  static constexpr std::array<std::array<double, 3>, 4> anchors{{
      {0.0, 0.0, 255.0},
      {0.0, 255.0, 255.0},
      {255.0, 255.0, 0.0},
      {255.0, 0.0, 0.0},
  }};
  s = std::clamp(s, 0.0, 1.0);
  const int k = std::min(static_cast<int>(std::floor(3.0 * s)), 2);
  const double u = 3.0 * s - k;
  Rgb out{};
  for (int ch = 0; ch < 3; ++ch) {
    const double v = anchors[k][ch] + u * (anchors[k + 1][ch] - anchors[k][ch]);
    out[ch] = static_cast<std::uint8_t>(std::lround(v));
  }
  return out;
}

double column_value(const SweepCell& cell, const std::string& column) {
  if (column == "k0") return cell.k0;
  if (column == "crb_tof") return cell.terms.tof;
  if (column == "crb_depth_s") return cell.terms.depth_s;
  if (column == "crb_depth_d") return cell.terms.depth_d;
  if (column == "crb_ssp") return cell.terms.ssp;
  if (column == "crb_total") return cell.crb_total;
  throw Error(ErrorCode::UnknownColumn, "no renderable column '" + column + "'");
}

Heatmap make_heatmap(const SweepGrid& grid, const std::string& column) {
  Heatmap map;
  map.width = grid.n_h;
  map.height = grid.n_z;
  map.pixels.assign(grid.cells.size(), Rgb{255, 255, 255});
  column_value(SweepCell{}, column);  // rejects unknown names even on all-invalid grids

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : grid.cells) {
    if (!c.valid) continue;
    const double v = column_value(c, column);
    if (v > 0.0 && std::isfinite(v)) {
      lo = std::min(lo, std::log10(v));
      hi = std::max(hi, std::log10(v));
    }
  }
  map.scale.any_positive = lo <= hi;
  if (map.scale.any_positive) {
    map.scale.log10_min = lo;
    map.scale.log10_max = hi;
  }
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& c = grid.cells[i];
    if (!c.valid) continue;
    const double v = column_value(c, column);
    double s = 0.0;
    if (map.scale.any_positive && v > 0.0 && std::isfinite(v) && hi > lo) {
      s = (std::log10(v) - lo) / (hi - lo);
    }
    map.pixels[i] = colormap(s);
  }
  return map;
}

void write_ppm(const std::filesystem::path& path, const Heatmap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "P6\n" << map.width << ' ' << map.height << "\n255\n";
  for (const auto& px : map.pixels) {
    out.write(reinterpret_cast<const char*>(px.data()), 3);
  }
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Heatmap render_heatmap(const std::filesystem::path& csv_path, const std::string& column,
                       const std::filesystem::path& out_path) {
  const SweepGrid grid = read_sweep_csv(csv_path);
  Heatmap map = make_heatmap(grid, column);
  write_ppm(out_path, map);
  return map;
}

}  // namespace uwcrb
