#pragma once

// Binary PPM (P6) rendering of one sweep CSV column.
//
// Colormap: for valid cells with a positive value v, s = (log10 v - lo) /
// (hi - lo) where lo and hi are the min and max of log10 v over those cells
// (s = 0 when hi == lo). s is mapped piecewise linearly through the anchors
//   s = 0   -> (0, 0, 255)
//   s = 1/3 -> (0, 255, 255)
//   s = 2/3 -> (255, 255, 0)
//   s = 1   -> (255, 0, 0)
// with each channel rounded to nearest. Valid cells with v <= 0 use s = 0.
// Invalid cells are white. Image rows follow z_d (surface at the top),
// columns follow h.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uwcrb/sweep.hpp"

namespace uwcrb {

using Rgb = std::array<std::uint8_t, 3>;

Rgb colormap(double s);

struct HeatmapScale {
  bool any_positive = false;
  double log10_min = 0.0;
  double log10_max = 0.0;
};

struct Heatmap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> pixels;  // row-major
  HeatmapScale scale;
};

/// Column names: k0, crb_tof, crb_depth_s, crb_depth_d, crb_ssp, crb_total.
double column_value(const SweepCell& cell, const std::string& column);

Heatmap make_heatmap(const SweepGrid& grid, const std::string& column);
void write_ppm(const std::filesystem::path& path, const Heatmap& map);

/// Reads the CSV, renders the column and writes the PPM.
Heatmap render_heatmap(const std::filesystem::path& csv_path, const std::string& column,
                       const std::filesystem::path& out_path);

}  // namespace uwcrb
