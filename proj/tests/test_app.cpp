#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "support/cases.hpp"
#include "uwcrb/config.hpp"
#include "uwcrb/error.hpp"
#include "uwcrb/heatmap.hpp"
#include "uwcrb/report.hpp"
#include "uwcrb/sweep.hpp"

namespace uwcrb {
namespace {

const std::filesystem::path kPreset = std::filesystem::path(UWCRB_PRESET_DIR) / "reference_grid.json";

std::string preset_text() {
  std::ifstream in(kPreset);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json preset_json() { return nlohmann::json::parse(preset_text()); }

SweepConfig small_config(std::size_t n_h = 24, std::size_t n_z = 12) {
  nlohmann::json j = preset_json();
  j["grid"]["n_h"] = n_h;
  j["grid"]["n_z"] = n_z;
  return config_from_json(j);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(Config, PresetLoadsReferenceValues) {
  const SweepConfig c = load_config(kPreset);
  EXPECT_EQ(c.horizontal_extent, 10000.0);
  EXPECT_EQ(c.depth_extent, 2000.0);
  EXPECT_EQ(c.source_depth, 0.0);
  EXPECT_EQ(c.n_h, 200u);
  EXPECT_EQ(c.n_z, 100u);
  EXPECT_EQ(c.profile.nominal(123.0), 1500.0);
  EXPECT_EQ(c.profile.basis_size(), 3u);
  EXPECT_EQ(c.noise.sigma_t_sq, 1e-8);
  EXPECT_EQ(c.noise.sigma_z_sq, 1.0);
  EXPECT_EQ(c.noise.sigma_c_sq, 1.0);
  ASSERT_EQ(c.noise.sample_depths.size(), 10);
  for (Eigen::Index m = 0; m < 10; ++m) EXPECT_EQ(c.noise.sample_depths[m], 200.0 * (m + 1));
  const SoundSpeedProfile demo = testing::demo_profile();
  for (double z : {0.0, 700.0, 2000.0}) EXPECT_NEAR(c.profile(z), demo(z), 1e-12);
}

TEST(Config, MissingVarianceNamesField) {
  nlohmann::json j = preset_json();
  j["noise"].erase("sigma_c_sq");
  EXPECT_EQ(code_of([&] { config_from_json(j); }), ErrorCode::ValidationError);
  EXPECT_NE(message_of([&] { config_from_json(j); }).find("sigma_c_sq"), std::string::npos);
}

TEST(Config, GridNeedsTwoPointsPerAxis) {
  nlohmann::json j = preset_json();
  j["grid"]["n_h"] = 1;
  EXPECT_EQ(code_of([&] { config_from_json(j); }), ErrorCode::ValidationError);
  EXPECT_NE(message_of([&] { config_from_json(j); }).find("n_h"), std::string::npos);
}

TEST(Config, MalformedJsonReportsLine) {
  const std::string text = "{\n  \"source_depth\": 0,\n  \"grid\": { \"n_h\": , }\n}";
  EXPECT_EQ(code_of([&] { parse_config(text); }), ErrorCode::ParseError);
  EXPECT_NE(message_of([&] { parse_config(text); }).find("line 3"), std::string::npos);
}

TEST(Config, NegativeVarianceRejected) {
  nlohmann::json j = preset_json();
  j["noise"]["sigma_z_sq"] = -1.0;
  EXPECT_EQ(code_of([&] { config_from_json(j); }), ErrorCode::ValidationError);
}

TEST(Config, ExplicitSamplesAndOtherBases) {
  nlohmann::json j = preset_json();
  j["noise"]["samples"] = {{"rule", "explicit"}, {"depths", {100, 500, 900, 1300, 1700}}};
  j["profile"]["basis"] = nlohmann::json::array(
      {{{"kind", "hat"}, {"left", 0}, {"peak", 500}, {"right", 1000}},
       {{"kind", "tabulated"}, {"knots", {0, 1000, 2000}}, {"values", {0, 1, 0.5}}}});
  j["profile"]["coefficients"] = {1, -2};
  const SweepConfig c = config_from_json(j);
  EXPECT_EQ(c.noise.sample_depths.size(), 5);
  EXPECT_NEAR(c.profile(500.0), 1500.0 + 1.0 - 1.0, 1e-12);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { load_config("/nonexistent/config.json"); }), ErrorCode::IoError);
}

TEST(Sweep, AxisIncludesEndpoints) {
  const std::vector<double> a = grid_axis(10000.0, 5);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a.front(), 0.0);
  EXPECT_EQ(a[1], 2500.0);
  EXPECT_EQ(a.back(), 10000.0);
}

TEST(Sweep, SourceDepthCellIsInvalid) {
  const SweepGrid g = run_sweep(small_config());
  EXPECT_EQ(g.cells.size(), 24u * 12u);
  for (std::size_t ih = 0; ih < g.n_h; ++ih) EXPECT_FALSE(g.at(0, ih).valid);  // z_d = z_s = 0
  for (std::size_t iz = 0; iz < g.n_z; ++iz) EXPECT_FALSE(g.at(iz, 0).valid);  // h = 0
}

TEST(Sweep, CellsAreCleanAndConsistent) {
  const SweepGrid g = run_sweep(small_config());
  std::size_t valid = 0;
  for (const SweepCell& c : g.cells) {
    if (!c.valid) {
      EXPECT_EQ(c.k0, 0.0);
      EXPECT_EQ(c.crb_total, 0.0);
      continue;
    }
    ++valid;
    for (double v : {c.terms.tof, c.terms.depth_s, c.terms.depth_d, c.terms.ssp}) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
    }
    EXPECT_LT(std::abs(c.crb_transform - c.crb_total) / c.crb_total, 1e-6);
  }
  EXPECT_GT(valid, g.cells.size() / 2);
}

TEST(Sweep, SerialAndParallelAgree) {
  const SweepConfig c = small_config();
  std::ostringstream a;
  std::ostringstream b;
  write_sweep_csv(a, run_sweep(c));
  write_sweep_csv(b, run_sweep_serial(c));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, RepeatedRunsAreByteIdentical) {
  const SweepConfig c = small_config();
  std::ostringstream a;
  std::ostringstream b;
  write_sweep_csv(a, run_sweep(c));
  write_sweep_csv(b, run_sweep(c));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, CsvRoundTrip) {
  const SweepGrid g = run_sweep(small_config());
  std::stringstream csv;
  write_sweep_csv(csv, g);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), kSweepCsvHeader);
  const SweepGrid back = read_sweep_csv(csv);
  ASSERT_EQ(back.n_h, g.n_h);
  ASSERT_EQ(back.n_z, g.n_z);
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const SweepCell& a = g.cells[i];
    const SweepCell& b = back.cells[i];
    EXPECT_EQ(a.h, b.h);
    EXPECT_EQ(a.z_d, b.z_d);
    EXPECT_EQ(a.valid, b.valid);
    EXPECT_EQ(a.k0, b.k0);
    EXPECT_EQ(a.terms.tof, b.terms.tof);
    EXPECT_EQ(a.terms.depth_s, b.terms.depth_s);
    EXPECT_EQ(a.terms.depth_d, b.terms.depth_d);
    EXPECT_EQ(a.terms.ssp, b.terms.ssp);
    EXPECT_EQ(a.crb_total, b.crb_total);
  }
}

TEST(Sweep, MalformedCsv) {
  std::istringstream no_header("1,2,3\n");
  EXPECT_EQ(code_of([&] { read_sweep_csv(no_header); }), ErrorCode::MalformedCsv);
  std::istringstream short_row(std::string(kSweepCsvHeader) + "\n0,0,1,2\n");
  EXPECT_EQ(code_of([&] { read_sweep_csv(short_row); }), ErrorCode::MalformedCsv);
  std::istringstream bad_number(std::string(kSweepCsvHeader) + "\n0,0,1,x,1,1,1,1,4\n");
  EXPECT_EQ(code_of([&] { read_sweep_csv(bad_number); }), ErrorCode::MalformedCsv);
}

TEST(Sweep, ValidRegionIsContiguousPerRow) {
  const SweepGrid g = run_sweep(small_config(100, 50));
  for (std::size_t iz = 0; iz < g.n_z; ++iz) {
    int runs = 0;
    bool inside = false;
    for (std::size_t ih = 0; ih < g.n_h; ++ih) {
      const bool v = g.at(iz, ih).valid;
      if (v && !inside) ++runs;
      inside = v;
    }
    EXPECT_LE(runs, 1) << "row " << iz;
  }
}

TEST(QueryPoint, ReferenceCell) {
  const CrbReport r = query_point(small_config(), 8000.0, 1000.0);
  EXPECT_TRUE(r.valid);
  EXPECT_GT(r.crb_d.ssp, r.crb_d.tof + r.crb_d.depth_s + r.crb_d.depth_d);
  EXPECT_LT(r.cross_check_delta(), 1e-6);
}

TEST(QueryPoint, Errors) {
  const SweepConfig c = small_config();
  EXPECT_EQ(code_of([&] { query_point(c, 0.0, 1000.0); }), ErrorCode::InfeasibleGeometry);
  EXPECT_EQ(code_of([&] { query_point(c, 12000.0, 1000.0); }), ErrorCode::InfeasibleGeometry);
  EXPECT_EQ(code_of([&] { query_point(c, 5000.0, 0.0); }), ErrorCode::InfeasibleGeometry);
  EXPECT_EQ(code_of([&] { query_point(c, 10000.0, 20.0); }), ErrorCode::InfeasibleGeometry);
}

TEST(Heatmap, ColormapAnchors) {
  EXPECT_EQ(colormap(0.0), (Rgb{0, 0, 255}));
  EXPECT_EQ(colormap(1.0 / 3.0), (Rgb{0, 255, 255}));
  EXPECT_EQ(colormap(2.0 / 3.0), (Rgb{255, 255, 0}));
  EXPECT_EQ(colormap(1.0), (Rgb{255, 0, 0}));
  EXPECT_EQ(colormap(0.5), (Rgb{128, 255, 128}));
}

TEST(Heatmap, AllInvalidIsWhite) {
  SweepGrid g;
  g.n_h = 3;
  g.n_z = 2;
  g.cells.resize(6);
  const Heatmap m = make_heatmap(g, "crb_total");
  EXPECT_FALSE(m.scale.any_positive);
  for (const Rgb& p : m.pixels) EXPECT_EQ(p, (Rgb{255, 255, 255}));
}

TEST(Heatmap, TwoByTwoMatchesHandComputedColors) {
  // log10 values 0, 0.25, 3 and one invalid cell: s = 0, 1/12, 1.
  SweepGrid g;
  g.n_h = 2;
  g.n_z = 2;
  g.cells.resize(4);
  const double values[3] = {1.0, std::pow(10.0, 0.25), 1000.0};
  for (int i = 0; i < 3; ++i) {
    g.cells[static_cast<std::size_t>(i)].valid = true;
    g.cells[static_cast<std::size_t>(i)].crb_total = values[i];
  }
  const Heatmap m = make_heatmap(g, "crb_total");
  EXPECT_EQ(m.width, 2u);
  EXPECT_EQ(m.height, 2u);
  EXPECT_DOUBLE_EQ(m.scale.log10_min, 0.0);
  EXPECT_DOUBLE_EQ(m.scale.log10_max, 3.0);
  EXPECT_EQ(m.pixels[0], (Rgb{0, 0, 255}));
  EXPECT_EQ(m.pixels[1], (Rgb{0, 64, 255}));  // 255 * (1/12) / (1/3) = 63.75
  EXPECT_EQ(m.pixels[2], (Rgb{255, 0, 0}));
  EXPECT_EQ(m.pixels[3], (Rgb{255, 255, 255}));
}

TEST(Heatmap, PpmLayoutAndUnknownColumn) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "uwcrb_test_app";
  std::filesystem::create_directories(dir);
  const SweepGrid g = run_sweep(small_config(6, 4));
  write_sweep_csv(dir / "g.csv", g);
  const Heatmap m = render_heatmap(dir / "g.csv", "crb_ssp", dir / "g.ppm");
  std::ifstream in(dir / "g.ppm", std::ios::binary);
  std::string magic;
  std::size_t w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  EXPECT_EQ(magic, "P6");
  EXPECT_EQ(w, 6u);
  EXPECT_EQ(h, 4u);
  EXPECT_EQ(maxval, 255u);
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(body.size(), 6u * 4u * 3u);
  for (std::size_t i = 0; i < m.pixels.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(static_cast<std::uint8_t>(body[3 * i + k]), m.pixels[i][k]);
  }
  EXPECT_EQ(code_of([&] { render_heatmap(dir / "g.csv", "nope", dir / "x.ppm"); }), ErrorCode::UnknownColumn);
  std::filesystem::remove_all(dir);
}

TEST(Report, JsonAndCsvRecords) {
  const CrbReport r = query_point(small_config(), 8000.0, 1000.0);
  const nlohmann::json j = to_json(r);
  EXPECT_TRUE(j.contains("crb_d"));
  EXPECT_TRUE(j.contains("projection"));
  std::ostringstream text;
  write_text(text, r);
  EXPECT_FALSE(text.str().empty());

  BoundValidationReport b;
  b.trials = 100;
  b.crb_d = 2.0;
  b.empirical_variance = 2.2;
  b.efficiency_ratio = 1.1;
  std::ostringstream csv;
  write_csv(csv, b);
  const std::string s = csv.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), kMonteCarloCsvHeader);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  EXPECT_EQ(to_json(b)["trials"], 100);
}

}  // namespace
}  // namespace uwcrb
