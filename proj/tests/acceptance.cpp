// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance <reference_grid.json>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/cases.hpp"
#include "uwcrb/config.hpp"
#include "uwcrb/crb.hpp"
#include "uwcrb/heatmap.hpp"
#include "uwcrb/montecarlo.hpp"
#include "uwcrb/report.hpp"
#include "uwcrb/sweep.hpp"

namespace {

using namespace uwcrb;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::vector<testing::RandomCase> random_cases(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<testing::RandomCase> out;
  for (int i = 0; i < count; ++i) out.push_back(testing::random_case(rng));
  return out;
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <reference_grid.json>\n");
    return 2;
  }
  const std::filesystem::path preset = argv[1];

  const std::vector<testing::RandomCase> inverse_cases = random_cases(1001, 100);
  const std::vector<testing::RandomCase> derivative_cases = random_cases(2002, 50);

  report(1, "closed-form inverse FIM vs numeric inversion", [&] {
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& c : inverse_cases) {
      const TofGradients g = tof_gradients(c.scenario);
      const Eigen::MatrixXd closed = invert_fim_closed_form(g, c.noise, c.F);
      const Eigen::MatrixXd numeric = numerics::spd_inverse(assemble_fim(fisher_blocks(g, c.noise, c.F))).inverse;
      worst = std::max(worst, testing::normalized_max_error(closed, numeric));
    }
    const double secs = seconds_since(start);
    return Outcome{worst < 1e-8 && secs < 10.0,
                   fmt("max rel err %.3e over %zu scenarios, %.2f s", worst, inverse_cases.size(), secs)};
  });

  report(2, "analytic derivatives vs central differences", [&] {
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& c : derivative_cases) worst = std::max(worst, testing::derivative_check(c.scenario));
    const double secs = seconds_since(start);
    return Outcome{worst < 1e-4 && secs < 30.0,
                   fmt("max rel err %.3e over %zu scenarios, %.2f s", worst, derivative_cases.size(), secs)};
  });

  report(3, "constant-SSP straight-line oracle", [&] {
    const RayScenario s{testing::constant_profile(1500.0, 1), 0.0, 1000.0, testing::thirty_degree_k0()};
    const NoiseModel noise = testing::reference_noise(10);
    const CrbReport r = crb_report(s, noise, build_sampling_matrix(s.profile, noise.sample_depths));
    const double expected[4] = {0.03, 0.33333, 0.33333, 0.23704};
    const double got[4] = {r.crb_h.tof, r.crb_h.depth_s, r.crb_h.depth_d, r.crb_h.ssp};
    double worst = rel(r.crb_d_transform, 0.20028);
    worst = std::max(worst, rel(r.crb_d_total, 0.20028));
    for (int i = 0; i < 4; ++i) worst = std::max(worst, rel(got[i], expected[i]));
    return Outcome{worst < 1e-3, fmt("CRB_h = {%.6g, %.6g, %.6g, %.6g}, CRB_D = %.6g, max rel err %.3e", got[0],
                                     got[1], got[2], got[3], r.crb_d_transform, worst)};
  });

  const SweepConfig config = load_config(preset);
  SweepGrid grid;
  double sweep_seconds = 0.0;
  {
    const auto start = Clock::now();
    grid = run_sweep(config);
    sweep_seconds = seconds_since(start);
  }

  report(4, "transform CRB_D equals angle-form CRB_D on the sweep", [&] {
    double worst = 0.0;
    std::size_t valid = 0;
    for (const SweepCell& c : grid.cells) {
      if (!c.valid) continue;
      ++valid;
      worst = std::max(worst, rel(c.crb_transform, c.crb_total));
    }
    return Outcome{valid > 0 && worst < 1e-6, fmt("max rel delta %.3e over %zu valid cells", worst, valid)};
  });

  report(5, "inverse FIM identities", [&] {
    double depth = 0.0, cross = 0.0, ssp = 0.0;
    for (const auto* set : {&inverse_cases, &derivative_cases}) {
      for (const auto& c : *set) {
        const Eigen::MatrixXd inv = invert_fim_closed_form(tof_gradients(c.scenario), c.noise, c.F);
        const Eigen::Index n = inv.rows() - 3;
        depth = std::max({depth, std::abs(inv(1, 1) - c.noise.sigma_z_sq), std::abs(inv(2, 2) - c.noise.sigma_z_sq)});
        cross = std::max(cross, inv.block(1, 3, 2, n).cwiseAbs().maxCoeff());
        ssp = std::max(ssp, (inv.bottomRightCorner(n, n) - c.noise.sigma_c_sq * c.F.gram_inverse).cwiseAbs().maxCoeff());
      }
    }
    return Outcome{depth < 1e-10 && cross < 1e-12 && ssp < 1e-10,
                   fmt("depth %.3e, cross %.3e, ssp block %.3e", depth, cross, ssp)};
  });

  report(6, "projection law with in-interval sampling", [&] {
    const SoundSpeedProfile profile = testing::demo_profile();
    double worst_bound = 0.0;
    double ratio_lo = 1.0, ratio_hi = 0.0;
    int scenarios = 0;
    for (double z_s : {0.0, 500.0}) {
      for (double z_d : {300.0, 1000.0, 1900.0}) {
        if (z_d <= z_s) continue;
        const double h_top = horizontal_distance({profile, z_s, z_d, k0_upper_bound(profile, z_s, z_d)});
        for (double h : {500.0, 3000.0, 8000.0}) {
          if (h > 0.9 * h_top) continue;
          const RayScenario s{profile, z_s, z_d, solve_k0_from_h(profile, z_s, z_d, h)};
          double ssp[2];
          int k = 0;
          for (std::size_t m : {64, 128}) {
            NoiseModel n = testing::reference_noise(m);
            n.sample_depths = uniform_interval_depths(z_s, z_d, m);
            const SamplingMatrix F = build_sampling_matrix(profile, n.sample_depths);
            const ProjectionDiagnostics p = projection_diagnostics(s, F, n);
            if (!p.samples_in_interval) throw std::runtime_error("samples left the interval");
            worst_bound = std::max(worst_bound, p.riemann_approx / p.upper_bound);
            ssp[k++] = crb_h_breakdown(s, n, F).ssp;
          }
          ratio_lo = std::min(ratio_lo, ssp[1] / ssp[0]);
          ratio_hi = std::max(ratio_hi, ssp[1] / ssp[0]);
          ++scenarios;
        }
      }
    }
    return Outcome{scenarios > 0 && worst_bound <= 1.0 + 1e-6 && ratio_lo >= 0.45 && ratio_hi <= 0.55,
                   fmt("max riemann/upper %.6f, SSP(128)/SSP(64) in [%.4f, %.4f] over %d rays", worst_bound,
                       ratio_lo, ratio_hi, scenarios)};
  });

  report(7, "Monte Carlo bound validation", [&] {
    const auto start = Clock::now();
    const testing::BoundCase c = testing::straight_bound_case(0.01);
    const BoundValidationReport r = validate_bound(c.truth, c.noise, 10000, 1);
    const double secs = seconds_since(start);
    const double floor = 1.0 - 3.0 * r.standard_error_of_variance / r.crb_d;
    const bool efficiency = r.efficiency_ratio >= 0.9 && r.efficiency_ratio <= 1.3 && r.efficiency_ratio >= floor;
    const bool depth = rel(r.z_d_variance, c.noise.sigma_z_sq) <= 0.05;
    const bool kept = static_cast<double>(r.trials - r.excluded) >= 0.95 * static_cast<double>(r.trials);
    return Outcome{efficiency && depth && kept && secs < 120.0,
                   fmt("efficiency %.4f (floor %.4f), var(z_d)/sigma_z^2 %.4f, excluded %zu/%zu, %.2f s",
                       r.efficiency_ratio, floor, r.z_d_variance / c.noise.sigma_z_sq, r.excluded, r.trials, secs)};
  });

  report(8, "reference sweep qualitative claims", [&] {
    std::size_t valid = 0, dominant = 0;
    std::size_t wide = 0, wide_dominant = 0, steep = 0, steep_dominant = 0;
    std::size_t far = 0, far_quiet = 0, invalid = 0, invalid_clean = 0;
    for (const SweepCell& c : grid.cells) {
      if (!c.valid) {
        ++invalid;
        if (c.k0 == 0.0 && c.terms.total() == 0.0 && c.crb_total == 0.0) ++invalid_clean;
        continue;
      }
      ++valid;
      const CrbTerms& t = c.terms;
      const bool dom = t.ssp > t.tof + t.depth_s + t.depth_d;
      dominant += dom;
      const double vertical = std::abs(c.z_d - config.source_depth);
      if (c.h > vertical) {
        ++wide;
        wide_dominant += dom;
      } else {
        ++steep;
        steep_dominant += dom;
      }
      if (std::hypot(c.h, vertical) > 5000.0) {
        ++far;
        far_quiet += (t.depth_s + t.depth_d) < 0.05 * c.crb_total;
      }
    }
    std::stringstream csv;
    write_sweep_csv(csv, grid);
    std::string line;
    std::getline(csv, line);
    std::size_t empty_rows = 0;
    while (std::getline(csv, line)) empty_rows += line.ends_with(",0,,,,,,");

    const double frac = static_cast<double>(dominant) / static_cast<double>(valid);
    const double frac_wide = static_cast<double>(wide_dominant) / static_cast<double>(wide);
    const double frac_steep = steep ? static_cast<double>(steep_dominant) / static_cast<double>(steep) : 0.0;
    const double frac_far = static_cast<double>(far_quiet) / static_cast<double>(far);
    const bool a = frac > 0.5 && frac_wide > frac_steep;
    const bool b = frac_far >= 0.9;
    const bool c = invalid > 0 && invalid_clean == invalid && empty_rows == invalid;
    const bool d = sweep_seconds < 60.0;
    return Outcome{a && b && c && d,
                   fmt("(a) ssp dominant on %.3f of valid cells (%.3f where h>|dz|, %.3f elsewhere); "
                       "(b) depth<5%% on %.3f of %zu cells with D>5 km; (c) %zu invalid cells flagged, %zu blank "
                       "CSV rows; (d) sweep %.2f s",
                       frac, frac_wide, frac_steep, frac_far, far, invalid, empty_rows, sweep_seconds)};
  });

  report(9, "byte-identical outputs across runs", [&] {
    const std::filesystem::path root = std::filesystem::temp_directory_path() / "uwcrb_acceptance";
    std::filesystem::remove_all(root);
    std::vector<std::filesystem::path> dirs{root / "run1", root / "run2"};
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const auto& dir = dirs[k];
      std::filesystem::create_directories(dir);
      const SweepConfig cfg = load_config(preset);
      write_sweep_csv(dir / "sweep.csv", k == 0 ? grid : run_sweep(cfg));
      render_heatmap(dir / "sweep.csv", "crb_total", dir / "crb_total.ppm");
      render_heatmap(dir / "sweep.csv", "crb_ssp", dir / "crb_ssp.ppm");
      const CrbReport point = query_point(cfg, cfg.montecarlo.h, cfg.montecarlo.z_d);
      std::ofstream(dir / "point.json") << to_json(point).dump(2) << '\n';
      const RayScenario truth{cfg.profile, cfg.source_depth, cfg.montecarlo.z_d, point.k0};
      const BoundValidationReport mc = validate_bound(truth, cfg.noise, 500, cfg.montecarlo.seed);
      std::ofstream(dir / "mc.json") << to_json(mc).dump(2) << '\n';
      std::ofstream csv(dir / "mc.csv");
      write_csv(csv, mc);
    }
    std::size_t compared = 0, identical = 0;
    for (const char* name : {"sweep.csv", "crb_total.ppm", "crb_ssp.ppm", "point.json", "mc.json", "mc.csv"}) {
      const std::string a = file_bytes(dirs[0] / name);
      const std::string b = file_bytes(dirs[1] / name);
      ++compared;
      identical += !a.empty() && a == b;
    }
    std::filesystem::remove_all(root);
    return Outcome{identical == compared, fmt("%zu/%zu files identical", identical, compared)};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
