#pragma once

// Single-crossing acoustic rays between two depths under Snell's law:
// travel time, horizontal distance, the Snell constant solvers and the
// analytic partial derivatives used by the Fisher information.
//
// Orientation: integrals run over [min(z_s, z_d), max(z_s, z_d)] so that
// t > 0 and h >= 0 for either depth ordering. Depth derivatives are the true
// derivatives of those oriented integrals; when z_s < z_d this gives
// dt/dz_s < 0 < dt/dz_d. Angles lie in (0, pi/2] measured from horizontal.

#include <Eigen/Dense>

#include "uwcrb/numerics.hpp"
#include "uwcrb/ssp.hpp"

namespace uwcrb {

/// Minimum admissible 1 - (k0 c(z))^2 along the path.
inline constexpr double kFeasibilityMargin = 1e-9;
/// Depth samples used by the single-crossing scan (before refinement).
inline constexpr int kCrossingGrid = 1024;

struct RayScenario {
  SoundSpeedProfile profile;
  double z_s = 0.0;
  double z_d = 0.0;
  double k0 = 0.0;  // s/m
};

struct RayGeometry {
  double t = 0.0;
  double h = 0.0;
  double D = 0.0;
  double theta_s = 0.0;
  double theta_d = 0.0;
  double theta_0 = 0.0;
};

struct RayAngles {
  double theta_s = 0.0;
  double theta_d = 0.0;
  double theta_0 = 0.0;
};

struct SingleCrossingReport {
  bool valid = false;
  double worst_margin = 0.0;  // min of 1 - (k0 c)^2 over the path
  double worst_depth = 0.0;
};

struct PathMaximum {
  double speed = 0.0;
  double depth = 0.0;
};

struct TofGradients {
  double dk0 = 0.0;
  double dz_s = 0.0;
  double dz_d = 0.0;
  Eigen::VectorXd da;
};

using HdistGradients = TofGradients;

struct RayDerivatives {
  TofGradients tof;
  HdistGradients hdist;
};

/// Largest c(z) between the two depths: dense scan plus golden-section
/// refinement around the best sample.
PathMaximum max_speed_on_path(const SoundSpeedProfile& profile, double z_a, double z_b);

/// (1 - 10 eps) / max c on the path; every k0 in [0, bound] is feasible.
double k0_upper_bound(const SoundSpeedProfile& profile, double z_s, double z_d);

double tof(const RayScenario& s, const numerics::QuadratureSpec& quad = {});
double horizontal_distance(const RayScenario& s, const numerics::QuadratureSpec& quad = {});
RayGeometry ray_geometry(const RayScenario& s, const numerics::QuadratureSpec& quad = {});

double solve_k0_from_tof(const SoundSpeedProfile& profile, double z_s, double z_d,
                         double t_target, const numerics::QuadratureSpec& quad = {});
double solve_k0_from_h(const SoundSpeedProfile& profile, double z_s, double z_d,
                       double h_target, const numerics::QuadratureSpec& quad = {});

SingleCrossingReport validate_single_crossing(const RayScenario& s);

RayAngles ray_angles(const RayScenario& s, const numerics::QuadratureSpec& quad = {});
/// Same, with h already known.
RayAngles ray_angles(const RayScenario& s, double h);

TofGradients tof_gradients(const RayScenario& s, const numerics::QuadratureSpec& quad = {});
/// dh/dk0 is integrated directly, so k0 = 0 yields its limit, the integral of c.
HdistGradients hdist_gradients(const RayScenario& s, const numerics::QuadratureSpec& quad = {});
/// Both gradient sets from a single pass over the path.
RayDerivatives ray_derivatives(const RayScenario& s, const numerics::QuadratureSpec& quad = {});

}  // namespace uwcrb
