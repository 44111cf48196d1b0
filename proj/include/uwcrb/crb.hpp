#pragma once

// Fisher information for the parameters x = (k0, z_s, z_d, a_1..a_N) from
// the measurements (t, z_s, z_d, c_1..c_M), its closed-form inverse, the
// change of variables to y = (h, z_s, z_d, a), and the per-noise-source
// decompositions of the bounds on h and on the range D.
//
// All matrices use 0-based indices in the parameter order above.
//
// Straight-line check values. For c(z) = c constant, span L = |z_d - z_s|,
// launch angle theta (k0 = cos(theta) / c), one constant basis function and
// M samples:
//   CRB_h: tof     sigma_t^2 / k0^2
//          depth   sigma_z^2 tan^2(theta) at each endpoint
//          ssp     sigma_c^2 (L g)^2 / M,  g = 1 / (k0 c^2 sin(theta))
//   CRB_D: tof     sigma_t^2 c^2
//          depth   0
//          ssp     cos^2(theta) times the CRB_h ssp term
// With c = 1500, theta = 30 deg, L = 1000, M = 10 and variances
// (1e-8, 1, 1): CRB_h terms (0.03, 1/3, 1/3, 0.237037), CRB_D 0.200278.

#include <Eigen/Dense>

#include "uwcrb/numerics.hpp"
#include "uwcrb/ray.hpp"
#include "uwcrb/ssp.hpp"

namespace uwcrb {

/// k0 below this is treated as a vertical ray, for which the bound on h is
/// undefined (1/k0 and 1/(dt/dk0) diverge).
inline constexpr double kMinK0 = 1e-12;

struct FisherBlocks {
  Eigen::Matrix3d A;
  Eigen::MatrixXd B;  // 3 x N
  Eigen::MatrixXd D;  // N x N
};

struct FisherWorkspace {
  FisherBlocks blocks;
  Eigen::MatrixXd fim;             // I_x
  Eigen::MatrixXd fim_inverse;     // closed form
  Eigen::MatrixXd jacobian;        // H, (N+3) x (N+3)
  Eigen::MatrixXd transformed;     // I_y^-1 = H^T I_x^-1 H
};

struct CrbTerms {
  double tof = 0.0;
  double depth_s = 0.0;
  double depth_d = 0.0;
  double ssp = 0.0;
  double total() const { return tof + depth_s + depth_d + ssp; }
};

struct ProjectionDiagnostics {
  double value = 0.0;           // ||dh/da - dt/da / k0||^2 over (F^T F)^-1
  double riemann_approx = 0.0;  // (dz g^T F)(F^T F)^-1(F^T g dz)
  double upper_bound = 0.0;     // dz * E_g
  double energy = 0.0;          // E_g, integral of g^2 over the path
  double delta_z = 0.0;         // |z_d - z_s| / M
  bool samples_in_interval = false;
  Eigen::VectorXd inner_products;  // integral of g f_n, n = 1..N
};

struct CrbReport {
  RayGeometry geometry;
  double k0 = 0.0;
  CrbTerms crb_h;
  CrbTerms crb_d;
  double crb_h_total = 0.0;
  double crb_d_total = 0.0;
  double crb_h_transform = 0.0;  // [I_y^-1]_00
  double crb_d_transform = 0.0;  // s^T [I_y^-1]_{0:3,0:3} s
  ProjectionDiagnostics projection;
  bool valid = false;

  double projection_value() const { return projection.value; }
  double projection_upper_bound() const { return projection.upper_bound; }
  /// |transform - decomposition| / decomposition for the range bound.
  double cross_check_delta() const;
};

FisherBlocks fisher_blocks(const TofGradients& grad, const NoiseModel& noise,
                           const SamplingMatrix& F);
FisherBlocks fisher_blocks(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                           const numerics::QuadratureSpec& quad = {});

Eigen::MatrixXd assemble_fim(const FisherBlocks& blocks);

/// Element-wise closed form of I_x^-1; needs dt/dk0 != 0.
Eigen::MatrixXd invert_fim_closed_form(const TofGradients& grad, const NoiseModel& noise,
                                       const SamplingMatrix& F);

/// Closed-form inverse of the 3x3 block A.
Eigen::Matrix3d a_block_inverse(const TofGradients& grad, const NoiseModel& noise);

/// Contribution of the SSP coefficients to [I_x^-1]_00 beyond [A^-1]_00:
/// (dt/da) (F^T F / sigma_c^2)^-1 (dt/da)^T / (dt/dk0)^2.
double woodbury_k0_correction(const TofGradients& grad, const NoiseModel& noise,
                              const SamplingMatrix& F);

/// H: first column is the gradient of h in x; identity elsewhere on the diagonal.
Eigen::MatrixXd jacobian_h_matrix(const HdistGradients& grad);
Eigen::MatrixXd jacobian_h_matrix(const RayScenario& s, const numerics::QuadratureSpec& quad = {});

Eigen::MatrixXd transform_inverse(const Eigen::MatrixXd& fim_inverse, const Eigen::MatrixXd& H);

FisherWorkspace fisher_workspace(const RayScenario& s, const NoiseModel& noise,
                                 const SamplingMatrix& F, const numerics::QuadratureSpec& quad = {});

/// g(z) = 1 / (k0 c^2 sqrt(1 - (k0 c)^2)).
double g_eval(const RayScenario& s, double z);

ProjectionDiagnostics projection_diagnostics(const RayScenario& s, const SamplingMatrix& F,
                                             const NoiseModel& noise,
                                             const numerics::QuadratureSpec& quad = {});

CrbTerms crb_h_breakdown(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                         const numerics::QuadratureSpec& quad = {});
CrbTerms crb_d_breakdown(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                         const numerics::QuadratureSpec& quad = {});
double crb_d_transform(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                       const numerics::QuadratureSpec& quad = {});

/// Everything above from one pass of ray integrals.
CrbReport crb_report(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                     const numerics::QuadratureSpec& quad = {});

}  // namespace uwcrb
