#pragma once

// Empirical check of the range bound: simulate the measurement vector,
// estimate x = (k0, z_s, z_d, a) by weighted Gauss-Newton (the ML estimate
// under Gaussian noise), map to D and compare the spread of D with CRB_D.

#include <cstdint>

#include <Eigen/Dense>

#include "uwcrb/ray.hpp"
#include "uwcrb/ssp.hpp"

namespace uwcrb {

struct MeasurementVector {
  double t_hat = 0.0;
  double z_s_hat = 0.0;
  double z_d_hat = 0.0;
  Eigen::VectorXd c_hat;
};

/// Draw order from one GaussianSource(seed): t, z_s, z_d, then c_1..c_M.
MeasurementVector simulate_measurements(const RayScenario& truth, const NoiseModel& noise,
                                        std::uint64_t seed);

/// What the estimator knows: nominal profile, basis, sample depths and the
/// noise variances. Coefficients of `profile` are ignored.
struct EstimationModel {
  SoundSpeedProfile profile;
  NoiseModel noise;
  SamplingMatrix F;
};

/// The profile domain is widened by 10 sigma_z on both sides so depth
/// estimates that fall just outside the water column (e.g. a surface node)
/// remain evaluable.
EstimationModel make_estimation_model(const SoundSpeedProfile& truth_profile,
                                      const NoiseModel& noise);

struct EstimatorOptions {
  int max_iterations = 50;
  int max_halvings = 30;
  // Converged once ||J^T r|| / (||J|| ||r||) or ||J^T r|| / ||J0^T r0||
  // falls below this.
  double optimality_tol = 1e-8;
};

struct EstimatorResult {
  Eigen::VectorXd x_hat;
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;   // ||weighted residual||
  double optimality = 0.0;      // ||J^T r|| / (||J|| ||r||)
  double D_hat = 0.0;
  bool projected = false;       // k0 or a depth was clamped at least once
};

/// Depths from their measurements, a by unweighted least squares on c_hat,
/// k0 by inverting t with the plug-in profile.
Eigen::VectorXd initial_estimate(const MeasurementVector& meas, const EstimationModel& model);

EstimatorResult ml_estimate(const MeasurementVector& meas, const EstimationModel& model,
                            const Eigen::VectorXd& init, const EstimatorOptions& options = {});

struct BoundValidationReport {
  std::size_t trials = 0;
  std::size_t excluded = 0;
  double D_true = 0.0;
  double mean_D_hat = 0.0;
  double empirical_bias = 0.0;
  double empirical_variance = 0.0;  // about the sample mean
  double empirical_mse = 0.0;       // about the truth
  double crb_d = 0.0;
  double efficiency_ratio = 0.0;
  double standard_error_of_variance = 0.0;
  double z_d_variance = 0.0;        // empirical variance of the depth estimate
};

/// Trials i = 0..trials-1 use seed + i. Runs trials with OpenMP.
BoundValidationReport validate_bound(const RayScenario& truth, const NoiseModel& noise,
                                     std::size_t trials, std::uint64_t seed);
/// Reference single-threaded implementation; bitwise identical output.
BoundValidationReport validate_bound_serial(const RayScenario& truth, const NoiseModel& noise,
                                            std::size_t trials, std::uint64_t seed);

}  // namespace uwcrb
