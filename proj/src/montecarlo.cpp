#include "uwcrb/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "uwcrb/crb.hpp"
#include "uwcrb/error.hpp"

namespace uwcrb {
namespace {

struct Evaluation {
  Eigen::VectorXd residual;  // weighted, measurement minus model
  Eigen::MatrixXd jacobian;  // weighted d(model)/dx
  double objective = 0.0;
};

RayScenario scenario_at(const EstimationModel& model, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() - 3;
  return {model.profile.with_coefficients(x.tail(n)), x[1], x[2], x[0]};
}

Evaluation evaluate(const MeasurementVector& meas, const EstimationModel& model,
                    const Eigen::VectorXd& x, bool with_jacobian) {
  const Eigen::Index n = x.size() - 3;
  const Eigen::Index m = meas.c_hat.size();
  const NoiseModel& noise = model.noise;
  const double st = std::sqrt(noise.sigma_t_sq);
  const double sz = std::sqrt(noise.sigma_z_sq);
  const double sc = std::sqrt(noise.sigma_c_sq);
  const RayScenario s = scenario_at(model, x);

  Evaluation e;
  e.residual.resize(m + 3);
  e.residual[0] = (meas.t_hat - tof(s)) / st;
  e.residual[1] = (meas.z_s_hat - x[1]) / sz;
  e.residual[2] = (meas.z_d_hat - x[2]) / sz;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double nominal = model.profile.nominal(noise.sample_depths[i]);
    e.residual[3 + i] = (meas.c_hat[i] - nominal - model.F.entries.row(i).dot(x.tail(n))) / sc;
  }
  e.objective = 0.5 * e.residual.squaredNorm();
  if (with_jacobian) {
    const TofGradients g = tof_gradients(s);
    e.jacobian = Eigen::MatrixXd::Zero(m + 3, n + 3);
    e.jacobian(0, 0) = g.dk0 / st;
    e.jacobian(0, 1) = g.dz_s / st;
    e.jacobian(0, 2) = g.dz_d / st;
    e.jacobian.block(0, 3, 1, n) = g.da.transpose() / st;
    e.jacobian(1, 1) = 1.0 / sz;
    e.jacobian(2, 2) = 1.0 / sz;
    e.jacobian.bottomRightCorner(m, n) = model.F.entries / sc;
  }
  return e;
}

// Keeps the iterate where the ray model is defined. Returns true if moved.
bool project_feasible(const EstimationModel& model, Eigen::VectorXd& x) {
  bool moved = false;
  const DepthDomain& dom = model.profile.domain();
  for (Eigen::Index i : {Eigen::Index{1}, Eigen::Index{2}}) {
    const double clamped = std::clamp(x[i], dom.lo, dom.hi);
    moved |= clamped != x[i];
    x[i] = clamped;
  }
  const Eigen::Index n = x.size() - 3;
  const SoundSpeedProfile trial = model.profile.with_coefficients(x.tail(n));
  const double k_hi = k0_upper_bound(trial, x[1], x[2]);
  const double clamped = std::clamp(x[0], 0.0, k_hi);
  moved |= clamped != x[0];
  x[0] = clamped;
  return moved;
}

double optimality_of(const Evaluation& e) {
  const double r = e.residual.norm();
  if (r == 0.0) return 0.0;
  const double j = e.jacobian.norm();
  return (e.jacobian.transpose() * e.residual).norm() / (j * r);
}

double range_of(const EstimationModel& model, const Eigen::VectorXd& x) {
  const RayScenario s = scenario_at(model, x);
  return std::hypot(horizontal_distance(s), x[1] - x[2]);
}

}  // namespace

MeasurementVector simulate_measurements(const RayScenario& truth, const NoiseModel& noise,
                                        std::uint64_t seed) {
  GaussianSource rng(seed);
  MeasurementVector meas;
  meas.t_hat = tof(truth) + rng.normal(noise.sigma_t_sq);
  meas.z_s_hat = truth.z_s + rng.normal(noise.sigma_z_sq);
  meas.z_d_hat = truth.z_d + rng.normal(noise.sigma_z_sq);
  meas.c_hat = simulate_ssp_measurements(truth.profile, noise, rng);
  return meas;
}

EstimationModel make_estimation_model(const SoundSpeedProfile& truth_profile,
                                      const NoiseModel& noise) {
  noise.validate(truth_profile);
  const double pad = 10.0 * std::sqrt(noise.sigma_z_sq);
  const DepthDomain dom{truth_profile.domain().lo - pad, truth_profile.domain().hi + pad};
  SoundSpeedProfile profile(truth_profile.nominal_function(), truth_profile.basis_functions(),
                            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(truth_profile.basis_size())),
                            dom);
  SamplingMatrix F = build_sampling_matrix(profile, noise.sample_depths);
  return {std::move(profile), noise, std::move(F)};
}

Eigen::VectorXd initial_estimate(const MeasurementVector& meas, const EstimationModel& model) {
  const Eigen::Index n = static_cast<Eigen::Index>(model.profile.basis_size());
  Eigen::VectorXd x(n + 3);
  const DepthDomain& dom = model.profile.domain();
  x[1] = std::clamp(meas.z_s_hat, dom.lo, dom.hi);
  x[2] = std::clamp(meas.z_d_hat, dom.lo, dom.hi);
  if (n > 0) {
    Eigen::VectorXd centered(meas.c_hat.size());
    for (Eigen::Index i = 0; i < centered.size(); ++i) {
      centered[i] = meas.c_hat[i] - model.profile.nominal(model.noise.sample_depths[i]);
    }
    x.tail(n) = model.F.gram_inverse * (model.F.entries.transpose() * centered);
  }
  const SoundSpeedProfile plug_in = model.profile.with_coefficients(x.tail(n));
  try {
    x[0] = solve_k0_from_tof(plug_in, x[1], x[2], meas.t_hat);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TargetBelowMinimum) {
      x[0] = 0.0;
    } else if (e.code() == ErrorCode::TargetUnreachable) {
      x[0] = k0_upper_bound(plug_in, x[1], x[2]);
    } else {
      throw;
    }
  }
  return x;
}

EstimatorResult ml_estimate(const MeasurementVector& meas, const EstimationModel& model,
                            const Eigen::VectorXd& init, const EstimatorOptions& options) {
  const auto n = static_cast<Eigen::Index>(model.profile.basis_size());
  if (init.size() != n + 3 || meas.c_hat.size() != model.noise.sample_depths.size()) {
    throw Error(ErrorCode::DimensionMismatch, "initial point or measurement size mismatch");
  }
  EstimatorResult result;
  Eigen::VectorXd x = init;
  result.projected = project_feasible(model, x);
  Evaluation current = evaluate(meas, model, x, true);
  const double initial_gradient = (current.jacobian.transpose() * current.residual).norm();
  // Either the residual is orthogonal to the model tangent space, or (for
  // near zero-residual fits, where that angle stays finite) the gradient
  // has collapsed relative to its starting value.
  auto stationary = [&](const Evaluation& e, double tol) {
    return optimality_of(e) <= tol ||
           (e.jacobian.transpose() * e.residual).norm() <= tol * initial_gradient;
  };

  for (int iter = 0;; ++iter) {
    result.optimality = optimality_of(current);
    if (stationary(current, options.optimality_tol)) {
      result.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    const Eigen::VectorXd step =
        current.jacobian.colPivHouseholderQr().solve(current.residual);
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      Eigen::VectorXd candidate = x + scale * step;
      const bool moved = project_feasible(model, candidate);
      Evaluation trial = evaluate(meas, model, candidate, false);
      if (trial.objective < current.objective) {
        result.projected |= moved;
        x = candidate;
        current = evaluate(meas, model, x, true);
        improved = true;
        break;
      }
    }
    result.iterations = iter + 1;
    if (!improved) {
      // No descent along the Gauss-Newton direction: at working precision
      // the iterate is stationary.
      result.optimality = optimality_of(current);
      result.converged = stationary(current, 1e3 * options.optimality_tol);
      break;
    }
  }
  result.x_hat = x;
  result.residual_norm = current.residual.norm();
  result.D_hat = range_of(model, x);
  return result;
}

namespace {

struct TrialOutcome {
  bool ok = false;
  double D_hat = 0.0;
  double z_d_hat = 0.0;
};

TrialOutcome run_trial(const RayScenario& truth, const NoiseModel& noise,
                       const EstimationModel& model, std::uint64_t seed) {
  TrialOutcome out;
  try {
    const MeasurementVector meas = simulate_measurements(truth, noise, seed);
    const EstimatorResult r = ml_estimate(meas, model, initial_estimate(meas, model));
    out.ok = r.converged && std::isfinite(r.D_hat);
    out.D_hat = r.D_hat;
    out.z_d_hat = r.x_hat[2];
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

BoundValidationReport summarize(const RayScenario& truth, const NoiseModel& noise,
                                const SamplingMatrix& F, const std::vector<TrialOutcome>& outcomes) {
  BoundValidationReport rep;
  rep.trials = outcomes.size();
  std::vector<double> d;
  std::vector<double> zd;
  d.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.ok) {
      d.push_back(o.D_hat);
      zd.push_back(o.z_d_hat);
    }
  }
  rep.excluded = rep.trials - d.size();
  if (static_cast<double>(rep.excluded) > 0.05 * static_cast<double>(rep.trials)) {
    std::ostringstream msg;
    msg << rep.excluded << " of " << rep.trials << " trials failed to converge";
    throw Error(ErrorCode::TooManyFailures, msg.str());
  }
  const double count = static_cast<double>(d.size());
  if (d.size() < 2) throw Error(ErrorCode::TooManyFailures, "fewer than two usable trials");

  rep.D_true = std::hypot(horizontal_distance(truth), truth.z_s - truth.z_d);
  double mean = 0.0;
  double mean_zd = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    mean += d[i];
    mean_zd += zd[i];
  }
  mean /= count;
  mean_zd /= count;
  double m2 = 0.0, m4 = 0.0, sq_truth = 0.0, m2_zd = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double dev = d[i] - mean;
    m2 += dev * dev;
    m4 += dev * dev * dev * dev;
    sq_truth += (d[i] - rep.D_true) * (d[i] - rep.D_true);
    m2_zd += (zd[i] - mean_zd) * (zd[i] - mean_zd);
  }
  rep.mean_D_hat = mean;
  rep.empirical_bias = mean - rep.D_true;
  rep.empirical_variance = m2 / (count - 1.0);
  rep.empirical_mse = sq_truth / count;
  rep.z_d_variance = m2_zd / (count - 1.0);
  const double fourth = m4 / count;
  const double second = m2 / count;
  rep.standard_error_of_variance = std::sqrt(std::max(0.0, fourth - second * second) / count);
  rep.crb_d = crb_d_transform(truth, noise, F);
  rep.efficiency_ratio = rep.empirical_variance / rep.crb_d;
  return rep;
}

void require_trials(std::size_t trials) {
  if (trials < 100) throw Error(ErrorCode::InvalidArgument, "validate_bound needs >= 100 trials");
}

}  // namespace

BoundValidationReport validate_bound_serial(const RayScenario& truth, const NoiseModel& noise,
                                            std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  const EstimationModel model = make_estimation_model(truth.profile, noise);
  const SamplingMatrix F = build_sampling_matrix(truth.profile, noise.sample_depths);
  std::vector<TrialOutcome> outcomes(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    outcomes[i] = run_trial(truth, noise, model, seed + i);
  }
  return summarize(truth, noise, F, outcomes);
}

BoundValidationReport validate_bound(const RayScenario& truth, const NoiseModel& noise,
                                     std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  const EstimationModel model = make_estimation_model(truth.profile, noise);
  const SamplingMatrix F = build_sampling_matrix(truth.profile, noise.sample_depths);
  std::vector<TrialOutcome> outcomes(trials);
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_trial(truth, noise, model, seed + static_cast<std::uint64_t>(i));
  }
  return summarize(truth, noise, F, outcomes);
}

}  // namespace uwcrb
