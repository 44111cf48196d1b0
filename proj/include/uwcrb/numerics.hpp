#pragma once

// Quadrature, bracketed root finding, finite differences and small dense
// SPD inversion shared by the ray, crb and montecarlo modules.

#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace uwcrb::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = std::size_t{1} << 14;
};

struct RootSpec {
  double bracket_lo = 0.0;
  double bracket_hi = 1.0;
  double x_tol = 1e-14;  // relative to |root|
  double abs_tol = 0.0;  // floor for roots at or near zero
  int max_iter = 200;
};

using ScalarFunction = std::function<double(double)>;
// Writes dim integrand values for abscissa z into out.
using VectorIntegrand = std::function<void(double z, std::span<double> out)>;
using MultivariateFunction = std::function<double(const Eigen::VectorXd&)>;

/// Globally adaptive Gauss-Legendre quadrature (15-point panels). The panel
/// error is the difference between the panel rule and the rule applied to
/// its two halves; the panel with the largest error is bisected until the
/// summed error is below max(abs_tol, rel_tol * |result|).
///
/// lo > hi is allowed and returns the negated integral over [hi, lo].
double integrate(const ScalarFunction& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

/// Vector-valued variant: all components share the panel subdivision and
/// every component must meet its own tolerance.
Eigen::VectorXd integrate_vector(const VectorIntegrand& f, std::size_t dim, double lo,
                                 double hi, const QuadratureSpec& spec = {});

/// Brent's method on a sign-changing bracket. Returns a point inside
/// [bracket_lo, bracket_hi].
double find_root_monotonic(const ScalarFunction& f, const RootSpec& spec);

/// Central differences with a uniform step.
Eigen::VectorXd finite_difference_gradient(const MultivariateFunction& f,
                                           const Eigen::VectorXd& x0, double step);

/// Central differences with a per-coordinate step.
Eigen::VectorXd finite_difference_gradient(const MultivariateFunction& f,
                                           const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& steps);

/// 1e-6 * max(1, |x_i|) per coordinate.
Eigen::VectorXd default_fd_steps(const Eigen::VectorXd& x0);

struct SpdInverse {
  Eigen::MatrixXd inverse;
  double condition_number = 0.0;  // of the input, from its eigenvalues
};

/// Inverse of a symmetric positive definite matrix. The matrix is
/// symmetrically equilibrated by its diagonal before the Cholesky solve, so
/// badly scaled Fisher matrices stay invertible to near working precision.
SpdInverse spd_inverse(const Eigen::MatrixXd& m);

/// Ratio of extreme eigenvalues of a symmetric matrix (inf if not positive).
double symmetric_condition_number(const Eigen::MatrixXd& m);

}  // namespace uwcrb::numerics
