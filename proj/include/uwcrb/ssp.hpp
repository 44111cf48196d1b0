#pragma once

// Sound speed profile c(z) = nominal(z) + sum_n a_n f_n(z), its sampling
// matrix at CTD depths, and simulated noisy CTD casts.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace uwcrb {

// Power series in the normalized depth u = 2 (z - lo) / (hi - lo) - 1.
struct PolynomialShape {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> coefficients;  // c0 + c1 u + c2 u^2 + ...
};

// Triangle rising from 0 at left to 1 at peak and back to 0 at right.
struct HatShape {
  double left = 0.0;
  double peak = 0.5;
  double right = 1.0;
};

// Linear interpolation between knots; constant extrapolation outside them.
struct TabulatedShape {
  std::vector<double> knots;  // strictly increasing depths
  std::vector<double> values;
};

class BasisFunction {
 public:
  using Shape = std::variant<PolynomialShape, HatShape, TabulatedShape>;

  explicit BasisFunction(Shape shape);

  static BasisFunction constant(double value);
  /// Shifted Legendre polynomial P_degree on [lo, hi].
  static BasisFunction legendre(int degree, double lo, double hi);

  double operator()(double z) const;
  const Shape& shape() const { return shape_; }
  std::string kind() const;

 private:
  Shape shape_;
};

struct DepthDomain {
  double lo = 0.0;
  double hi = 2000.0;
  bool contains(double z) const;
};

class SoundSpeedProfile {
 public:
  /// Validates c(z) > 0 over the domain on a dense grid.
  SoundSpeedProfile(BasisFunction nominal, std::vector<BasisFunction> basis,
                    Eigen::VectorXd coefficients, DepthDomain domain);

  double operator()(double z) const;
  /// c(z), also writing f_n(z) for every basis function into basis_values.
  double eval_with_basis(double z, std::span<double> basis_values) const;
  double nominal(double z) const;

  std::size_t basis_size() const { return basis_.size(); }
  const BasisFunction& basis(std::size_t n) const { return basis_[n]; }
  const std::vector<BasisFunction>& basis_functions() const { return basis_; }
  const BasisFunction& nominal_function() const { return nominal_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const DepthDomain& domain() const { return domain_; }

  /// Same nominal and basis, different coefficients.
  SoundSpeedProfile with_coefficients(Eigen::VectorXd coefficients) const;

 private:
  void check_domain(double z) const;

  BasisFunction nominal_;
  std::vector<BasisFunction> basis_;
  Eigen::VectorXd coefficients_;
  DepthDomain domain_;
};

/// c(z) evaluated at a depth inside the profile's domain.
double eval_ssp(const SoundSpeedProfile& profile, double z);

struct NoiseModel {
  double sigma_t_sq = 1e-8;  // s^2
  double sigma_z_sq = 1.0;   // m^2
  double sigma_c_sq = 1.0;   // (m/s)^2
  Eigen::VectorXd sample_depths;

  std::size_t sample_count() const { return static_cast<std::size_t>(sample_depths.size()); }
  /// Throws ValidationError on non-positive variances, M < N or depths
  /// outside the profile domain.
  void validate(const SoundSpeedProfile& profile) const;
};

/// z_m = m * depth / count for m = 1..count.
Eigen::VectorXd uniform_column_depths(double depth, std::size_t count);
/// z_m = from + m * (to - from) / count for m = 1..count.
Eigen::VectorXd uniform_interval_depths(double from, double to, std::size_t count);

struct SamplingMatrix {
  Eigen::MatrixXd entries;        // M x N, [m, n] = f_n(z_m)
  Eigen::MatrixXd gram;           // F^T F
  Eigen::MatrixXd gram_inverse;   // (F^T F)^-1
  double condition_number = 1.0;  // of F^T F
};

inline constexpr double kMaxGramCondition = 1e12;

SamplingMatrix build_sampling_matrix(const SoundSpeedProfile& profile,
                                     const Eigen::VectorXd& depths);

/// mt19937_64 with Box-Muller normals; bit-reproducible across platforms
/// for a given seed, unlike std::normal_distribution.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}
  double standard_normal();
  double normal(double variance) { return std::sqrt(variance) * standard_normal(); }

 private:
  double uniform_open();  // (0, 1]
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// nominal(z_m) + [F a]_m + v_m with v_m ~ N(0, sigma_c^2).
Eigen::VectorXd simulate_ssp_measurements(const SoundSpeedProfile& profile,
                                          const NoiseModel& noise, GaussianSource& rng);
Eigen::VectorXd simulate_ssp_measurements(const SoundSpeedProfile& profile,
                                          const NoiseModel& noise, std::uint64_t seed);

}  // namespace uwcrb
