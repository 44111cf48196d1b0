#include "uwcrb/ssp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "uwcrb/error.hpp"
#include "uwcrb/numerics.hpp"

namespace uwcrb {
namespace {

double eval_shape(const PolynomialShape& p, double z) {
  const double u = 2.0 * (z - p.lo) / (p.hi - p.lo) - 1.0;
  double acc = 0.0;
  for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double eval_shape(const HatShape& h, double z) {
  if (z <= h.left || z >= h.right) return 0.0;
  if (z <= h.peak) return (h.peak > h.left) ? (z - h.left) / (h.peak - h.left) : 1.0;
  return (h.right > h.peak) ? (h.right - z) / (h.right - h.peak) : 1.0;
}

double eval_shape(const TabulatedShape& t, double z) {
  if (z <= t.knots.front()) return t.values.front();
  if (z >= t.knots.back()) return t.values.back();
  const auto it = std::upper_bound(t.knots.begin(), t.knots.end(), z);
  const auto i = static_cast<std::size_t>(it - t.knots.begin());
  const double w = (z - t.knots[i - 1]) / (t.knots[i] - t.knots[i - 1]);
  return (1.0 - w) * t.values[i - 1] + w * t.values[i];
}

void validate_shape(const PolynomialShape& p) {
  if (!(p.hi > p.lo)) throw Error(ErrorCode::ValidationError, "polynomial domain needs hi > lo");
  if (p.coefficients.empty()) {
    throw Error(ErrorCode::ValidationError, "polynomial needs at least one coefficient");
  }
}

void validate_shape(const HatShape& h) {
  if (!(h.left <= h.peak && h.peak <= h.right && h.left < h.right)) {
    throw Error(ErrorCode::ValidationError, "hat needs left <= peak <= right, left < right");
  }
}

void validate_shape(const TabulatedShape& t) {
  if (t.knots.size() < 2 || t.knots.size() != t.values.size()) {
    throw Error(ErrorCode::ValidationError, "tabulated basis needs >= 2 knots and matching values");
  }
  for (std::size_t i = 1; i < t.knots.size(); ++i) {
    if (!(t.knots[i] > t.knots[i - 1])) {
      throw Error(ErrorCode::ValidationError, "tabulated knots must be strictly increasing");
    }
  }
}

}  // namespace

BasisFunction::BasisFunction(Shape shape) : shape_(std::move(shape)) {
  std::visit([](const auto& s) { validate_shape(s); }, shape_);
}

BasisFunction BasisFunction::constant(double value) {
  return BasisFunction(PolynomialShape{0.0, 1.0, {value}});
}

BasisFunction BasisFunction::legendre(int degree, double lo, double hi) {
  if (degree < 0) throw Error(ErrorCode::ValidationError, "Legendre degree must be >= 0");
  // Bonnet recurrence carried out on power-series coefficients.
  std::vector<double> p0{1.0};
  std::vector<double> p1{0.0, 1.0};
  if (degree == 0) return BasisFunction(PolynomialShape{lo, hi, p0});
  for (int k = 1; k < degree; ++k) {
    std::vector<double> p2(static_cast<std::size_t>(k) + 2, 0.0);
    for (std::size_t i = 0; i < p1.size(); ++i) p2[i + 1] += (2.0 * k + 1.0) * p1[i] / (k + 1.0);
    for (std::size_t i = 0; i < p0.size(); ++i) p2[i] -= k * p0[i] / (k + 1.0);
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  return BasisFunction(PolynomialShape{lo, hi, p1});
}

double BasisFunction::operator()(double z) const {
  return std::visit([z](const auto& s) { return eval_shape(s, z); }, shape_);
}

std::string BasisFunction::kind() const {
  struct Namer {
    std::string operator()(const PolynomialShape&) const { return "polynomial"; }
    std::string operator()(const HatShape&) const { return "hat"; }
    std::string operator()(const TabulatedShape&) const { return "tabulated"; }
  };
  return std::visit(Namer{}, shape_);
}

bool DepthDomain::contains(double z) const {
  const double slack = 1e-9 * std::max(1.0, hi - lo);
  return z >= lo - slack && z <= hi + slack;
}

SoundSpeedProfile::SoundSpeedProfile(BasisFunction nominal, std::vector<BasisFunction> basis,
                                     Eigen::VectorXd coefficients, DepthDomain domain)
    : nominal_(std::move(nominal)),
      basis_(std::move(basis)),
      coefficients_(std::move(coefficients)),
      domain_(domain) {
  if (!(domain_.hi > domain_.lo)) {
    throw Error(ErrorCode::ValidationError, "depth domain needs hi > lo");
  }
  if (static_cast<std::size_t>(coefficients_.size()) != basis_.size()) {
    std::ostringstream msg;
    msg << basis_.size() << " basis functions but " << coefficients_.size() << " coefficients";
    throw Error(ErrorCode::ValidationError, msg.str());
  }
  constexpr int kChecks = 4096;
  for (int i = 0; i <= kChecks; ++i) {
    const double z = domain_.lo + (domain_.hi - domain_.lo) * i / kChecks;
    const double c = (*this)(z);
    if (!(c > 0.0) || !std::isfinite(c)) {
      std::ostringstream msg;
      msg << "sound speed " << c << " at z=" << z << " is not positive";
      throw Error(ErrorCode::ValidationError, msg.str());
    }
  }
}

void SoundSpeedProfile::check_domain(double z) const {
  if (!domain_.contains(z)) {
    std::ostringstream msg;
    msg << "depth " << z << " outside [" << domain_.lo << ", " << domain_.hi << "]";
    throw Error(ErrorCode::OutOfDomain, msg.str());
  }
}

double SoundSpeedProfile::nominal(double z) const { return nominal_(z); }

double SoundSpeedProfile::operator()(double z) const {
  double c = nominal_(z);
  for (std::size_t n = 0; n < basis_.size(); ++n) {
    c += coefficients_[static_cast<Eigen::Index>(n)] * basis_[n](z);
  }
  return c;
}

double SoundSpeedProfile::eval_with_basis(double z, std::span<double> basis_values) const {
  double c = nominal_(z);
  for (std::size_t n = 0; n < basis_.size(); ++n) {
    basis_values[n] = basis_[n](z);
    c += coefficients_[static_cast<Eigen::Index>(n)] * basis_values[n];
  }
  return c;
}

SoundSpeedProfile SoundSpeedProfile::with_coefficients(Eigen::VectorXd coefficients) const {
  return SoundSpeedProfile(nominal_, basis_, std::move(coefficients), domain_);
}

double eval_ssp(const SoundSpeedProfile& profile, double z) {
  if (!profile.domain().contains(z)) {
    std::ostringstream msg;
    msg << "depth " << z << " outside [" << profile.domain().lo << ", " << profile.domain().hi
        << "]";
    throw Error(ErrorCode::OutOfDomain, msg.str());
  }
  return profile(z);
}

void NoiseModel::validate(const SoundSpeedProfile& profile) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::ValidationError, std::string(name) + " must be a positive finite variance");
    }
  };
  positive(sigma_t_sq, "sigma_t_sq");
  positive(sigma_z_sq, "sigma_z_sq");
  positive(sigma_c_sq, "sigma_c_sq");
  if (sample_count() < profile.basis_size()) {
    std::ostringstream msg;
    msg << "sample count M=" << sample_count() << " below basis size N=" << profile.basis_size();
    throw Error(ErrorCode::ValidationError, msg.str());
  }
  for (Eigen::Index m = 0; m < sample_depths.size(); ++m) {
    if (!profile.domain().contains(sample_depths[m])) {
      std::ostringstream msg;
      msg << "sample depth " << sample_depths[m] << " outside the profile domain";
      throw Error(ErrorCode::ValidationError, msg.str());
    }
  }
}

Eigen::VectorXd uniform_column_depths(double depth, std::size_t count) {
  return uniform_interval_depths(0.0, depth, count);
}

Eigen::VectorXd uniform_interval_depths(double from, double to, std::size_t count) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(count));
  for (std::size_t m = 1; m <= count; ++m) {
    z[static_cast<Eigen::Index>(m - 1)] =
        from + static_cast<double>(m) * (to - from) / static_cast<double>(count);
  }
  if (count > 0) z[static_cast<Eigen::Index>(count - 1)] = to;
  return z;
}

SamplingMatrix build_sampling_matrix(const SoundSpeedProfile& profile,
                                     const Eigen::VectorXd& depths) {
  const auto n = static_cast<Eigen::Index>(profile.basis_size());
  const Eigen::Index m = depths.size();
  if (m < n) {
    std::ostringstream msg;
    msg << "M=" << m << " samples cannot determine N=" << n << " coefficients";
    throw Error(ErrorCode::RankDeficient, msg.str());
  }
  SamplingMatrix out;
  out.entries.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!profile.domain().contains(depths[i])) {
      throw Error(ErrorCode::OutOfDomain, "sample depth outside the profile domain");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      out.entries(i, j) = profile.basis(static_cast<std::size_t>(j))(depths[i]);
    }
  }
  out.gram = out.entries.transpose() * out.entries;
  if (n == 0) {
    out.gram_inverse.resize(0, 0);
    return out;
  }
  out.condition_number = numerics::symmetric_condition_number(out.gram);
  if (!std::isfinite(out.condition_number)) {
    throw Error(ErrorCode::RankDeficient, "F^T F is singular");
  }
  if (out.condition_number > kMaxGramCondition) {
    std::ostringstream msg;
    msg << "condition number of F^T F is " << out.condition_number;
    throw Error(ErrorCode::IllConditionedBasis, msg.str());
  }
  out.gram_inverse = numerics::spd_inverse(out.gram).inverse;
  return out;
}

double GaussianSource::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSource::standard_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open()));
  const double phi = 2.0 * std::numbers::pi * uniform_open();
  cached_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

Eigen::VectorXd simulate_ssp_measurements(const SoundSpeedProfile& profile,
                                          const NoiseModel& noise, GaussianSource& rng) {
  Eigen::VectorXd c(noise.sample_depths.size());
  for (Eigen::Index m = 0; m < c.size(); ++m) {
    c[m] = eval_ssp(profile, noise.sample_depths[m]) + rng.normal(noise.sigma_c_sq);
  }
  return c;
}

Eigen::VectorXd simulate_ssp_measurements(const SoundSpeedProfile& profile,
                                          const NoiseModel& noise, std::uint64_t seed) {
  GaussianSource rng(seed);
  return simulate_ssp_measurements(profile, noise, rng);
}

}  // namespace uwcrb
