#include "uwcrb/crb.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "uwcrb/error.hpp"

namespace uwcrb {
namespace {

void require_bound_scenario(const RayScenario& s) {
  if (!(s.k0 >= kMinK0)) {
    std::ostringstream msg;
    msg << "k0=" << s.k0 << " is a vertical ray";
    throw Error(ErrorCode::DegenerateVerticalRay, msg.str());
  }
  const SingleCrossingReport crossing = validate_single_crossing(s);
  if (!crossing.valid) {
    std::ostringstream msg;
    msg << "margin " << crossing.worst_margin << " at z=" << crossing.worst_depth;
    throw Error(ErrorCode::TurningPointInsidePath, msg.str());
  }
}

void require_dimensions(const NoiseModel& noise, const SamplingMatrix& F, Eigen::Index n) {
  if (F.entries.cols() != n || F.entries.rows() != noise.sample_depths.size() ||
      F.gram_inverse.rows() != n) {
    std::ostringstream msg;
    msg << "sampling matrix is " << F.entries.rows() << "x" << F.entries.cols() << ", expected "
        << noise.sample_depths.size() << "x" << n;
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

Eigen::Vector3d leading_gradient(const TofGradients& g) { return {g.dk0, g.dz_s, g.dz_d}; }

CrbTerms h_terms(const RayScenario& s, const NoiseModel& noise, double projection) {
  const double kc_s = s.k0 * s.profile(s.z_s);
  const double kc_d = s.k0 * s.profile(s.z_d);
  CrbTerms t;
  t.tof = noise.sigma_t_sq / (s.k0 * s.k0);
  t.depth_s = noise.sigma_z_sq * (1.0 - kc_s * kc_s) / (kc_s * kc_s);
  t.depth_d = noise.sigma_z_sq * (1.0 - kc_d * kc_d) / (kc_d * kc_d);
  t.ssp = noise.sigma_c_sq * projection;
  return t;
}

CrbTerms d_terms(const RayScenario& s, const NoiseModel& noise, const RayAngles& a,
                 double projection) {
  const double c_s = s.profile(s.z_s);
  const double cos0 = std::cos(a.theta_0);
  const double ratio = cos0 / std::cos(a.theta_s);
  const double lean_s = std::sin(a.theta_0 - a.theta_s) / std::cos(a.theta_s);
  const double lean_d = std::sin(a.theta_0 - a.theta_d) / std::cos(a.theta_d);
  CrbTerms t;
  t.tof = noise.sigma_t_sq * c_s * c_s * ratio * ratio;
  t.depth_s = noise.sigma_z_sq * lean_s * lean_s;
  t.depth_d = noise.sigma_z_sq * lean_d * lean_d;
  t.ssp = noise.sigma_c_sq * cos0 * cos0 * projection;
  return t;
}

double transform_range_bound(const RayScenario& s, const Eigen::MatrixXd& transformed, double h) {
  const double D = std::hypot(h, s.z_s - s.z_d);
  const Eigen::Vector3d grad(h / D, (s.z_s - s.z_d) / D, (s.z_d - s.z_s) / D);
  return grad.dot(transformed.topLeftCorner<3, 3>() * grad);
}

}  // namespace

double CrbReport::cross_check_delta() const {
  return std::abs(crb_d_transform - crb_d_total) / crb_d_total;
}

FisherBlocks fisher_blocks(const TofGradients& grad, const NoiseModel& noise,
                           const SamplingMatrix& F) {
  const Eigen::Index n = grad.da.size();
  require_dimensions(noise, F, n);
  const double wt = 1.0 / noise.sigma_t_sq;
  const double wz = 1.0 / noise.sigma_z_sq;
  const double wc = 1.0 / noise.sigma_c_sq;
  const Eigen::Vector3d g3 = leading_gradient(grad);
  FisherBlocks b;
  b.A = wt * g3 * g3.transpose();
  b.A(1, 1) += wz;
  b.A(2, 2) += wz;
  b.B = wt * g3 * grad.da.transpose();
  b.D = wt * grad.da * grad.da.transpose() + wc * F.gram;
  b.A = 0.5 * (b.A + b.A.transpose()).eval();
  b.D = 0.5 * (b.D + b.D.transpose()).eval();
  return b;
}

FisherBlocks fisher_blocks(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                           const numerics::QuadratureSpec& quad) {
  return fisher_blocks(tof_gradients(s, quad), noise, F);
}

Eigen::MatrixXd assemble_fim(const FisherBlocks& blocks) {
  const Eigen::Index n = blocks.D.rows();
  if (blocks.D.cols() != n || blocks.B.rows() != 3 || blocks.B.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent Fisher block sizes");
  }
  Eigen::MatrixXd fim(n + 3, n + 3);
  fim.topLeftCorner<3, 3>() = blocks.A;
  fim.topRightCorner(3, n) = blocks.B;
  fim.bottomLeftCorner(n, 3) = blocks.B.transpose();
  fim.bottomRightCorner(n, n) = blocks.D;
  return fim;
}

namespace {

// The transform route expands a quadratic form whose terms exceed the result
// by the square of |dt/da| / |dh/da - (dt/da)/k0|, about 1e9 on grazing rays,
// so the inverse and the product are carried in long double.
using WideMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using WideVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

template <typename T>
Eigen::Matrix<T, 3, 3> a_block_inverse_as(const TofGradients& grad, const NoiseModel& noise) {
  if (grad.dk0 == 0.0) {
    throw Error(ErrorCode::DegenerateVerticalRay, "dt/dk0 vanishes; A is singular");
  }
  const T dk = grad.dk0;
  const T sz = noise.sigma_z_sq;
  const T zs = grad.dz_s;
  const T zd = grad.dz_d;
  Eigen::Matrix<T, 3, 3> inv = Eigen::Matrix<T, 3, 3>::Zero();
  inv(0, 0) = (T(noise.sigma_t_sq) + sz * zs * zs + sz * zd * zd) / (dk * dk);
  inv(0, 1) = inv(1, 0) = -sz * zs / dk;
  inv(0, 2) = inv(2, 0) = -sz * zd / dk;
  inv(1, 1) = sz;
  inv(2, 2) = sz;
  return inv;
}

WideMatrix wide_closed_form_inverse(const TofGradients& grad, const NoiseModel& noise,
                                    const SamplingMatrix& F) {
  const Eigen::Index n = grad.da.size();
  require_dimensions(noise, F, n);
  if (grad.dk0 == 0.0) {
    throw Error(ErrorCode::DegenerateVerticalRay, "dt/dk0 vanishes for a vertical ray");
  }
  if (n > 0 && F.gram_inverse.size() == 0) {
    throw Error(ErrorCode::SingularGram, "missing (F^T F)^-1");
  }
  const long double dk = grad.dk0;
  const long double sc = noise.sigma_c_sq;
  WideMatrix inv = WideMatrix::Zero(n + 3, n + 3);
  inv.topLeftCorner<3, 3>() = a_block_inverse_as<long double>(grad, noise);
  if (n > 0) {
    const WideMatrix G = F.gram_inverse.cast<long double>();
    const WideVector Gda = G * grad.da.cast<long double>();
    inv(0, 0) += sc * grad.da.cast<long double>().dot(Gda) / (dk * dk);
    const WideVector coupling = -sc / dk * Gda;
    inv.block(0, 3, 1, n) = coupling.transpose();
    inv.block(3, 0, n, 1) = coupling;
    inv.bottomRightCorner(n, n) = sc * G;
  }
  return inv;
}

WideMatrix wide_jacobian(const HdistGradients& grad) {
  const Eigen::Index n = grad.da.size();
  WideMatrix H = WideMatrix::Identity(n + 3, n + 3);
  H(0, 0) = grad.dk0;
  H(1, 0) = grad.dz_s;
  H(2, 0) = grad.dz_d;
  H.block(3, 0, n, 1) = grad.da.cast<long double>();
  return H;
}

}  // namespace

Eigen::Matrix3d a_block_inverse(const TofGradients& grad, const NoiseModel& noise) {
  return a_block_inverse_as<double>(grad, noise);
}

double woodbury_k0_correction(const TofGradients& grad, const NoiseModel& noise,
                              const SamplingMatrix& F) {
  require_dimensions(noise, F, grad.da.size());
  if (grad.da.size() == 0) return 0.0;
  return noise.sigma_c_sq * grad.da.dot(F.gram_inverse * grad.da) / (grad.dk0 * grad.dk0);
}

Eigen::MatrixXd invert_fim_closed_form(const TofGradients& grad, const NoiseModel& noise,
                                       const SamplingMatrix& F) {
  return wide_closed_form_inverse(grad, noise, F).cast<double>();
}

Eigen::MatrixXd jacobian_h_matrix(const HdistGradients& grad) {
  const Eigen::Index n = grad.da.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n + 3, n + 3);
  H(0, 0) = grad.dk0;
  H(1, 0) = grad.dz_s;
  H(2, 0) = grad.dz_d;
  H.block(3, 0, n, 1) = grad.da;
  return H;
}

Eigen::MatrixXd jacobian_h_matrix(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  if (!(s.k0 >= kMinK0)) {
    throw Error(ErrorCode::DegenerateVerticalRay, "Jacobian of h requires k0 > 0");
  }
  return jacobian_h_matrix(hdist_gradients(s, quad));
}

Eigen::MatrixXd transform_inverse(const Eigen::MatrixXd& fim_inverse, const Eigen::MatrixXd& H) {
  if (fim_inverse.rows() != H.rows() || fim_inverse.cols() != H.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "Jacobian and inverse FIM sizes differ");
  }
  return H.transpose() * fim_inverse * H;
}

FisherWorkspace fisher_workspace(const RayScenario& s, const NoiseModel& noise,
                                 const SamplingMatrix& F, const numerics::QuadratureSpec& quad) {
  require_bound_scenario(s);
  const RayDerivatives d = ray_derivatives(s, quad);
  FisherWorkspace w;
  w.blocks = fisher_blocks(d.tof, noise, F);
  w.fim = assemble_fim(w.blocks);
  const WideMatrix inverse = wide_closed_form_inverse(d.tof, noise, F);
  const WideMatrix H = wide_jacobian(d.hdist);
  w.fim_inverse = inverse.cast<double>();
  w.jacobian = H.cast<double>();
  w.transformed = (H.transpose() * inverse * H).cast<double>();
  return w;
}

double g_eval(const RayScenario& s, double z) {
  if (!(s.k0 >= kMinK0)) throw Error(ErrorCode::DegenerateVerticalRay, "g(z) requires k0 > 0");
  const double c = s.profile(z);
  const double kc = s.k0 * c;
  const double w = 1.0 - kc * kc;
  if (!(w > 0.0)) {
    std::ostringstream msg;
    msg << "1 - (k0 c)^2 = " << w << " at z=" << z;
    throw Error(ErrorCode::TurningPointInsidePath, msg.str());
  }
  return 1.0 / (s.k0 * c * c * std::sqrt(w));
}

ProjectionDiagnostics projection_diagnostics(const RayScenario& s, const SamplingMatrix& F,
                                             const NoiseModel& noise,
                                             const numerics::QuadratureSpec& quad) {
  require_bound_scenario(s);
  const std::size_t n = s.profile.basis_size();
  require_dimensions(noise, F, static_cast<Eigen::Index>(n));
  const double lo = std::min(s.z_s, s.z_d);
  const double hi = std::max(s.z_s, s.z_d);

  std::vector<double> f(n);
  const Eigen::VectorXd v = numerics::integrate_vector(
      [&](double z, std::span<double> out) {
        const double c = s.profile.eval_with_basis(z, f);
        const double kc = s.k0 * c;
        const double w = 1.0 - kc * kc;
        const double g = 1.0 / (s.k0 * c * c * std::sqrt(w));
        out[0] = g * g;
        for (std::size_t i = 0; i < n; ++i) out[1 + i] = g * f[i];
      },
      n + 1, lo, hi, quad);

  ProjectionDiagnostics p;
  p.energy = v[0];
  p.inner_products = v.tail(static_cast<Eigen::Index>(n));
  p.value = n > 0 ? p.inner_products.dot(F.gram_inverse * p.inner_products) : 0.0;
  const Eigen::Index m = noise.sample_depths.size();
  p.delta_z = m > 0 ? (hi - lo) / static_cast<double>(m) : 0.0;
  p.upper_bound = p.delta_z * p.energy;
  p.samples_in_interval = m > 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double z = noise.sample_depths[i];
    if (z < lo || z > hi) p.samples_in_interval = false;
  }

  p.riemann_approx = std::numeric_limits<double>::quiet_NaN();
  if (n > 0 && m > 0) {
    Eigen::VectorXd g(m);
    bool defined = true;
    for (Eigen::Index i = 0; i < m && defined; ++i) {
      const double kc = s.k0 * s.profile(noise.sample_depths[i]);
      if (kc >= 1.0) {
        defined = false;
      } else {
        g[i] = g_eval(s, noise.sample_depths[i]);
      }
    }
    if (defined) {
      const Eigen::VectorXd Ftg = F.entries.transpose() * g * p.delta_z;
      p.riemann_approx = Ftg.dot(F.gram_inverse * Ftg);
    }
  } else if (n == 0) {
    p.riemann_approx = 0.0;
  }
  return p;
}

CrbTerms crb_h_breakdown(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                         const numerics::QuadratureSpec& quad) {
  const ProjectionDiagnostics p = projection_diagnostics(s, F, noise, quad);
  return h_terms(s, noise, p.value);
}

CrbTerms crb_d_breakdown(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                         const numerics::QuadratureSpec& quad) {
  const ProjectionDiagnostics p = projection_diagnostics(s, F, noise, quad);
  return d_terms(s, noise, ray_angles(s, quad), p.value);
}

double crb_d_transform(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                       const numerics::QuadratureSpec& quad) {
  const FisherWorkspace w = fisher_workspace(s, noise, F, quad);
  return transform_range_bound(s, w.transformed, horizontal_distance(s, quad));
}

CrbReport crb_report(const RayScenario& s, const NoiseModel& noise, const SamplingMatrix& F,
                     const numerics::QuadratureSpec& quad) {
  const FisherWorkspace w = fisher_workspace(s, noise, F, quad);
  CrbReport r;
  r.k0 = s.k0;
  r.geometry = ray_geometry(s, quad);
  r.projection = projection_diagnostics(s, F, noise, quad);
  r.crb_h = h_terms(s, noise, r.projection.value);
  const RayAngles angles{r.geometry.theta_s, r.geometry.theta_d, r.geometry.theta_0};
  r.crb_d = d_terms(s, noise, angles, r.projection.value);
  r.crb_h_total = r.crb_h.total();
  r.crb_d_total = r.crb_d.total();
  r.crb_h_transform = w.transformed(0, 0);
  r.crb_d_transform = transform_range_bound(s, w.transformed, r.geometry.h);
  r.valid = true;
  return r;
}

}  // namespace uwcrb
