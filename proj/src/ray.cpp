#include "uwcrb/ray.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "uwcrb/error.hpp"

namespace uwcrb {
namespace {

struct Path {
  double lo;
  double hi;
  double orientation;  // +1 when z_d > z_s
};

Path path_of(const SoundSpeedProfile& profile, double z_s, double z_d) {
  if (!profile.domain().contains(z_s) || !profile.domain().contains(z_d)) {
    std::ostringstream msg;
    msg << "endpoint depths (" << z_s << ", " << z_d << ") outside the profile domain";
    throw Error(ErrorCode::OutOfDomain, msg.str());
  }
  if (z_s == z_d) {
    throw Error(ErrorCode::InvalidArgument, "source and destination depths coincide");
  }
  return {std::min(z_s, z_d), std::max(z_s, z_d), z_d > z_s ? 1.0 : -1.0};
}

[[noreturn]] void throw_turning(double z, double w) {
  std::ostringstream msg;
  msg << "1 - (k0 c)^2 = " << w << " at z=" << z;
  throw Error(ErrorCode::TurningPointInsidePath, msg.str());
}

double margin_at(const RayScenario& s, double z) {
  const double kc = s.k0 * s.profile(z);
  return 1.0 - kc * kc;
}

void require_feasible(const RayScenario& s) {
  if (!(s.k0 >= 0.0) || !std::isfinite(s.k0)) {
    throw Error(ErrorCode::InvalidArgument, "k0 must be finite and non-negative");
  }
  const Path p = path_of(s.profile, s.z_s, s.z_d);
  const PathMaximum top = max_speed_on_path(s.profile, p.lo, p.hi);
  const double kc = s.k0 * top.speed;
  const double w = 1.0 - kc * kc;
  if (w < kFeasibilityMargin) throw_turning(top.depth, w);
}

// Integrand 1 / (c sqrt(1 - (k0 c)^2)) and k0 c / sqrt(...) without checks.
double raw_tof(const RayScenario& s, const Path& p, const numerics::QuadratureSpec& quad) {
  return numerics::integrate(
      [&](double z) {
        const double c = s.profile(z);
        const double w = 1.0 - s.k0 * s.k0 * c * c;
        if (!(w > 0.0)) throw_turning(z, w);
        return 1.0 / (c * std::sqrt(w));
      },
      p.lo, p.hi, quad);
}

double raw_hdist(const RayScenario& s, const Path& p, const numerics::QuadratureSpec& quad) {
  if (s.k0 == 0.0) return 0.0;
  return numerics::integrate(
      [&](double z) {
        const double c = s.profile(z);
        const double kc = s.k0 * c;
        const double w = 1.0 - kc * kc;
        if (!(w > 0.0)) throw_turning(z, w);
        return kc / std::sqrt(w);
      },
      p.lo, p.hi, quad);
}

struct PathDerivatives {
  double t_k0;
  double h_k0;
  Eigen::VectorXd t_a;
  Eigen::VectorXd h_a;
};

// Components: [dt/dk0, dh/dk0, dt/da_1..N, dh/da_1..N].
PathDerivatives path_derivatives(const RayScenario& s, const Path& p,
                                 const numerics::QuadratureSpec& quad) {
  const std::size_t n = s.profile.basis_size();
  std::vector<double> f(n);
  const double k = s.k0;
  const Eigen::VectorXd v = numerics::integrate_vector(
      [&](double z, std::span<double> out) {
        const double c = s.profile.eval_with_basis(z, f);
        const double kc2 = k * k * c * c;
        const double w = 1.0 - kc2;
        if (!(w > 0.0)) throw_turning(z, w);
        const double w32 = w * std::sqrt(w);
        out[0] = k * c / w32;
        out[1] = c / w32;
        const double t_weight = (2.0 * kc2 - 1.0) / (c * c * w32);
        const double h_weight = k / w32;
        for (std::size_t i = 0; i < n; ++i) {
          out[2 + i] = t_weight * f[i];
          out[2 + n + i] = h_weight * f[i];
        }
      },
      2 + 2 * n, p.lo, p.hi, quad);
  const auto ni = static_cast<Eigen::Index>(n);
  return {v[0], v[1], v.segment(2, ni), v.segment(2 + ni, ni)};
}

}  // namespace

PathMaximum max_speed_on_path(const SoundSpeedProfile& profile, double z_a, double z_b) {
  const double lo = std::min(z_a, z_b);
  const double hi = std::max(z_a, z_b);
  PathMaximum best{profile(lo), lo};
  int best_index = 0;
  const double step = (hi - lo) / kCrossingGrid;
  for (int i = 1; i <= kCrossingGrid; ++i) {
    const double z = (i == kCrossingGrid) ? hi : lo + step * i;
    const double c = profile(z);
    if (c > best.speed) {
      best = {c, z};
      best_index = i;
    }
  }
  if (best_index == 0 || best_index == kCrossingGrid || step == 0.0) return best;

  // Golden-section search on the two cells around the best grid sample.
  double a = lo + step * (best_index - 1);
  double b = lo + step * (best_index + 1);
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = profile(x1);
  double f2 = profile(x2);
  for (int iter = 0; iter < 80 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++iter) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = profile(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = profile(x2);
    }
  }
  if (f1 > best.speed) best = {f1, x1};
  if (f2 > best.speed) best = {f2, x2};
  return best;
}

double k0_upper_bound(const SoundSpeedProfile& profile, double z_s, double z_d) {
  const Path p = path_of(profile, z_s, z_d);
  return (1.0 - 10.0 * kFeasibilityMargin) / max_speed_on_path(profile, p.lo, p.hi).speed;
}

double tof(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  require_feasible(s);
  return raw_tof(s, path_of(s.profile, s.z_s, s.z_d), quad);
}

double horizontal_distance(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  require_feasible(s);
  return raw_hdist(s, path_of(s.profile, s.z_s, s.z_d), quad);
}

RayGeometry ray_geometry(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  require_feasible(s);
  const Path p = path_of(s.profile, s.z_s, s.z_d);
  RayGeometry g;
  g.t = raw_tof(s, p, quad);
  g.h = raw_hdist(s, p, quad);
  g.D = std::hypot(g.h, s.z_s - s.z_d);
  const RayAngles angles = ray_angles(s, g.h);
  g.theta_s = angles.theta_s;
  g.theta_d = angles.theta_d;
  g.theta_0 = angles.theta_0;
  return g;
}

namespace {

const numerics::QuadratureSpec kLooseQuadrature{1e-10, 1e-8, std::size_t{1} << 16};

// Shared monotone inversion of t(k0) or h(k0) on [0, k0_upper_bound].
template <class Forward>
double solve_monotone(const SoundSpeedProfile& profile, double z_s, double z_d, double target,
                      double at_zero, Forward forward, const numerics::QuadratureSpec& quad,
                      const char* what) {
  const double k_hi = k0_upper_bound(profile, z_s, z_d);
  const double resolution = 1e-12 * std::max(std::abs(at_zero), std::abs(target));
  if (target < at_zero - resolution) {
    std::ostringstream msg;
    msg << what << " target " << target << " below its vertical-ray value " << at_zero;
    throw Error(ErrorCode::TargetBelowMinimum, msg.str());
  }
  if (target <= at_zero + resolution) return 0.0;
  // At k_hi the integrand has a near-singular peak where c is largest; a
  // loose rule suffices because only the sign of target - at_top matters
  // unless the target sits right at the supremum.
  const double at_top = forward(k_hi, kLooseQuadrature);
  if (target > at_top) {
    std::ostringstream msg;
    msg << what << " target " << target << " exceeds the single-crossing supremum " << at_top;
    throw Error(ErrorCode::TargetUnreachable, msg.str());
  }
  numerics::RootSpec spec;
  spec.bracket_lo = 0.0;
  spec.bracket_hi = k_hi;
  spec.abs_tol = 1e-17 * k_hi;
  return numerics::find_root_monotonic(
      [&](double k) { return (k == k_hi ? at_top : forward(k, quad)) - target; }, spec);
}

}  // namespace

double solve_k0_from_tof(const SoundSpeedProfile& profile, double z_s, double z_d,
                         double t_target, const numerics::QuadratureSpec& quad) {
  const Path p = path_of(profile, z_s, z_d);
  RayScenario s{profile, z_s, z_d, 0.0};
  auto forward = [&](double k, const numerics::QuadratureSpec& q) {
    s.k0 = k;
    return raw_tof(s, p, q);
  };
  const double vertical = forward(0.0, quad);
  return solve_monotone(profile, z_s, z_d, t_target, vertical, forward, quad, "time of flight");
}

double solve_k0_from_h(const SoundSpeedProfile& profile, double z_s, double z_d,
                       double h_target, const numerics::QuadratureSpec& quad) {
  const Path p = path_of(profile, z_s, z_d);
  RayScenario s{profile, z_s, z_d, 0.0};
  auto forward = [&](double k, const numerics::QuadratureSpec& q) {
    s.k0 = k;
    return raw_hdist(s, p, q);
  };
  return solve_monotone(profile, z_s, z_d, h_target, 0.0, forward, quad, "horizontal distance");
}

SingleCrossingReport validate_single_crossing(const RayScenario& s) {
  SingleCrossingReport report;
  const double lo = std::min(s.z_s, s.z_d);
  const double hi = std::max(s.z_s, s.z_d);
  if (!s.profile.domain().contains(lo) || !s.profile.domain().contains(hi) ||
      !(s.k0 >= 0.0) || !std::isfinite(s.k0)) {
    report.valid = false;
    report.worst_margin = -1.0;
    report.worst_depth = lo;
    return report;
  }
  const PathMaximum top = max_speed_on_path(s.profile, lo, hi);
  const double kc = s.k0 * top.speed;
  report.worst_margin = 1.0 - kc * kc;
  report.worst_depth = top.depth;
  report.valid = report.worst_margin >= kFeasibilityMargin && lo != hi;
  return report;
}

RayAngles ray_angles(const RayScenario& s, double h) {
  auto angle_at = [&](double z) {
    const double kc = s.k0 * s.profile(z);
    if (kc >= 1.0) throw_turning(z, 1.0 - kc * kc);
    return std::acos(kc);
  };
  RayAngles a;
  a.theta_s = angle_at(s.z_s);
  a.theta_d = angle_at(s.z_d);
  a.theta_0 = std::atan2(std::abs(s.z_d - s.z_s), h);
  return a;
}

RayAngles ray_angles(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  return ray_angles(s, horizontal_distance(s, quad));
}

RayDerivatives ray_derivatives(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  require_feasible(s);
  const Path p = path_of(s.profile, s.z_s, s.z_d);
  const PathDerivatives d = path_derivatives(s, p, quad);
  auto endpoint = [&](double z) {
    const double c = s.profile(z);
    const double root_w = std::sqrt(margin_at(s, z));
    return std::pair{1.0 / (c * root_w), s.k0 * c / root_w};
  };
  const auto [slow_s, lateral_s] = endpoint(s.z_s);
  const auto [slow_d, lateral_d] = endpoint(s.z_d);
  RayDerivatives r;
  r.tof = {d.t_k0, -p.orientation * slow_s, p.orientation * slow_d, d.t_a};
  r.hdist = {d.h_k0, -p.orientation * lateral_s, p.orientation * lateral_d, d.h_a};
  return r;
}

TofGradients tof_gradients(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  return ray_derivatives(s, quad).tof;
}

HdistGradients hdist_gradients(const RayScenario& s, const numerics::QuadratureSpec& quad) {
  return ray_derivatives(s, quad).hdist;
}

}  // namespace uwcrb
