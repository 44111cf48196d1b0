#include "uwcrb/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "uwcrb/error.hpp"

namespace uwcrb::numerics {
namespace {

constexpr int kOrder = 15;

struct GaussLegendreRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

// Newton iteration on P_n from the Chebyshev initial guesses.
GaussLegendreRule make_rule() {
  GaussLegendreRule rule;
  constexpr int n = kOrder;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussLegendreRule& rule() {
  static const GaussLegendreRule r = make_rule();
  return r;
}

void apply_rule(const VectorIntegrand& f, std::size_t dim, double a, double b,
                std::span<double> scratch, std::span<double> out, std::span<double> out_abs) {
  const auto& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::fill(out.begin(), out.end(), 0.0);
  std::fill(out_abs.begin(), out_abs.end(), 0.0);
  for (int i = 0; i < kOrder; ++i) {
    const double z = mid + half * r.nodes[i];
    f(z, scratch);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!std::isfinite(scratch[k])) {
        std::ostringstream msg;
        msg << "integrand component " << k << " is " << scratch[k] << " at z=" << z;
        throw Error(ErrorCode::NonFiniteIntegrand, msg.str());
      }
      out[k] += r.weights[i] * scratch[k];
      out_abs[k] += r.weights[i] * std::abs(scratch[k]);
    }
  }
  for (auto& v : out) v *= half;
  for (auto& v : out_abs) v *= half;
}

struct Panel {
  double a;
  double b;
  std::size_t slot;  // offset into the value pools
  double priority;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const { return x.priority < y.priority; }
};

Eigen::VectorXd integrate_oriented(const VectorIntegrand& f, std::size_t dim, double lo,
                                   double hi, const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1) {
    throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must be positive");
  }
  Eigen::VectorXd result = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  if (lo == hi || dim == 0) return result;

  std::vector<double> scratch(dim);
  // Per panel: coarse value, fine value (sum of halves), both halves, and
  // the integral of |f| over the panel.
  std::vector<double> coarse, fine, left, right, magnitude;
  std::vector<double> discard(dim), left_abs(dim), right_abs(dim);

  auto evaluate_panel = [&](double a, double b, std::span<const double> known_coarse) {
    const std::size_t slot = coarse.size();
    coarse.resize(slot + dim);
    fine.resize(slot + dim);
    left.resize(slot + dim);
    right.resize(slot + dim);
    magnitude.resize(slot + dim);
    const double m = 0.5 * (a + b);
    if (known_coarse.empty()) {
      apply_rule(f, dim, a, b, scratch, std::span(coarse).subspan(slot, dim), discard);
    } else {
      std::copy(known_coarse.begin(), known_coarse.end(), coarse.begin() + slot);
    }
    apply_rule(f, dim, a, m, scratch, std::span(left).subspan(slot, dim), left_abs);
    apply_rule(f, dim, m, b, scratch, std::span(right).subspan(slot, dim), right_abs);
    for (std::size_t k = 0; k < dim; ++k) {
      fine[slot + k] = left[slot + k] + right[slot + k];
      magnitude[slot + k] = left_abs[k] + right_abs[k];
    }
    return slot;
  };

  const std::size_t root = evaluate_panel(lo, hi, {});
  std::vector<double> scale(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    scale[k] = std::max(spec.rel_tol * std::abs(fine[root + k]), spec.abs_tol);
  }
  auto priority_of = [&](std::size_t slot) {
    double p = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      p = std::max(p, std::abs(fine[slot + k] - coarse[slot + k]) / scale[k]);
    }
    return p;
  };

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
  std::vector<Panel> retired;
  queue.push({lo, hi, root, priority_of(root)});

  std::vector<double> total(fine.begin() + root, fine.begin() + root + dim);
  std::vector<double> total_abs(magnitude.begin() + root, magnitude.begin() + root + dim);
  std::vector<double> error(dim);
  for (std::size_t k = 0; k < dim; ++k) error[k] = std::abs(fine[root + k] - coarse[root + k]);

  // Below about 50 eps times the integral of |f| the error estimate is
  // rounding noise, so cancelling integrands cannot be pushed further.
  constexpr double kRoundingFloor = 50.0 * std::numeric_limits<double>::epsilon();
  auto converged = [&] {
    for (std::size_t k = 0; k < dim; ++k) {
      const double tol = std::max({spec.abs_tol, spec.rel_tol * std::abs(total[k]),
                                   kRoundingFloor * total_abs[k]});
      if (error[k] > tol) return false;
    }
    return true;
  };

  std::size_t subdivisions = 0;
  while (!converged()) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "no convergence on [" << lo << ", " << hi << "] after " << subdivisions
          << " subdivisions";
      throw Error(ErrorCode::ToleranceNotMet, msg.str());
    }
    const Panel worst = queue.top();
    queue.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      // Panel can no longer be split in floating point.
      retired.push_back(worst);
      if (queue.empty()) {
        throw Error(ErrorCode::ToleranceNotMet, "panel width reached machine resolution");
      }
      continue;
    }
    const std::vector<double> lhs(left.begin() + worst.slot, left.begin() + worst.slot + dim);
    const std::vector<double> rhs(right.begin() + worst.slot, right.begin() + worst.slot + dim);
    const std::size_t sl = evaluate_panel(worst.a, m, lhs);
    const std::size_t sr = evaluate_panel(m, worst.b, rhs);
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] += fine[sl + k] + fine[sr + k] - fine[worst.slot + k];
      total_abs[k] += magnitude[sl + k] + magnitude[sr + k] - magnitude[worst.slot + k];
      error[k] += std::abs(fine[sl + k] - coarse[sl + k]) + std::abs(fine[sr + k] - coarse[sr + k]) -
                  std::abs(fine[worst.slot + k] - coarse[worst.slot + k]);
    }
    queue.push({worst.a, m, sl, priority_of(sl)});
    queue.push({m, worst.b, sr, priority_of(sr)});
    ++subdivisions;
  }

  // Re-sum the leaves left to right so the result does not depend on the
  // order in which panels were refined.
  while (!queue.empty()) {
    retired.push_back(queue.top());
    queue.pop();
  }
  std::sort(retired.begin(), retired.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : retired) {
    for (std::size_t k = 0; k < dim; ++k) result[static_cast<Eigen::Index>(k)] += fine[p.slot + k];
  }
  return result;
}

}  // namespace

Eigen::VectorXd integrate_vector(const VectorIntegrand& f, std::size_t dim, double lo,
                                 double hi, const QuadratureSpec& spec) {
  if (lo > hi) return -integrate_oriented(f, dim, hi, lo, spec);
  return integrate_oriented(f, dim, lo, hi, spec);
}

double integrate(const ScalarFunction& f, double lo, double hi, const QuadratureSpec& spec) {
  const VectorIntegrand wrapped = [&f](double z, std::span<double> out) { out[0] = f(z); };
  return integrate_vector(wrapped, 1, lo, hi, spec)[0];
}

double find_root_monotonic(const ScalarFunction& f, const RootSpec& spec) {
  if (!(spec.bracket_lo < spec.bracket_hi)) {
    throw Error(ErrorCode::InvalidArgument, "root bracket must satisfy lo < hi");
  }
  double a = spec.bracket_lo;
  double b = spec.bracket_hi;
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw Error(ErrorCode::NonFiniteValue, "function not finite at bracket endpoints");
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "f(" << a << ")=" << fa << ", f(" << b << ")=" << fb;
    throw Error(ErrorCode::NoSignChange, msg.str());
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < spec.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * (spec.x_tol * std::abs(b) + spec.abs_tol);
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      // Secant or inverse quadratic interpolation.
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if (!std::isfinite(fb)) {
      throw Error(ErrorCode::NonFiniteValue, "function not finite inside bracket");
    }
  }
  throw Error(ErrorCode::MaxIterations, "Brent iteration limit reached");
}

Eigen::VectorXd finite_difference_gradient(const MultivariateFunction& f,
                                           const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& steps) {
  if (steps.size() != x0.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one step per coordinate required");
  }
  Eigen::VectorXd grad(x0.size());
  Eigen::VectorXd x = x0;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    const double h = steps[i];
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be > 0");
    x[i] = x0[i] + h;
    const double fp = f(x);
    x[i] = x0[i] - h;
    const double fm = f(x);
    x[i] = x0[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw Error(ErrorCode::NonFiniteValue, "function not finite near x0");
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

Eigen::VectorXd finite_difference_gradient(const MultivariateFunction& f,
                                           const Eigen::VectorXd& x0, double step) {
  return finite_difference_gradient(f, x0, Eigen::VectorXd::Constant(x0.size(), step));
}

Eigen::VectorXd default_fd_steps(const Eigen::VectorXd& x0) {
  return x0.cwiseAbs().cwiseMax(1.0) * 1e-6;
}

double symmetric_condition_number(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

SpdInverse spd_inverse(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
  SpdInverse out;
  out.condition_number = symmetric_condition_number(m);
  if (m.size() == 0) return out;

  const Eigen::VectorXd diag = m.diagonal();
  if ((diag.array() <= 0.0).any()) {
    std::ostringstream msg;
    msg << "non-positive diagonal; condition number " << out.condition_number;
    throw Error(ErrorCode::NotPositiveDefinite, msg.str());
  }
  const Eigen::VectorXd s = diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = s.asDiagonal() * m * s.asDiagonal();
  const Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "Cholesky failed; condition number " << out.condition_number;
    throw Error(ErrorCode::NotPositiveDefinite, msg.str());
  }
  const Eigen::MatrixXd scaled_inv =
      llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  out.inverse = s.asDiagonal() * scaled_inv * s.asDiagonal();

  // One step of iterative refinement with the residual I - m X formed in
  // extended precision.
  using MatrixLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixLd residual = MatrixLd::Identity(m.rows(), m.cols()) -
                            m.cast<long double>() * out.inverse.cast<long double>();
  out.inverse += (out.inverse.cast<long double>() * residual).cast<double>();
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  return out;
}

}  // namespace uwcrb::numerics
