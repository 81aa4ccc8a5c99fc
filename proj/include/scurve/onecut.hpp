#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "scurve/algebra.hpp"
#include "scurve/curve.hpp"
#include "scurve/error.hpp"
#include "scurve/polynomial.hpp"

namespace scurve {

struct OneCutSolution {
  cplx beta;
  cplx delta2;
  cplx a;
  cplx b;
  std::optional<int> branch_k;
  double residual = 0.0;
  /// Set when two cubic branches coincide within 1e-10 (t at a branch point).
  bool branch_collision = false;

  cplx delta() const { return 0.5 * (b - a); }
  std::vector<cplx> endpoints() const { return {a, b}; }
};

/// delta = sqrt(delta2) with Im delta >= 0 (Re delta >= 0 when real).
inline cplx canonical_delta(cplx delta2) {
  cplx d = std::sqrt(delta2);
  if (d.imag() < 0.0 || (d.imag() == 0.0 && d.real() < 0.0)) d = -d;
  return d;
}

inline OneCutSolution make_onecut(cplx beta, cplx delta2, std::optional<int> k = std::nullopt) {
  const cplx d = canonical_delta(delta2);
  OneCutSolution s;
  s.beta = beta;
  s.delta2 = delta2;
  s.a = beta - d;
  s.b = beta + d;
  s.branch_k = k;
  return s;
}

/// The three finite branch points t^(k) = 3 2^(-2/3) e^(2 pi i k / 3).
inline cplx cubic_branch_point(int k) { return std::polar(3.0 * std::pow(2.0, -2.0 / 3.0), 2.0 * pi * k / 3.0); }

/// beta_k(t) = -t / (3 D_k) - D_k, D_k = e^(2 pi i k/3) cbrt(1/2 + sqrt(1/4 - t^3/27)),
/// principal roots. On the negative real axis of 1/4 - t^3/27 the square root
/// takes its value from Im > 0, i.e. t approached from below the ray.
inline cplx cubic_beta(cplx t, int k) {
  if (k < 0 || k > 2) fail(ErrorCode::InvalidArgument, "branch index must be 0, 1 or 2");
  cplx X = 0.25 - t * t * t / 27.0;
  if (X.real() < 0.0 && std::abs(X.imag()) <= 1e-14 * std::abs(X)) X = cplx(X.real(), 0.0);
  const cplx root = std::sqrt(X);
  const cplx base = 0.5 + root;
  const cplx D = std::polar(1.0, 2.0 * pi * k / 3.0) * std::exp(std::log(base) / 3.0);
  return -t / (3.0 * D) - D;
}

/// One-cut solution of the cubic model on branch k: delta^2 = 2 / beta.
inline OneCutSolution solve_cubic_branch(cplx t, int k, bool strict = false) {
  const cplx beta = cubic_beta(t, k);
  OneCutSolution s = make_onecut(beta, 2.0 / beta, k);
  s.residual = std::abs(beta * beta * beta - t * beta + 1.0);
  const std::array<cplx, 3> all{cubic_beta(t, 0), cubic_beta(t, 1), cubic_beta(t, 2)};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(all[static_cast<std::size_t>(i)] - all[static_cast<std::size_t>(j)]) < 1e-10) s.branch_collision = true;
  // A double root is only resolved to sqrt(eps) by the radicals, so also
  // flag a discriminant that vanishes to rounding.
  const cplx X = 0.25 - t * t * t / 27.0;
  if (std::abs(X) <= 64.0 * std::numeric_limits<double>::epsilon() * (0.25 + std::norm(t) * std::abs(t) / 27.0))
    s.branch_collision = true;
  if (strict && s.branch_collision) fail(ErrorCode::BranchCollision, "two cubic branches coincide");
  return s;
}

namespace detail {

/// The two one-cut endpoint equations in the unknowns (beta, delta^2):
/// the z^N coefficient of y^2 - W'^2 vanishes and the z^(N-1) coefficient
/// equals -4 (N+1) t_{N+1}.
inline std::array<cplx, 2> onecut_equations(const Polynomial& W, cplx beta, cplx delta2) {
  const int N = W.degree() - 1;
  const Polynomial w2({beta * beta - delta2, -2.0 * beta, 1.0});
  const cplx d = std::sqrt(delta2);
  const BranchedRadical rad({beta - d, beta + d});
  const Polynomial Wp = W.derivative();
  const Polynomial h = oplus_part(Wp, rad);
  const Polynomial diff = h * h * w2 - Wp * Wp;
  const cplx lead = W.leading();
  return {diff.coeff(N), diff.coeff(N - 1) + 4.0 * (N + 1) * lead};
}

}  // namespace detail

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-12;
};

/// Newton solution of the one-cut endpoint equations for a general W.
inline OneCutSolution solve_onecut_general(const Polynomial& W, const OneCutSolution& initial,
                                           const NewtonOptions& opt = {}) {
  if (W.degree() < 2) fail(ErrorCode::InvalidArgument, "potential must have degree at least 2");
  cplx x0 = initial.beta, x1 = initial.delta2;
  double scale = 1.0;
  for (cplx c : W.coeffs()) scale = std::max(scale, std::abs(c));
  auto norm = [](const std::array<cplx, 2>& F) { return std::max(std::abs(F[0]), std::abs(F[1])); };
  std::array<cplx, 2> F = detail::onecut_equations(W, x0, x1);
  for (int it = 0; it < opt.max_iter; ++it) {
    if (norm(F) < opt.tol * scale) {
      OneCutSolution s = make_onecut(x0, x1, initial.branch_k);
      s.residual = norm(F);
      return s;
    }
    Eigen::Matrix2cd J;
    const double hstep = 1e-7 * (1.0 + std::abs(x0) + std::abs(x1));
    for (int c = 0; c < 2; ++c) {
      const cplx e0 = c == 0 ? hstep : 0.0, e1 = c == 1 ? hstep : 0.0;
      const auto Fp = detail::onecut_equations(W, x0 + e0, x1 + e1);
      const auto Fm = detail::onecut_equations(W, x0 - e0, x1 - e1);
      J(0, c) = (Fp[0] - Fm[0]) / (2.0 * hstep);
      J(1, c) = (Fp[1] - Fm[1]) / (2.0 * hstep);
    }
    Eigen::FullPivLU<Eigen::Matrix2cd> lu(J);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) fail(ErrorCode::SingularJacobian, "one-cut Jacobian is singular");
    const Eigen::Vector2cd dx = lu.solve(Eigen::Vector2cd(F[0], F[1]));
    double lambda = 1.0;
    for (int ls = 0; ls < 30; ++ls) {
      const cplx n0 = x0 - lambda * dx(0), n1 = x1 - lambda * dx(1);
      if (n1 != cplx{}) {
        const auto Fn = detail::onecut_equations(W, n0, n1);
        if (norm(Fn) < norm(F) || ls == 29) {
          x0 = n0;
          x1 = n1;
          F = Fn;
          break;
        }
      }
      lambda *= 0.5;
    }
  }
  if (norm(F) < opt.tol * scale) {
    OneCutSolution s = make_onecut(x0, x1, initial.branch_k);
    s.residual = norm(F);
    return s;
  }
  fail(ErrorCode::NoConvergence, "one-cut Newton did not converge");
}

inline SpectralCurve onecut_curve(const Polynomial& W, const OneCutSolution& sol) {
  return SpectralCurve::from_potential(W, sol.endpoints());
}

/// G(z) = (W/w)_+ w(z) - 2 Log((z - beta + w(z)) / (a - b)) - log 4, so G(a) = 0.
/// The logarithm is principal; only Re G is single valued.
inline cplx g_onecut(cplx z, const Polynomial& W, const OneCutSolution& sol) {
  const BranchedRadical rad(sol.endpoints());
  const cplx w = eval_w(rad, z);
  const Polynomial Wop = oplus_part(W, rad);
  return Wop(z) * w - 2.0 * std::log((z - sol.beta + w) / (sol.a - sol.b)) - std::log(4.0);
}

/// Closed form of G_k(-beta_k) with S = sqrt(4 beta^2 - delta^2) supplied by the caller.
inline cplx g_minus_beta_closed(cplx beta, cplx delta, cplx S) {
  return -(1.0 / 3.0) * S * (2.0 * beta * beta + delta * delta) - 2.0 * std::log((2.0 * beta - S) / delta);
}

/// G_k(-beta_k) with S taken as the chord-branch value w(-beta_k).
inline cplx g_cubic_at_minus_beta(cplx t, int k) {
  const OneCutSolution sol = solve_cubic_branch(t, k);
  const BranchedRadical rad(sol.endpoints());
  const cplx S = eval_w(rad, -sol.beta);
  return g_minus_beta_closed(sol.beta, sol.delta(), S);
}

}  // namespace scurve
