#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "scurve/abelian.hpp"
#include "scurve/curve.hpp"
#include "scurve/error.hpp"
#include "scurve/onecut.hpp"
#include "scurve/quadrature.hpp"

namespace scurve {

/// Two-cut endpoints of the cubic model: cuts a -> b and c -> d, gap b -> c.
struct TwoCutSolution {
  cplx a, b, c, d;
  double r = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;

  std::vector<cplx> endpoints() const { return {a, b, c, d}; }
  static TwoCutSolution from(const std::vector<cplx>& e) { return {e[0], e[1], e[2], e[3]}; }
};

inline SpectralCurve twocut_curve(const TwoCutSolution& sol) {
  return SpectralCurve(BranchedRadical(sol.endpoints()), Polynomial::constant(1.0));
}

struct CubicPeriods {
  std::array<cplx, 5> A;  // int_b^c z^n / y
  std::array<cplx, 5> B;  // int_a^b z^n / y_+
};

inline CubicPeriods cubic_periods_all(const TwoCutSolution& sol, const QuadOptions& opt = {}) {
  const BranchedRadical rad(sol.endpoints());
  const MomentVec g = gap_moments(rad, 0, opt);
  const MomentVec c = chord_moments(rad, 0, opt);
  CubicPeriods p;
  for (std::size_t n = 0; n < 5; ++n) {
    p.A[n] = g[n];
    p.B[n] = c[n];
  }
  return p;
}

/// (A_n, B_n) = (int_b^c z^n dz / y, int_a^b z^n dz / y_+) on straight segments.
inline std::pair<cplx, cplx> cubic_periods(const TwoCutSolution& sol, int n, const QuadOptions& opt = {}) {
  if (n < 0 || n > 4) fail(ErrorCode::InvalidArgument, "period index must be in 0..4");
  const CubicPeriods p = cubic_periods_all(sol, opt);
  return {p.A[static_cast<std::size_t>(n)], p.B[static_cast<std::size_t>(n)]};
}

inline double compute_r(const CubicPeriods& p, cplx t) {
  if (p.A[0] == cplx{}) fail(ErrorCode::DegeneratePeriodRatio, "A_0 vanishes");
  const cplx C = (-p.A[4] + 2.0 * t * p.A[2] + 4.0 * p.A[1]) / p.A[0];
  const double den = (p.B[0] / p.A[0]).imag();
  if (std::abs(den) < 1e-12) fail(ErrorCode::DegeneratePeriodRatio, "Im(B_0 / A_0) vanishes");
  return (p.B[4] - 2.0 * t * p.B[2] - 4.0 * p.B[1] + C * p.B[0]).real() / den;
}

/// r = Re(B4 - 2t B2 - 4 B1 + C B0) / Im(B0 / A0), C = (-A4 + 2t A2 + 4 A1) / A0.
inline double compute_r(const TwoCutSolution& sol, cplx t, const QuadOptions& opt = {}) {
  return compute_r(cubic_periods_all(sol, opt), t);
}

/// e3 - 4, e2 + 2t, e1 for the elementary symmetric functions of the endpoints.
inline std::array<cplx, 3> symmetric_residuals(cplx t, cplx a, cplx b, cplx c, cplx d) {
  const cplx e1 = a + b + c + d;
  const cplx e2 = a * b + a * c + a * d + b * c + b * d + c * d;
  const cplx e3 = a * b * c + a * b * d + a * c * d + b * c * d;
  return {e3 - 4.0, e2 + 2.0 * t, e1};
}

/// int_b^c y dz along the gap (y = w, chord branch).
inline cplx gap_integral_of_y(const TwoCutSolution& sol, const QuadOptions& opt = {}) {
  const BranchedRadical rad(sol.endpoints());
  return integrate_segment<cplx>(
      sol.b, sol.c, [&](const SegmentNode& n) { return w_on_segment(rad, 1, 2, sol.b, sol.c, n.s, n.one_minus_s); }, opt);
}

/// Real and imaginary parts of e3 - 4, e2 + 2t, e1 and int_b^c y dz - i r.
inline std::array<double, 8> residual(cplx t, const TwoCutSolution& sol, const QuadOptions& opt = {}) {
  const auto sym = symmetric_residuals(t, sol.a, sol.b, sol.c, sol.d);
  const double r = compute_r(sol, t, opt);
  const cplx per = gap_integral_of_y(sol, opt) - I * r;
  return {sym[0].real(), sym[0].imag(), sym[1].real(), sym[1].imag(), sym[2].real(), sym[2].imag(), per.real(), per.imag()};
}

struct TwoCutOptions {
  double tol = 1e-10;
  int max_iter = 60;
  double collision = 1e-6;
  QuadOptions quad{};
};

namespace detail {

inline Eigen::Matrix<double, 6, 1> twocut_equations(cplx t, const Eigen::Matrix<double, 6, 1>& x, double& r_out,
                                                    const QuadOptions& opt) {
  const cplx a(x(0), x(1)), b(x(2), x(3)), c(x(4), x(5));
  const TwoCutSolution s{a, b, c, -a - b - c};
  const auto sym = symmetric_residuals(t, s.a, s.b, s.c, s.d);
  r_out = compute_r(s, t, opt);
  const cplx per = gap_integral_of_y(s, opt) - I * r_out;
  Eigen::Matrix<double, 6, 1> F;
  F << sym[0].real(), sym[0].imag(), sym[1].real(), sym[1].imag(), per.real(), per.imag();
  return F;
}

inline void check_collision(const TwoCutSolution& s, double tol) {
  const auto e = s.endpoints();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      if (std::abs(e[i] - e[j]) < tol) fail(ErrorCode::EndpointCollision, "two endpoints have merged");
}

}  // namespace detail

/// Damped Newton on (a, b, c) with d = -a - b - c; central-difference Jacobian.
inline TwoCutSolution newton_solve(cplx t, const TwoCutSolution& initial, const TwoCutOptions& opt = {}) {
  Eigen::Matrix<double, 6, 1> x;
  x << initial.a.real(), initial.a.imag(), initial.b.real(), initial.b.imag(), initial.c.real(), initial.c.imag();
  auto unpack = [](const Eigen::Matrix<double, 6, 1>& v) {
    const cplx a(v(0), v(1)), b(v(2), v(3)), c(v(4), v(5));
    return TwoCutSolution{a, b, c, -a - b - c};
  };
  double r = 0.0;
  detail::check_collision(unpack(x), opt.collision);
  Eigen::Matrix<double, 6, 1> F = detail::twocut_equations(t, x, r, opt.quad);
  for (int it = 0; it <= opt.max_iter; ++it) {
    TwoCutSolution cur = unpack(x);
    detail::check_collision(cur, opt.collision);
    if (F.norm() < opt.tol) {
      cur.r = r;
      cur.residual_norm = F.norm();
      cur.iterations = it;
      return cur;
    }
    if (it == opt.max_iter) break;
    double scale = 1.0;
    for (cplx e : cur.endpoints()) scale = std::max(scale, std::abs(e));
    const double h = 1e-7 * scale;
    Eigen::Matrix<double, 6, 6> J;
    for (int k = 0; k < 6; ++k) {
      Eigen::Matrix<double, 6, 1> xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      double rr;
      J.col(k) = (detail::twocut_equations(t, xp, rr, opt.quad) - detail::twocut_equations(t, xm, rr, opt.quad)) / (2.0 * h);
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(J);
    if (!lu.isInvertible() || lu.rcond() < 1e-15) fail(ErrorCode::SingularJacobian, "two-cut Jacobian is singular");
    const Eigen::Matrix<double, 6, 1> dx = lu.solve(F);
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 20 && !accepted; ++ls, lambda *= 0.5) {
      const Eigen::Matrix<double, 6, 1> xn = x - lambda * dx;
      try {
        detail::check_collision(unpack(xn), opt.collision);
        double rn;
        const Eigen::Matrix<double, 6, 1> Fn = detail::twocut_equations(t, xn, rn, opt.quad);
        if (Fn.norm() < (1.0 - 1e-4 * lambda) * F.norm() || (ls == 19 && Fn.allFinite())) {
          x = xn;
          F = Fn;
          r = rn;
          accepted = true;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) break;
  }
  fail(ErrorCode::NoConvergence, "two-cut Newton did not converge");
}

/// Seeds a two-cut solution by opening the double root -beta of a one-cut
/// solution into c, d = -beta +- eps e^(i theta).
inline TwoCutSolution split_seed(const OneCutSolution& one, double eps, double theta) {
  const cplx off = std::polar(eps, theta);
  return TwoCutSolution{one.a, one.b, -one.beta + off, -one.beta - off};
}

/// Local Stokes directions at the double root -beta of a one-cut cubic curve:
/// the directions where Re (y'(-beta) (z + beta)^2) vanishes.
inline std::array<double, 2> split_directions(const OneCutSolution& one) {
  const BranchedRadical rad(one.endpoints());
  const cplx C = eval_w(rad, -one.beta);
  const double th = 0.5 * (0.5 * pi - std::arg(C));
  return {th, th + 0.5 * pi};
}

/// Tries the splitting seeds at a few radii and both local directions.
inline TwoCutSolution solve_from_onecut(cplx t, const OneCutSolution& one, const TwoCutOptions& opt = {}) {
  const auto dirs = split_directions(one);
  for (double eps : {1e-2, 3e-2, 1e-1, 3e-3, 0.3, 1e-3}) {
    for (double th : dirs) {
      try {
        return newton_solve(t, split_seed(one, eps, th), opt);
      } catch (const Error&) {
      }
    }
  }
  fail(ErrorCode::NoConvergence, "no splitting seed converged");
}

/// Sequential continuation along a polyline of t values, halving the step on
/// failure down to min_step.
inline std::vector<TwoCutSolution> continue_in_t(const std::vector<cplx>& path, const TwoCutSolution& seed,
                                                 const TwoCutOptions& opt = {}, double max_step = 0.05,
                                                 double min_step = 1e-5) {
  std::vector<TwoCutSolution> out;
  if (path.empty()) return out;
  TwoCutSolution cur = newton_solve(path.front(), seed, opt);
  out.push_back(cur);
  for (std::size_t i = 1; i < path.size(); ++i) {
    cplx t0 = path[i - 1];
    const cplx t1 = path[i];
    double step = std::min(max_step, std::abs(t1 - t0));
    while (std::abs(t1 - t0) > 0.0) {
      const double remaining = std::abs(t1 - t0);
      const double h = std::min(step, remaining);
      const cplx tn = (h >= remaining) ? t1 : t0 + (t1 - t0) / remaining * h;
      try {
        cur = newton_solve(tn, cur, opt);
        t0 = tn;
        step = std::min(max_step, 1.5 * step);
      } catch (const Error&) {
        step *= 0.5;
        if (step < min_step) fail(ErrorCode::ContinuationStalled, "continuation step fell below the minimum");
      }
    }
    out.push_back(cur);
  }
  return out;
}

/// Charges (1 / 2 pi i) int y_+ dz over each chord of a curve.
inline std::vector<cplx> chord_charges(const SpectralCurve& curve, const QuadOptions& opt = {}) {
  std::vector<cplx> q;
  const auto& rad = curve.radical();
  for (int j = 0; j < curve.cuts(); ++j) {
    const cplx v = integrate_segment<cplx>(
        rad.lo(j), rad.hi(j), [&](const SegmentNode& n) { return curve.y_plus_on_chord(j, n.s, n.one_minus_s); }, opt);
    q.push_back(v / (2.0 * pi * I));
  }
  return q;
}

}  // namespace scurve
