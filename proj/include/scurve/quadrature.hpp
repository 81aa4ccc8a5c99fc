#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <vector>

#include "scurve/error.hpp"
#include "scurve/polynomial.hpp"

namespace scurve {

/// Gauss-Legendre nodes and weights on [0, 1]. Templated on the real type so
/// the same routine serves double and runtime-precision MPFR numbers.
template <class Real>
struct GaussRule {
  std::vector<Real> x;
  std::vector<Real> w;
};

template <class Real>
GaussRule<Real> gauss_legendre(int n, const Real& tol) {
  using std::abs;
  using std::cos;
  GaussRule<Real> r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  const Real one(1);
  const Real pi_r = acos(-one);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = cos(pi_r * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp(0);
    for (int it = 0; it < 100; ++it) {
      Real p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = one;
      dp = Real(n) * (x * p1 - p0) / (x * x - one);
      const Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < tol) break;
    }
    {
      Real p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = one;
      dp = Real(n) * (x * p1 - p0) / (x * x - one);
    }
    const Real wt = Real(2) / ((one - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    r.x[lo] = (one - x) / Real(2);
    r.x[hi] = (one + x) / Real(2);
    r.w[lo] = wt / Real(2);
    r.w[hi] = wt / Real(2);
  }
  return r;
}

inline const GaussRule<double>& gauss20() {
  static const GaussRule<double> rule = gauss_legendre<double>(20, 1e-16);
  return rule;
}

/// Point on a straight segment p + s (q - p) with s and 1 - s both exact.
struct SegmentNode {
  cplx z;
  double s;
  double one_minus_s;
};

namespace detail {

inline double value_norm(cplx v) { return std::abs(v); }
template <std::size_t N>
double value_norm(const std::array<cplx, N>& v) {
  double m = 0.0;
  for (cplx x : v) m = std::max(m, std::abs(x));
  return m;
}
template <std::size_t N>
std::array<cplx, N> operator*(double a, const std::array<cplx, N>& v) {
  std::array<cplx, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a * v[i];
  return r;
}
template <std::size_t N>
std::array<cplx, N>& operator+=(std::array<cplx, N>& a, const std::array<cplx, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}
template <std::size_t N>
std::array<cplx, N> operator-(std::array<cplx, N> a, const std::array<cplx, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] -= b[i];
  return a;
}
inline cplx scale_value(double a, cplx v) { return a * v; }
template <std::size_t N>
std::array<cplx, N> scale_value(double a, const std::array<cplx, N>& v) {
  return operator*(a, v);
}
inline void add_to(cplx& a, cplx b) { a += b; }
template <std::size_t N>
void add_to(std::array<cplx, N>& a, const std::array<cplx, N>& b) {
  operator+=(a, b);
}
inline double diff_norm(cplx a, cplx b) { return std::abs(a - b); }
template <std::size_t N>
double diff_norm(const std::array<cplx, N>& a, const std::array<cplx, N>& b) {
  return value_norm(operator-(a, b));
}

}  // namespace detail

struct QuadOptions {
  double tol = 1e-12;
  int max_depth = 40;
  /// Number of Gauss rules per half segment before adaptive refinement
  /// (doubling this is the node-count convergence check).
  int base_panels = 1;
};

/// Integrates g(node) ds over s in [0, 1], with u^2 substitutions at both ends
/// so inverse square-root and square-root endpoint behaviour is smooth.
/// The caller multiplies by (q - p) for a dz integral.
template <class V, class F>
V integrate_unit_segment(cplx p, cplx q, F&& g, const QuadOptions& opt = {}) {
  const auto& rule = gauss20();
  // Left half: s = u^2 / 2, ds = u du.  Right half: 1 - s = v^2 / 2.
  auto panel = [&](double u0, double u1, bool left) {
    V acc{};
    const double h = u1 - u0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double u = u0 + h * rule.x[i];
      const double sq = 0.5 * u * u;
      const double s = left ? sq : 1.0 - sq;
      const double oms = left ? 1.0 - sq : sq;
      const SegmentNode nd{p + s * (q - p), s, oms};
      detail::add_to(acc, detail::scale_value(rule.w[i] * h * u, g(nd)));
    }
    return acc;
  };
  V total{};
  double scale_est = 0.0;
  std::function<V(double, double, bool, const V&, int)> refine = [&](double u0, double u1, bool left,
                                                                       const V& whole, int depth) -> V {
    const double m = 0.5 * (u0 + u1);
    V a = panel(u0, m, left);
    V b = panel(m, u1, left);
    V sum = a;
    detail::add_to(sum, b);
    scale_est = std::max(scale_est, detail::value_norm(sum));
    if (detail::diff_norm(sum, whole) <= opt.tol * std::max(scale_est, 1e-300)) return sum;
    if (depth >= opt.max_depth) fail(ErrorCode::QuadratureFailure, "adaptive refinement exhausted");
    V l = refine(u0, m, left, a, depth + 1);
    V r = refine(m, u1, left, b, depth + 1);
    detail::add_to(l, r);
    return l;
  };
  for (bool left : {true, false}) {
    const int np = std::max(1, opt.base_panels);
    for (int k = 0; k < np; ++k) {
      const double u0 = static_cast<double>(k) / np, u1 = static_cast<double>(k + 1) / np;
      V whole = panel(u0, u1, left);
      scale_est = std::max(scale_est, detail::value_norm(whole));
      detail::add_to(total, refine(u0, u1, left, whole, 0));
    }
  }
  return total;
}

/// Integral of g(z) dz along the straight segment p -> q.
template <class V, class F>
V integrate_segment(cplx p, cplx q, F&& g, const QuadOptions& opt = {}) {
  V r = integrate_unit_segment<V>(p, q, [&](const SegmentNode& nd) { return g(nd); }, opt);
  if constexpr (std::is_same_v<V, cplx>) {
    return r * (q - p);
  } else {
    for (auto& v : r) v *= (q - p);
    return r;
  }
}

/// Plain fixed-order Gauss-Legendre on p -> q for smooth integrands.
template <class F>
cplx integrate_smooth(cplx p, cplx q, F&& g, int panels = 1) {
  const auto& rule = gauss20();
  cplx acc{};
  for (int k = 0; k < panels; ++k) {
    const cplx a = p + (q - p) * (static_cast<double>(k) / panels);
    const cplx b = p + (q - p) * (static_cast<double>(k + 1) / panels);
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * g(a + rule.x[i] * (b - a));
  }
  return acc * (q - p) / static_cast<double>(panels);
}

}  // namespace scurve
