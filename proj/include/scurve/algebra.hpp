#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "scurve/error.hpp"
#include "scurve/polynomial.hpp"

namespace scurve {

/// w(z) = sqrt(prod (z - a_m)) over 2s endpoints, stored as consecutive
/// pairs (a_1^-, a_1^+, a_2^-, a_2^+, ...). The branch is w ~ z^s at infinity
/// with cuts on the straight chords a_j^- -> a_j^+.
class BranchedRadical {
 public:
  BranchedRadical() = default;
  explicit BranchedRadical(std::vector<cplx> endpoints) : a_(std::move(endpoints)) {
    if (a_.empty() || a_.size() % 2 != 0)
      fail(ErrorCode::InvalidArgument, "radical needs an even, nonzero number of endpoints");
    for (std::size_t i = 0; i < a_.size(); ++i)
      for (std::size_t j = i + 1; j < a_.size(); ++j)
        if (a_[i] == a_[j]) fail(ErrorCode::InvalidArgument, "radical endpoints must be distinct");
  }

  const std::vector<cplx>& endpoints() const { return a_; }
  int genus_plus_one() const { return static_cast<int>(a_.size() / 2); }
  cplx lo(int j) const { return a_[2 * static_cast<std::size_t>(j)]; }
  cplx hi(int j) const { return a_[2 * static_cast<std::size_t>(j) + 1]; }

  double scale() const {
    double m = 0.0;
    for (cplx v : a_) m = std::max(m, std::abs(v));
    return m;
  }
  double eps_root() const { return 1e-9 * (1.0 + scale()); }

  /// prod (z - a_m), the square of w.
  cplx square(cplx z) const {
    cplx p = 1.0;
    for (cplx v : a_) p *= z - v;
    return p;
  }

  Polynomial square_poly() const { return Polynomial::from_roots(a_); }

 private:
  std::vector<cplx> a_;
};

namespace detail {

/// sqrt((z-lo)(z-hi)) with its cut on the chord lo -> hi and value ~ z at
/// infinity. Points exactly on the chord get the boundary value from the
/// left of lo -> hi.
inline cplx pair_factor(cplx lo, cplx hi, cplx z) {
  const cplx delta = 0.5 * (hi - lo);
  const cplx u = (z - 0.5 * (lo + hi)) / delta;
  cplx chord;
  if (u.imag() > 0.0) {
    chord = I * delta * std::sqrt(1.0 - u * u);
  } else if (u.imag() < 0.0) {
    chord = -I * delta * std::sqrt(1.0 - u * u);
  } else if (std::abs(u.real()) > 1.0) {
    chord = delta * u * std::sqrt(1.0 - 1.0 / (u * u));
  } else {
    chord = I * delta * std::sqrt(1.0 - u * u);
  }
  // Same value up to sign, but with full relative accuracy near lo and hi.
  const cplx direct = std::sqrt((z - lo) * (z - hi));
  return (chord.real() * direct.real() + chord.imag() * direct.imag()) >= 0.0 ? direct : -direct;
}

}  // namespace detail

inline void check_off_branch_points(const BranchedRadical& rad, cplx z) {
  for (cplx v : rad.endpoints())
    if (std::abs(z - v) < rad.eps_root())
      fail(ErrorCode::EvaluationAtBranchPoint, "w evaluated within eps_root of an endpoint");
}

/// Chord branch of w. Off the chords this is the unique branch with
/// w ~ z^s at infinity that is analytic outside the union of chords.
inline cplx eval_w(const BranchedRadical& rad, cplx z) {
  check_off_branch_points(rad, z);
  cplx w = 1.0;
  for (int j = 0; j < rad.genus_plus_one(); ++j) w *= detail::pair_factor(rad.lo(j), rad.hi(j), z);
  return w;
}

/// Continues w from (from, w_from) to `to` along the straight segment.
/// Exact as long as the segment avoids the endpoints.
inline cplx continue_w(const BranchedRadical& rad, cplx from, cplx w_from, cplx to) {
  check_off_branch_points(rad, to);
  cplx w = w_from;
  for (cplx v : rad.endpoints()) w *= std::sqrt((to - v) / (from - v));
  return w;
}

/// Analytic continuation along a polyline, starting from a reference point
/// far outside all chords (where the chord branch is unambiguous).
inline cplx eval_w(const BranchedRadical& rad, cplx z, std::span<const cplx> path_hint) {
  if (path_hint.empty()) return eval_w(rad, z);
  const double R = 10.0 * std::max(rad.scale(), 1.0);
  const cplx first = path_hint.front();
  const double theta0 = std::abs(first) > 0.0 ? std::arg(first) : 0.0;
  cplx p = std::polar(R, theta0);
  cplx w = eval_w(rad, p);
  for (cplx q : path_hint) {
    if (q == p) continue;
    w = continue_w(rad, p, w, q);
    p = q;
  }
  return z == p ? w : continue_w(rad, p, w, z);
}

/// Boundary value of w on chord j at z = lo + s (hi - lo), taken from the
/// left of lo -> hi. `one_minus_s` is passed separately so that 1 - s keeps
/// full accuracy near hi.
inline cplx w_plus_on_chord(const BranchedRadical& rad, int j, double s, double one_minus_s) {
  const cplx lo = rad.lo(j), hi = rad.hi(j);
  const cplx z = lo + s * (hi - lo);
  cplx w = I * (hi - lo) * std::sqrt(s * one_minus_s);
  for (int m = 0; m < rad.genus_plus_one(); ++m)
    if (m != j) w *= detail::pair_factor(rad.lo(m), rad.hi(m), z);
  return w;
}

inline cplx w_plus_on_chord(const BranchedRadical& rad, int j, double s) {
  return w_plus_on_chord(rad, j, s, 1.0 - s);
}

/// Truncated Laurent series at infinity: coefficients of z^top, z^(top-1),
/// ..., z^(-depth).
class LaurentSeries {
 public:
  LaurentSeries() = default;
  LaurentSeries(int top, int depth, std::vector<cplx> coeffs)
      : top_(top), depth_(depth), c_(std::move(coeffs)) {}

  int top_degree() const { return top_; }
  int depth() const { return depth_; }
  const std::vector<cplx>& coeffs() const { return c_; }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](cplx v) { return v == cplx{}; });
  }

  /// Coefficient of z^p; zero above the top degree.
  cplx coeff(int p) const {
    if (p < -depth_)
      fail(ErrorCode::InvalidArgument, "Laurent coefficient below the truncation depth");
    if (p > top_) return {};
    return c_[static_cast<std::size_t>(top_ - p)];
  }

  /// Sum of the nonnegative powers.
  Polynomial nonnegative_part() const {
    if (top_ < 0) return {};
    std::vector<cplx> c(static_cast<std::size_t>(top_) + 1);
    for (int p = 0; p <= top_; ++p) c[static_cast<std::size_t>(p)] = coeff(p);
    return Polynomial(std::move(c));
  }

  /// Evaluates the truncated series.
  cplx operator()(cplx z) const {
    cplx acc{};
    for (int p = -depth_; p <= top_; ++p) acc += coeff(p) * std::pow(z, p);
    return acc;
  }

 private:
  int top_ = 0;
  int depth_ = 0;
  std::vector<cplx> c_;
};

namespace detail {

/// Maclaurin coefficients f_0..f_{count-1} of prod (1 - a_m u)^alpha.
inline std::vector<cplx> power_of_product(std::span<const cplx> a, double alpha, int count) {
  const Polynomial Q = [&] {
    Polynomial q = Polynomial::constant(1.0);
    for (cplx v : a) q = q * Polynomial({1.0, -v});
    return q;
  }();
  std::vector<cplx> f(static_cast<std::size_t>(std::max(count, 1)), 0.0);
  f[0] = 1.0;
  for (int n = 1; n < count; ++n) {
    cplx acc{};
    for (int k = 1; k <= std::min(n, Q.degree()); ++k)
      acc += Q.coeff(k) * f[static_cast<std::size_t>(n - k)] * (alpha * k - (n - k));
    f[static_cast<std::size_t>(n)] = acc / static_cast<double>(n);
  }
  return f;
}

/// Laurent series of num(z) z^(e) prod(1 - a/z)^alpha.
inline LaurentSeries laurent_of(const Polynomial& num, std::span<const cplx> a, int e, double alpha,
                                int depth) {
  if (depth < 0) fail(ErrorCode::InvalidArgument, "Laurent depth must be nonnegative");
  if (num.is_zero()) return LaurentSeries(0, depth, std::vector<cplx>(static_cast<std::size_t>(depth) + 1));
  const int top = num.degree() + e;
  const int count = top + depth + 1;
  if (count <= 0) return LaurentSeries(top, depth, {});
  const auto f = power_of_product(a, alpha, count);
  std::vector<cplx> c(static_cast<std::size_t>(count), 0.0);
  for (int p = top; p >= -depth; --p) {
    cplx acc{};
    for (int k = 0; k <= num.degree(); ++k) {
      const int m = k + e - p;
      if (m >= 0 && m < count) acc += num.coeff(k) * f[static_cast<std::size_t>(m)];
    }
    c[static_cast<std::size_t>(top - p)] = acc;
  }
  return LaurentSeries(top, depth, std::move(c));
}

}  // namespace detail

/// Laurent expansion of num(z)/w(z) at infinity, keeping `depth` negative powers.
inline LaurentSeries laurent_at_infinity(const Polynomial& num, const BranchedRadical& rad, int depth) {
  if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be at least 1");
  return detail::laurent_of(num, rad.endpoints(), -rad.genus_plus_one(), -0.5, depth);
}

/// Laurent expansion of num(z) w(z) at infinity.
inline LaurentSeries laurent_times_w(const Polynomial& num, const BranchedRadical& rad, int depth) {
  if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be at least 1");
  return detail::laurent_of(num, rad.endpoints(), rad.genus_plus_one(), 0.5, depth);
}

/// (num / w)_+ : nonnegative-power part of num/w at infinity.
inline Polynomial oplus_part(const Polynomial& num, const BranchedRadical& rad) {
  return laurent_at_infinity(num, rad, 1).nonnegative_part();
}

/// (num * w)_+ : nonnegative-power part of num*w at infinity.
inline Polynomial oplus_times_w(const Polynomial& num, const BranchedRadical& rad) {
  return laurent_times_w(num, rad, 1).nonnegative_part();
}

}  // namespace scurve
