#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "scurve/error.hpp"

namespace scurve {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Polynomial with complex coefficients stored in ascending degree.
/// Trailing exact zeros are trimmed so the leading coefficient is nonzero
/// unless the polynomial is identically zero (empty coefficient list).
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<cplx> coeffs) : c_(coeffs) { trim(); }

  static Polynomial constant(cplx v) { return Polynomial({v}); }

  static Polynomial monomial(int k, cplx coeff = 1.0) {
    std::vector<cplx> c(static_cast<std::size_t>(k) + 1, 0.0);
    c.back() = coeff;
    return Polynomial(std::move(c));
  }

  /// Monic polynomial with the given roots.
  static Polynomial from_roots(std::span<const cplx> roots) {
    std::vector<cplx> c{1.0};
    for (cplx r : roots) {
      std::vector<cplx> next(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= r * c[i];
      }
      c = std::move(next);
    }
    return Polynomial(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }

  cplx coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : cplx{};
  }
  cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }

  cplx operator()(cplx z) const {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
    return Polynomial(std::move(d));
  }

  /// Antiderivative vanishing at z = 0.
  Polynomial antiderivative() const {
    std::vector<cplx> d(c_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i) d[i + 1] = c_[i] / static_cast<double>(i + 1);
    return Polynomial(std::move(d));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  Polynomial& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
  friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
  }

  std::vector<cplx> c_;
};

/// All roots of p by Aberth iteration with a deterministic circular start,
/// followed by Newton polishing.
inline std::vector<cplx> roots(const Polynomial& p) {
  const int n = p.degree();
  if (n < 1) return {};
  if (n == 1) return {-p.coeff(0) / p.coeff(1)};
  const cplx lead = p.leading();
  std::vector<cplx> monic(p.coeffs().begin(), p.coeffs().end());
  for (auto& v : monic) v /= lead;
  const Polynomial q(monic);
  const Polynomial dq = q.derivative();

  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(monic[static_cast<std::size_t>(k)]), 1.0 / (n - k)));
  radius = std::max(radius, 1e-3);
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = radius * std::polar(1.0, 2 * pi * (k + 0.25) / n + 0.4);

  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) {
      const cplx zi = z[static_cast<std::size_t>(i)];
      const cplx ratio = q(zi) / dq(zi);
      cplx sum{};
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (zi - z[static_cast<std::size_t>(j)]);
      const cplx step = ratio / (1.0 - ratio * sum);
      if (std::isfinite(step.real()) && std::isfinite(step.imag())) {
        z[static_cast<std::size_t>(i)] -= step;
        max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(zi)));
      }
    }
    if (max_step < 1e-15) break;
  }
  for (auto& zi : z) {
    for (int k = 0; k < 3; ++k) {
      const cplx d = dq(zi);
      if (std::abs(d) == 0.0) break;
      zi -= q(zi) / d;
    }
  }
  return z;
}

}  // namespace scurve
