#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "scurve/algebra.hpp"
#include "scurve/error.hpp"
#include "scurve/polynomial.hpp"
#include "scurve/quadrature.hpp"

namespace scurve {

/// Integrals of z^k dz / w for k < kMaxMoment along one path.
inline constexpr std::size_t kMaxMoment = 12;
using MomentVec = std::array<cplx, kMaxMoment>;

/// w at z = p + s (q - p) where p and/or q are endpoints (indices ip, iq, or
/// -1). Offsets to those endpoints are taken exactly from s and 1 - s; the
/// branch is the chord branch.
inline cplx w_on_segment(const BranchedRadical& rad, int ip, int iq, cplx p, cplx q, double s, double oms) {
  const cplx z = p + s * (q - p);
  const auto& a = rad.endpoints();
  auto offset = [&](int m) -> cplx {
    if (m == ip) return s * (q - p);
    if (m == iq) return -oms * (q - p);
    return z - a[static_cast<std::size_t>(m)];
  };
  cplx w = 1.0;
  for (int j = 0; j < rad.genus_plus_one(); ++j) {
    const cplx chord = detail::pair_factor(rad.lo(j), rad.hi(j), z);
    const cplx direct = std::sqrt(offset(2 * j) * offset(2 * j + 1));
    w *= (chord.real() * direct.real() + chord.imag() * direct.imag()) >= 0.0 ? direct : -direct;
  }
  return w;
}

namespace detail {

inline MomentVec powers_over(cplx z, cplx w) {
  MomentVec m;
  cplx zk = 1.0 / w;
  for (std::size_t k = 0; k < kMaxMoment; ++k) {
    m[k] = zk;
    zk *= z;
  }
  return m;
}

inline cplx apply_moments(const Polynomial& num, const MomentVec& m) {
  if (num.degree() >= static_cast<int>(kMaxMoment))
    fail(ErrorCode::InvalidArgument, "polynomial degree exceeds the moment table");
  cplx acc{};
  for (int k = 0; k <= num.degree(); ++k) acc += num.coeff(k) * m[static_cast<std::size_t>(k)];
  return acc;
}

}  // namespace detail

/// int z^k dz / w along the gap a_i^+ -> a_{i+1}^- (zero-based i), chord branch.
inline MomentVec gap_moments(const BranchedRadical& rad, int i, const QuadOptions& opt = {}) {
  const int ip = 2 * i + 1, iq = 2 * i + 2;
  const cplx p = rad.hi(i), q = rad.lo(i + 1);
  return integrate_segment<MomentVec>(
      p, q, [&](const SegmentNode& n) { return detail::powers_over(n.z, w_on_segment(rad, ip, iq, p, q, n.s, n.one_minus_s)); },
      opt);
}

/// int z^k dz / w_+ along chord j (zero-based), left boundary value.
inline MomentVec chord_moments(const BranchedRadical& rad, int j, const QuadOptions& opt = {}) {
  const cplx p = rad.lo(j), q = rad.hi(j);
  return integrate_segment<MomentVec>(
      p, q, [&](const SegmentNode& n) { return detail::powers_over(n.z, w_plus_on_chord(rad, j, n.s, n.one_minus_s)); },
      opt);
}

/// Moment tables for every gap and chord of a radical.
struct PeriodTable {
  std::vector<MomentVec> gap;    // s - 1 entries
  std::vector<MomentVec> chord;  // s entries

  static PeriodTable compute(const BranchedRadical& rad, const QuadOptions& opt = {}) {
    PeriodTable t;
    const int s = rad.genus_plus_one();
    for (int i = 0; i + 1 < s; ++i) t.gap.push_back(gap_moments(rad, i, opt));
    for (int j = 0; j < s; ++j) t.chord.push_back(chord_moments(rad, j, opt));
    return t;
  }

  /// A_i(num dz / w) = 2 int over gap i, i = 1..s-1.
  cplx a(const Polynomial& num, int i) const {
    return 2.0 * detail::apply_moments(num, gap.at(static_cast<std::size_t>(i - 1)));
  }

  /// B_i(num dz / w) = -2 sum_{j <= i} int over chord j of the + boundary value.
  /// i = 1..s; i = s is the cycle around all cuts.
  cplx b(const Polynomial& num, int i) const {
    cplx acc{};
    for (int j = 0; j < i; ++j) acc += detail::apply_moments(num, chord.at(static_cast<std::size_t>(j)));
    return -2.0 * acc;
  }
};

inline cplx a_period(const std::vector<cplx>& endpoints, const Polynomial& num, int cycle_index,
                     const QuadOptions& opt = {}) {
  const BranchedRadical rad(endpoints);
  if (cycle_index < 1 || cycle_index > rad.genus_plus_one() - 1)
    fail(ErrorCode::InvalidArgument, "A-cycle index out of range");
  return 2.0 * detail::apply_moments(num, gap_moments(rad, cycle_index - 1, opt));
}

inline cplx b_period(const std::vector<cplx>& endpoints, const Polynomial& num, int cycle_index,
                     const QuadOptions& opt = {}) {
  const BranchedRadical rad(endpoints);
  if (cycle_index < 1 || cycle_index > rad.genus_plus_one())
    fail(ErrorCode::InvalidArgument, "B-cycle index out of range");
  if (num.is_zero()) return 0.0;
  cplx acc{};
  for (int j = 0; j < cycle_index; ++j) acc += detail::apply_moments(num, chord_moments(rad, j, opt));
  return -2.0 * acc;
}

struct DifferentialBasis {
  std::vector<cplx> endpoints;
  std::vector<Polynomial> first_kind;   // p_1 .. p_{s-1}
  std::vector<Polynomial> second_kind;  // P_1 .. P_K (index k-1)
  Polynomial third_kind;                // P_0
  PeriodTable periods;

  int s() const { return static_cast<int>(endpoints.size() / 2); }

  /// P_n for n = 0..K.
  const Polynomial& P(int n) const {
    return n == 0 ? third_kind : second_kind.at(static_cast<std::size_t>(n - 1));
  }
};

struct PeriodMatrix {
  Eigen::MatrixXcd B_first_kind;               // B_i(dphi_j)
  std::vector<std::vector<cplx>> B_second_third;  // [i][n] = B_i(dOmega_n)
};

namespace detail {

/// Solves for the constants sum_i c_i z^i (i <= s-2) that make all A-periods
/// of (base + sum c_i z^i) dz / w vanish.
inline Polynomial normalize_a_periods(const Polynomial& base, const Eigen::MatrixXcd& M,
                                      const Eigen::FullPivLU<Eigen::MatrixXcd>& lu, const PeriodTable& tab) {
  const int g = static_cast<int>(M.rows());
  if (g == 0) return base;
  Eigen::VectorXcd rhs(g);
  for (int i = 0; i < g; ++i) rhs(i) = -tab.a(base, i + 1);
  const Eigen::VectorXcd c = lu.solve(rhs);
  std::vector<cplx> cc(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) cc[static_cast<std::size_t>(i)] = c(i);
  return base + Polynomial(cc);
}

}  // namespace detail

/// First-kind p_j normalized by A_i(dphi_j) = delta_ij, second-kind P_k for
/// k = 1..max_k and third-kind P_0, all with vanishing A-periods.
inline DifferentialBasis build_basis(const std::vector<cplx>& endpoints, int max_k, const QuadOptions& opt = {}) {
  const BranchedRadical rad(endpoints);
  DifferentialBasis basis;
  basis.endpoints = endpoints;
  basis.periods = PeriodTable::compute(rad, opt);
  const int s = rad.genus_plus_one();
  const int g = s - 1;

  Eigen::MatrixXcd M(g, g);
  for (int i = 0; i < g; ++i)
    for (int k = 0; k < g; ++k) M(i, k) = basis.periods.a(Polynomial::monomial(k), i + 1);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  if (g > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv(g - 1) == 0.0 || sv(0) / sv(g - 1) > 1e12)
      fail(ErrorCode::IllConditionedPeriods, "A-period matrix is ill conditioned");
    const Eigen::MatrixXcd inv = lu.inverse();
    for (int j = 0; j < g; ++j) {
      std::vector<cplx> c(static_cast<std::size_t>(g));
      for (int k = 0; k < g; ++k) c[static_cast<std::size_t>(k)] = inv(k, j);
      basis.first_kind.emplace_back(c);
    }
  }

  // (w / z)_+ : coefficient of z^p is that of z^(p+1) in w.
  Polynomial p0;
  {
    const LaurentSeries L = laurent_times_w(Polynomial::monomial(0), rad, 2);
    std::vector<cplx> c(static_cast<std::size_t>(s));
    for (int p = 0; p < s; ++p) c[static_cast<std::size_t>(p)] = L.coeff(p + 1);
    p0 = Polynomial(c);
  }
  basis.third_kind = detail::normalize_a_periods(p0, M, lu, basis.periods);
  for (int k = 1; k <= max_k; ++k) {
    const Polynomial base = oplus_times_w(Polynomial::monomial(k - 1), rad) * (0.5 * k);
    basis.second_kind.push_back(detail::normalize_a_periods(base, M, lu, basis.periods));
  }
  return basis;
}

inline PeriodMatrix period_matrix(const DifferentialBasis& basis) {
  PeriodMatrix pm;
  const int g = basis.s() - 1;
  pm.B_first_kind.resize(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      pm.B_first_kind(i, j) = basis.periods.b(basis.first_kind[static_cast<std::size_t>(j)], i + 1);
  for (int i = 0; i < g; ++i) {
    std::vector<cplx> row;
    for (int n = 0; n <= static_cast<int>(basis.second_kind.size()); ++n)
      row.push_back(basis.periods.b(basis.P(n), i + 1));
    pm.B_second_third.push_back(std::move(row));
  }
  return pm;
}

/// t_n of W = sum t_n z^n for n >= 1, with t_0 fixed to -1.
inline cplx potential_coeff(const Polynomial& W, int n) { return n == 0 ? cplx(-1.0) : W.coeff(n); }

/// r_j from sum_j r_j Im B_i(dphi_j) = Re(sum_n t_n B_i(dOmega_n)).
inline std::vector<double> solve_r(const std::vector<cplx>& endpoints, const Polynomial& W, const QuadOptions& opt = {}) {
  const DifferentialBasis basis = build_basis(endpoints, W.degree(), opt);
  const int g = basis.s() - 1;
  if (g == 0) return {};
  const PeriodMatrix pm = period_matrix(basis);
  Eigen::MatrixXd A(g, g);
  Eigen::VectorXd rhs(g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) A(i, j) = pm.B_first_kind(i, j).imag();
    cplx acc{};
    for (int n = 0; n <= W.degree(); ++n) acc += potential_coeff(W, n) * pm.B_second_third[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)];
    rhs(i) = acc.real();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(g - 1) == 0.0 || sv(0) / sv(g - 1) > 1e12)
    fail(ErrorCode::IllConditionedPeriods, "Im B matrix is ill conditioned");
  const Eigen::VectorXd r = svd.solve(rhs);
  return std::vector<double>(r.data(), r.data() + g);
}

/// sum_n t_n P_n(a) + i sum_i r_i p_i(a) at every endpoint a.
inline std::vector<cplx> ce_residual(const DifferentialBasis& basis, const Polynomial& W, const std::vector<double>& r) {
  std::vector<cplx> out;
  for (cplx a : basis.endpoints) {
    cplx acc{};
    for (int n = 0; n <= W.degree(); ++n) acc += potential_coeff(W, n) * basis.P(n)(a);
    for (std::size_t i = 0; i < r.size() && i < basis.first_kind.size(); ++i)
      acc += I * r[i] * basis.first_kind[i](a);
    out.push_back(acc);
  }
  return out;
}

inline std::vector<cplx> ce_residual(const std::vector<cplx>& endpoints, const Polynomial& W, const std::vector<double>& r,
                                     const QuadOptions& opt = {}) {
  return ce_residual(build_basis(endpoints, W.degree(), opt), W, r);
}

/// 2 sum t_n P_n(z) + 2i sum r_i p_i(z), which equals y(z) w(z) at a solution.
inline Polynomial yw_from_basis(const DifferentialBasis& basis, const Polynomial& W, const std::vector<double>& r) {
  Polynomial acc;
  for (int n = 0; n <= W.degree(); ++n) acc += basis.P(n) * (2.0 * potential_coeff(W, n));
  for (std::size_t i = 0; i < r.size() && i < basis.first_kind.size(); ++i)
    acc += basis.first_kind[i] * (2.0 * I * r[i]);
  return acc;
}

}  // namespace scurve
