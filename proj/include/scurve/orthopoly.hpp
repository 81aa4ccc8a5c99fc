#pragma once

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "scurve/error.hpp"
#include "scurve/parallel.hpp"
#include "scurve/onecut.hpp"
#include "scurve/polynomial.hpp"
#include "scurve/stokes.hpp"

namespace scurve {

using mp_real = boost::multiprecision::mpfr_float;

/// Complex arithmetic over mpfr_float (no MPC dependency).
struct MpComplex {
  mp_real re, im;

  MpComplex() : re(0), im(0) {}
  MpComplex(mp_real r, mp_real i = mp_real(0)) : re(std::move(r)), im(std::move(i)) {}
  explicit MpComplex(cplx z) : re(z.real()), im(z.imag()) {}

  cplx to_cplx() const { return {static_cast<double>(re), static_cast<double>(im)}; }

  MpComplex& operator+=(const MpComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  MpComplex& operator-=(const MpComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  MpComplex& operator*=(const MpComplex& o) {
    mp_real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  MpComplex& operator/=(const MpComplex& o) {
    const mp_real d = o.re * o.re + o.im * o.im;
    mp_real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  friend MpComplex operator+(MpComplex a, const MpComplex& b) { return a += b; }
  friend MpComplex operator-(MpComplex a, const MpComplex& b) { return a -= b; }
  friend MpComplex operator*(MpComplex a, const MpComplex& b) { return a *= b; }
  friend MpComplex operator/(MpComplex a, const MpComplex& b) { return a /= b; }
  friend MpComplex operator-(const MpComplex& a) { return {-a.re, -a.im}; }
  friend MpComplex operator*(MpComplex a, const mp_real& s) {
    a.re *= s;
    a.im *= s;
    return a;
  }
};

inline mp_real abs(const MpComplex& z) { return boost::multiprecision::hypot(z.re, z.im); }

inline MpComplex exp(const MpComplex& z) {
  const mp_real m = boost::multiprecision::exp(z.re);
  return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

/// Sets the mpfr default precision (decimal digits) for its lifetime. The
/// default is process-wide, so concurrent calls must agree on the precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(int digits) : old_(mp_real::default_precision()) {
    mp_real::default_precision(static_cast<unsigned>(digits));
  }
  ~PrecisionScope() { mp_real::default_precision(old_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned old_;
};

inline mp_real pow10(int e) { return boost::multiprecision::pow(mp_real(10), e); }

struct MomentTable {
  int n = 0;
  std::vector<MpComplex> moments;  // mu_0 .. mu_2n
  int precision_digits = 0;
  int panels = 0;  // per ray, after refinement
};

struct ContourSpec {
  std::pair<int, int> sectors{1, 2};  // enter from sector i, leave into sector j
  cplx hinge{0.0, 0.0};
};

/// Bisector of the k-th decay sector of exp(-W): arg(a_d z^d) = 0.
inline double sector_bisector(const Polynomial& W, int k) {
  const int d = W.degree();
  return (2.0 * pi * k - std::arg(W.coeff(d))) / d;
}

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] at the current precision.
struct MpGaussLegendre {
  std::vector<mp_real> x, w;
};

inline const MpGaussLegendre& mp_gauss_legendre(int m, int digits) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, MpGaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({m, digits});
  if (it != cache.end()) return it->second;
  MpGaussLegendre g;
  g.x.resize(static_cast<std::size_t>(m));
  g.w.resize(static_cast<std::size_t>(m));
  const mp_real tol = pow10(-digits - 5);
  for (int i = 0; i < m; ++i) {
    mp_real x = std::cos(pi * (i + 0.75) / (m + 0.5));
    mp_real dp;
    for (int it2 = 0; it2 < 100; ++it2) {
      mp_real p0 = 1, p1 = x;
      for (int k = 2; k <= m; ++k) {
        mp_real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      const mp_real dx = p1 / dp;
      x -= dx;
      if (boost::multiprecision::abs(dx) < tol) break;
    }
    mp_real p0 = 1, p1 = x;
    for (int k = 2; k <= m; ++k) {
      mp_real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = std::move(p1);
      p1 = std::move(p2);
    }
    dp = m * (x * p1 - p0) / (x * x - 1);
    g.x[static_cast<std::size_t>(i)] = x;
    g.w[static_cast<std::size_t>(i)] = 2 / ((1 - x * x) * dp * dp);
  }
  return cache.emplace(std::make_pair(m, digits), std::move(g)).first->second;
}

inline MpComplex horner(const std::vector<MpComplex>& c, const MpComplex& z) {
  MpComplex acc;
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

/// Ray length beyond which |z^kmax exp(-n W)| < 10^-(digits + 20) for good.
inline double truncation_length(const Polynomial& W, int n, cplx hinge, cplx dir, int kmax, int digits) {
  const double target = -(digits + 20) * std::log(10.0);
  auto logmag = [&](double s) {
    const cplx z = hinge + s * dir;
    return kmax * std::log(std::max(std::abs(z), 1e-300)) - n * W(z).real();
  };
  double s = 1.0;
  for (int i = 0; i < 4000; ++i, s += 0.05) {
    if (logmag(s) < target && logmag(s + 0.05) < logmag(s)) return s;
  }
  fail(ErrorCode::PrecisionExhausted, "integrand does not decay along the sector bisector");
}

/// Contribution of one ray (hinge -> infinity) to all moments with `panels`
/// panels of m-point Gauss-Legendre; also accumulates L1 norms in double.
inline std::vector<MpComplex> ray_moments(const std::vector<MpComplex>& Wc, int n, const MpComplex& hinge,
                                          const MpComplex& dir, double L, int panels, int kmax, const MpGaussLegendre& gl,
                                          std::vector<double>& l1) {
  const std::size_t K = static_cast<std::size_t>(kmax) + 1;
  std::vector<std::vector<MpComplex>> partial(static_cast<std::size_t>(panels), std::vector<MpComplex>(K));
  std::vector<std::vector<double>> partial_l1(static_cast<std::size_t>(panels), std::vector<double>(K, 0.0));
  const mp_real h = mp_real(L) / panels;
  parallel_for(static_cast<std::size_t>(panels), [&](std::size_t p) {
    const mp_real s0 = h * static_cast<long>(p);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const mp_real s = s0 + h * (gl.x[i] + 1) / 2;
      const MpComplex z = hinge + dir * s;
      MpComplex wz = exp(-horner(Wc, z) * mp_real(n)) * dir * (gl.w[i] * h / 2);
      for (std::size_t k = 0; k < K; ++k) {
        partial[p][k] += wz;
        partial_l1[p][k] += static_cast<double>(abs(wz));
        wz *= z;
      }
    }
  });
  std::vector<MpComplex> out(K);
  for (std::size_t p = 0; p < partial.size(); ++p)
    for (std::size_t k = 0; k < K; ++k) {
      out[k] += partial[p][k];
      l1[k] += partial_l1[p][k];
    }
  return out;
}

}  // namespace detail

/// Potential with coefficients (ascending) carried at working precision.
struct MpPolynomial {
  std::vector<MpComplex> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  MpComplex operator()(const MpComplex& z) const { return detail::horner(c, z); }
  Polynomial to_double() const {
    std::vector<cplx> v;
    for (const auto& x : c) v.push_back(x.to_cplx());
    return Polynomial(v);
  }
};

/// W = z^3/3 - t z with the 1/3 exact at the current precision.
inline MpPolynomial mp_cubic_potential(const MpComplex& t) {
  return {{MpComplex(), -t, MpComplex(), MpComplex(mp_real(1) / 3)}};
}

inline MpPolynomial mp_from_double(const Polynomial& W) {
  MpPolynomial m;
  for (int i = 0; i <= W.degree(); ++i) m.c.emplace_back(W.coeff(i));
  return m;
}

/// mu_k = int_Gamma z^k exp(-n W(z)) dz, k = 0..2n, on two rays joined at the
/// hinge: in from infinity along the bisector of sector i, out along that of
/// sector j. Panels are doubled until every moment is stable relative to its
/// L1 norm. The precision must already be set (see PrecisionScope) when W is
/// built; compute_moments raises it to precision_digits + 10.
inline MomentTable compute_moments(const MpPolynomial& W, int n, const ContourSpec& contour = {}, int precision_digits = 120,
                                   int nodes = 40, int max_doublings = 8) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "n must be positive");
  if (precision_digits < 50) fail(ErrorCode::InvalidArgument, "precision_digits must be at least 50");
  if (W.degree() < 2) fail(ErrorCode::InvalidArgument, "potential must have degree >= 2");
  const int d = W.degree();
  const auto [si, sj] = contour.sectors;
  if (si == sj || si < 0 || sj < 0 || si >= d || sj >= d) fail(ErrorCode::InvalidArgument, "invalid sector pair");

  PrecisionScope scope(precision_digits + 10);
  const int kmax = 2 * n;
  const Polynomial Wd = W.to_double();
  const MpComplex hinge(contour.hinge);
  const auto& gl = detail::mp_gauss_legendre(nodes, precision_digits + 10);
  const mp_real lead_arg = boost::multiprecision::atan2(W.c.back().im, W.c.back().re);

  struct Ray {
    MpComplex dir;
    double L;
    mp_real sign;
  };
  std::vector<Ray> rays;
  for (auto [k, sign] : {std::pair{si, -1}, std::pair{sj, 1}}) {
    const mp_real th = (2 * boost::math::constants::pi<mp_real>() * k - lead_arg) / d;
    const double L = detail::truncation_length(Wd, n, contour.hinge, std::polar(1.0, static_cast<double>(th)), kmax,
                                               precision_digits);
    rays.push_back({MpComplex(boost::multiprecision::cos(th), boost::multiprecision::sin(th)), L, mp_real(sign)});
  }

  auto evaluate = [&](int panels_per_unit, std::vector<double>& l1) {
    std::vector<MpComplex> mu(static_cast<std::size_t>(kmax) + 1);
    l1.assign(mu.size(), 0.0);
    for (const Ray& r : rays) {
      const int panels = std::max(1, static_cast<int>(std::ceil(r.L * panels_per_unit)));
      const auto part = detail::ray_moments(W.c, n, hinge, r.dir, r.L, panels, kmax, gl, l1);
      for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += part[k] * r.sign;
    }
    return mu;
  };

  int ppu = 2;
  std::vector<double> l1_prev, l1;
  std::vector<MpComplex> prev = evaluate(ppu, l1_prev);
  const mp_real tol = pow10(-(precision_digits + 2));
  for (int it = 0; it < max_doublings; ++it) {
    ppu *= 2;
    std::vector<MpComplex> cur = evaluate(ppu, l1);
    bool ok = true;
    for (std::size_t k = 0; k < cur.size() && ok; ++k) ok = abs(cur[k] - prev[k]) <= tol * mp_real(l1[k]);
    if (ok) {
      MomentTable mt;
      mt.n = n;
      mt.moments = std::move(cur);
      mt.precision_digits = precision_digits;
      mt.panels = ppu;
      return mt;
    }
    prev = std::move(cur);
  }
  fail(ErrorCode::PrecisionExhausted, "moment quadrature did not converge under panel doubling");
}

inline MomentTable compute_moments(const Polynomial& W, int n, const ContourSpec& contour = {}, int precision_digits = 120) {
  PrecisionScope scope(precision_digits + 10);
  return compute_moments(mp_from_double(W), n, contour, precision_digits);
}

/// Cubic model with Re t and Im t as decimal strings, parsed at working precision.
inline MomentTable compute_cubic_moments(const std::string& t_re, const std::string& t_im, int n,
                                         const ContourSpec& contour = {}, int precision_digits = 120) {
  PrecisionScope scope(precision_digits + 10);
  return compute_moments(mp_cubic_potential(MpComplex(mp_real(t_re), mp_real(t_im))), n, contour, precision_digits);
}

inline MomentTable compute_cubic_moments(cplx t, int n, const ContourSpec& contour = {}, int precision_digits = 120) {
  PrecisionScope scope(precision_digits + 10);
  return compute_moments(mp_cubic_potential(MpComplex(t)), n, contour, precision_digits);
}

struct RecurrenceCoefficients {
  std::vector<MpComplex> alpha;  // alpha_0 .. alpha_{n-1}
  std::vector<MpComplex> beta;   // beta_1 .. beta_{n-1}
  MpComplex mu0;
  int precision_digits = 0;

  int degree() const { return static_cast<int>(alpha.size()); }
};

/// Chebyshev algorithm: alpha_k, beta_k of the monic OPs from mu_0..mu_{2n-1}.
/// A leading minor is declared degenerate when sigma_{k,k} cancels to below
/// 10^-(digits - 10) of the terms it is formed from.
inline RecurrenceCoefficients recurrence_from_moments(const MomentTable& m, int degree = -1) {
  const int n = degree < 0 ? m.n : degree;
  if (n < 1 || static_cast<int>(m.moments.size()) < 2 * n) fail(ErrorCode::InvalidArgument, "not enough moments");
  PrecisionScope scope(m.precision_digits + 10);
  const mp_real cancel = pow10(-(m.precision_digits - 10));
  const std::size_t L = static_cast<std::size_t>(2 * n);

  RecurrenceCoefficients rc;
  rc.precision_digits = m.precision_digits;
  rc.mu0 = m.moments[0];
  if (abs(m.moments[0]) == 0) fail(ErrorCode::DegenerateHankelMinor, "mu_0 vanishes");

  std::vector<MpComplex> sig_prev(L), sig(m.moments.begin(), m.moments.begin() + static_cast<long>(L)), next(L);
  rc.alpha.push_back(sig[1] / sig[0]);
  MpComplex beta_prev = sig[0];
  for (int k = 1; k < n; ++k) {
    const MpComplex& a = rc.alpha.back();
    for (std::size_t l = static_cast<std::size_t>(k); l + static_cast<std::size_t>(k) < L; ++l) {
      const MpComplex t1 = sig[l + 1], t2 = a * sig[l], t3 = (k >= 2 ? beta_prev * sig_prev[l] : MpComplex());
      next[l] = t1 - t2 - t3;
      if (l == static_cast<std::size_t>(k)) {
        mp_real scale = abs(t1);
        scale = boost::multiprecision::max(scale, abs(t2));
        scale = boost::multiprecision::max(scale, abs(t3));
        if (abs(next[l]) <= cancel * scale)
          fail(ErrorCode::DegenerateHankelMinor, "Hankel minor of order " + std::to_string(k + 1) + " vanishes");
      }
    }
    const std::size_t kk = static_cast<std::size_t>(k);
    const MpComplex alpha = next[kk + 1] / next[kk] - sig[kk] / sig[kk - 1];
    const MpComplex beta = next[kk] / sig[kk - 1];
    rc.alpha.push_back(alpha);
    rc.beta.push_back(beta);
    beta_prev = beta;
    sig_prev = sig;
    sig = next;
  }
  return rc;
}

/// Monomial coefficients (low to high) of p_0 .. p_n from the recurrence.
inline std::vector<std::vector<MpComplex>> op_coefficients(const RecurrenceCoefficients& rc, int n) {
  if (n > rc.degree()) fail(ErrorCode::InvalidArgument, "recurrence does not cover this degree");
  PrecisionScope scope(rc.precision_digits + 10);
  std::vector<std::vector<MpComplex>> p;
  p.push_back({MpComplex(mp_real(1))});
  for (int j = 0; j < n; ++j) {
    std::vector<MpComplex> q(static_cast<std::size_t>(j) + 2);
    const auto& pj = p[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < pj.size(); ++i) {
      q[i + 1] += pj[i];
      q[i] -= rc.alpha[static_cast<std::size_t>(j)] * pj[i];
    }
    if (j >= 1) {
      const auto& pm = p[static_cast<std::size_t>(j) - 1];
      for (std::size_t i = 0; i < pm.size(); ++i) q[i] -= rc.beta[static_cast<std::size_t>(j) - 1] * pm[i];
    }
    p.push_back(std::move(q));
  }
  return p;
}

/// |sum_ij p_j[a] p_k[b] mu_{a+b}| relative to the sum of absolute terms.
inline double orthogonality_residual(const MomentTable& m, const std::vector<MpComplex>& pj,
                                     const std::vector<MpComplex>& pk) {
  PrecisionScope scope(m.precision_digits + 10);
  MpComplex acc;
  mp_real scale = 0;
  for (std::size_t a = 0; a < pj.size(); ++a)
    for (std::size_t b = 0; b < pk.size(); ++b) {
      if (a + b >= m.moments.size()) fail(ErrorCode::InvalidArgument, "not enough moments");
      const MpComplex term = pj[a] * pk[b] * m.moments[a + b];
      acc += term;
      scale += abs(term);
    }
  return scale == 0 ? 0.0 : static_cast<double>(abs(acc) / scale);
}

struct ZeroSet {
  std::vector<MpComplex> zeros_mp;
  std::vector<cplx> zeros;
  double max_residual = 0.0;  // max |p_n(zero)|
  int iterations = 0;
};

namespace detail {

/// p_n(z) and p_n'(z) by the three-term recurrence.
inline std::pair<MpComplex, MpComplex> eval_op(const RecurrenceCoefficients& rc, int n, const MpComplex& z) {
  MpComplex p0(mp_real(1)), p1, d0, d1;
  if (n == 0) return {p0, d0};
  p1 = z - rc.alpha[0];
  d1 = MpComplex(mp_real(1));
  for (int j = 1; j < n; ++j) {
    const MpComplex& a = rc.alpha[static_cast<std::size_t>(j)];
    const MpComplex& b = rc.beta[static_cast<std::size_t>(j) - 1];
    MpComplex p2 = (z - a) * p1 - b * p0;
    MpComplex d2 = p1 + (z - a) * d1 - b * d0;
    p0 = std::move(p1);
    p1 = std::move(p2);
    d0 = std::move(d1);
    d1 = std::move(d2);
  }
  return {p1, d1};
}

}  // namespace detail

/// Zeros of p_n: eigenvalues of the (double) Jacobi matrix as starting
/// values, Aberth iteration at working precision, then Newton polishing.
inline ZeroSet zeros_of_pn(const RecurrenceCoefficients& rc, int n, int max_iter = 500) {
  if (n < 1 || n > rc.degree()) fail(ErrorCode::InvalidArgument, "recurrence does not cover this degree");
  PrecisionScope scope(rc.precision_digits + 10);
  const std::size_t N = static_cast<std::size_t>(n);

  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = rc.alpha[static_cast<std::size_t>(i)].to_cplx();
    if (i + 1 < n) {
      J(i, i + 1) = 1.0;
      J(i + 1, i) = rc.beta[static_cast<std::size_t>(i)].to_cplx();
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(J, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::RootFindingStalled, "Jacobi eigenvalue solver failed");
  std::vector<cplx> start(N);
  for (std::size_t i = 0; i < N; ++i) start[i] = es.eigenvalues()(static_cast<long>(i));
  std::sort(start.begin(), start.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  // Separate coincident starting values.
  for (std::size_t i = 1; i < N; ++i)
    if (std::abs(start[i] - start[i - 1]) < 1e-12) start[i] += cplx(1e-8, 1e-8 * static_cast<double>(i));

  ZeroSet zs;
  zs.zeros_mp.reserve(N);
  for (cplx s : start) zs.zeros_mp.emplace_back(s);
  const mp_real tol = pow10(-(rc.precision_digits - 10));
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<MpComplex> corr(N);
    parallel_for(N, [&](std::size_t i) {
      const auto [p, dp] = detail::eval_op(rc, n, zs.zeros_mp[i]);
      const MpComplex ratio = p / dp;
      MpComplex sum;
      for (std::size_t j = 0; j < N; ++j)
        if (j != i) sum += MpComplex(mp_real(1)) / (zs.zeros_mp[i] - zs.zeros_mp[j]);
      corr[i] = ratio / (MpComplex(mp_real(1)) - ratio * sum);
    });
    mp_real worst = 0;
    for (std::size_t i = 0; i < N; ++i) {
      zs.zeros_mp[i] -= corr[i];
      const mp_real rel = abs(corr[i]) / boost::multiprecision::max(mp_real(1), abs(zs.zeros_mp[i]));
      worst = boost::multiprecision::max(worst, rel);
    }
    zs.iterations = it + 1;
    if (worst < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorCode::RootFindingStalled, "Aberth iteration did not converge");

  std::vector<double> res(N);
  parallel_for(N, [&](std::size_t i) {
    for (int k = 0; k < 2; ++k) {
      const auto [p, dp] = detail::eval_op(rc, n, zs.zeros_mp[i]);
      if (abs(dp) == 0) break;
      zs.zeros_mp[i] -= p / dp;
    }
    res[i] = static_cast<double>(abs(detail::eval_op(rc, n, zs.zeros_mp[i]).first));
  });
  for (std::size_t i = 0; i < N; ++i) {
    zs.zeros.push_back(zs.zeros_mp[i].to_cplx());
    zs.max_residual = std::max(zs.max_residual, res[i]);
  }
  return zs;
}

struct ZeroCutReport {
  std::vector<double> distance;  // per zero, to the nearest cut
  std::vector<int> nearest_cut;  // per zero
  std::vector<int> counts;       // per cut
  double hausdorff = 0.0;        // max over zeros of the distance
};

inline ZeroCutReport zeros_vs_cuts(const std::vector<cplx>& zeros, const std::vector<std::vector<cplx>>& cuts) {
  ZeroCutReport r;
  r.counts.assign(cuts.size(), 0);
  if (cuts.empty()) return r;
  for (cplx z : zeros) {
    double best = 1e300;
    int which = -1;
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      const double d = distance_to_polyline(z, cuts[c]);
      if (d < best) {
        best = d;
        which = static_cast<int>(c);
      }
    }
    r.distance.push_back(best);
    r.nearest_cut.push_back(which);
    ++r.counts[static_cast<std::size_t>(which)];
    r.hausdorff = std::max(r.hausdorff, best);
  }
  return r;
}

}  // namespace scurve
