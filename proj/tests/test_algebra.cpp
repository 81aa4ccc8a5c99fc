#include <gtest/gtest.h>

#include <random>

#include "scurve/algebra.hpp"
#include "scurve/quadrature.hpp"

using namespace scurve;

namespace {

// sqrt((z-beta)^2 - delta^2) = (z-beta) sum_k binom(1/2,k) (-delta^2/(z-beta)^2)^k
cplx binomial_sqrt_oracle(cplx z, cplx beta, cplx delta2, int terms) {
  const cplx x = -delta2 / ((z - beta) * (z - beta));
  cplx sum = 0.0, term = 1.0;
  double binom = 1.0;
  for (int k = 0; k < terms; ++k) {
    sum += binom * term;
    binom *= (0.5 - k) / (k + 1);
    term *= x;
  }
  return (z - beta) * sum;
}

// Coefficients (in powers of 1/z) of prod_m (1 - a_m/z)^alpha as a Cauchy
// product of the individual binomial series.
std::vector<cplx> product_series_oracle(const std::vector<cplx>& a, double alpha, int count) {
  std::vector<cplx> acc(count, 0.0);
  acc[0] = 1.0;
  for (cplx am : a) {
    std::vector<cplx> f(count);
    double binom = 1.0;
    cplx pw = 1.0;
    for (int k = 0; k < count; ++k) {
      f[k] = binom * pw;
      binom *= (alpha - k) / (k + 1);
      pw *= -am;
    }
    std::vector<cplx> next(count, 0.0);
    for (int i = 0; i < count; ++i)
      for (int j = 0; i + j < count; ++j) next[i + j] += acc[i] * f[j];
    acc = next;
  }
  return acc;
}

}  // namespace

TEST(Polynomial, ArithmeticAndRoots) {
  const std::vector<cplx> r{{1, 2}, {-3, 0.5}, {0.25, -1}};
  const Polynomial p = Polynomial::from_roots(r);
  EXPECT_EQ(p.degree(), 3);
  for (cplx z : r) EXPECT_LT(std::abs(p(z)), 1e-13);
  auto found = roots(p);
  ASSERT_EQ(found.size(), 3u);
  for (cplx z : r) {
    double best = 1e9;
    for (cplx f : found) best = std::min(best, std::abs(f - z));
    EXPECT_LT(best, 1e-12);
  }
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ((p - p).degree(), -1);
  const Polynomial d = p.antiderivative().derivative();
  for (int k = 0; k <= 3; ++k) EXPECT_LT(std::abs(d.coeff(k) - p.coeff(k)), 1e-14);
}

TEST(EvalW, RealAxisRightOfCut) {
  const BranchedRadical rad({-2.0, 2.0});
  const cplx w = eval_w(rad, 3.0);
  EXPECT_NEAR(w.real(), std::sqrt(5.0), 1e-15);
  EXPECT_EQ(w.imag(), 0.0);
}

TEST(EvalW, UpperBoundaryValueOnGaussianCut) {
  const BranchedRadical rad({-2.0, 2.0});
  const cplx w = eval_w(rad, cplx(0.0, 1e-14));
  EXPECT_NEAR(w.real(), 0.0, 1e-12);
  EXPECT_NEAR(w.imag(), 2.0, 1e-12);
  const cplx wp = w_plus_on_chord(rad, 0, 0.5);
  EXPECT_NEAR(std::abs(wp - cplx(0, 2)), 0.0, 1e-15);
  for (double x : {-1.5, -0.3, 0.7, 1.9}) {
    const cplx v = w_plus_on_chord(rad, 0, (x + 2.0) / 4.0);
    EXPECT_NEAR(v.imag(), std::sqrt(4.0 - x * x), 1e-13);
    EXPECT_NEAR(v.real(), 0.0, 1e-15);
  }
}

TEST(EvalW, MatchesBinomialSeriesFarAway) {
  const cplx beta = -1.0, delta = cplx(0, std::sqrt(2.0));
  const BranchedRadical rad({beta - delta, beta + delta});
  const cplx z = 10.0;
  EXPECT_LT(std::abs(eval_w(rad, z) - binomial_sqrt_oracle(z, beta, delta * delta, 60)), 1e-10);
  for (cplx zz : {cplx(7, 3), cplx(-6, -8), cplx(0, 12)})
    EXPECT_LT(std::abs(eval_w(rad, zz) - binomial_sqrt_oracle(zz, beta, delta * delta, 80)), 1e-10);
}

TEST(EvalW, BranchPointIsAnError) {
  const BranchedRadical rad({-2.0, 2.0});
  try {
    eval_w(rad, 2.0 + 1e-12);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EvaluationAtBranchPoint);
  }
}

TEST(EvalW, SquaresBackAtRandomPoints) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  const BranchedRadical rad({{-0.6667, -1.7448}, {-0.6667, 1.7448}, {0.6667, -0.2110}, {0.6667, 0.2110}});
  for (int i = 0; i < 100; ++i) {
    const cplx z(U(gen), U(gen));
    const cplx w = eval_w(rad, z);
    const cplx sq = rad.square(z);
    EXPECT_LT(std::abs(w * w - sq), 1e-12 * std::abs(sq));
  }
}

TEST(EvalW, AsymptoticNormalization) {
  const BranchedRadical rad({{-1, -1}, {1, 2}, {0.5, -0.3}, {2, 1}});
  for (double R : {1e3, 1e5}) {
    for (double th : {0.1, 1.7, 3.0, -2.2}) {
      const cplx z = std::polar(R, th);
      EXPECT_LT(std::abs(eval_w(rad, z) / (z * z) - 1.0), 10.0 / R);
    }
  }
}

TEST(EvalW, ContinuityAroundLoops) {
  const BranchedRadical rad({{-1, -1}, {-1, 1}, {1, -0.5}, {1, 0.5}});
  auto loop = [&](cplx c, double radius) {
    const int n = 400;
    cplx p = c + radius;
    cplx w = eval_w(rad, p);
    const cplx w0 = w;
    for (int i = 1; i <= n; ++i) {
      const cplx q = c + std::polar(radius, 2 * pi * i / n);
      w = continue_w(rad, p, w, q);
      p = q;
    }
    return std::abs(w - w0) / std::abs(w0);
  };
  EXPECT_LT(loop(0.0, 5.0), 1e-10);          // encloses all four
  EXPECT_LT(loop(cplx(-1, 0), 1.5), 1e-10);  // encloses the left pair
  EXPECT_LT(loop(cplx(3, 3), 0.5), 1e-10);   // encloses none
  EXPECT_NEAR(loop(cplx(-1, 1), 0.3), 2.0, 1e-10);  // one endpoint flips the sign
}

TEST(EvalW, PathHintAgreesWithChordBranchOffCuts) {
  const BranchedRadical rad({{-2, 0}, {2, 0}});
  const std::vector<cplx> hint{cplx(0, 5), cplx(0, 1)};
  EXPECT_LT(std::abs(eval_w(rad, cplx(0.3, 0.2), hint) - eval_w(rad, cplx(0.3, 0.2))), 1e-13);
  // Crossing the cut from above lands on the continuation of the upper value.
  const std::vector<cplx> down{cplx(0, 5), cplx(0, 0.5)};
  const cplx below = eval_w(rad, cplx(0, -0.5), down);
  EXPECT_LT(std::abs(below + eval_w(rad, cplx(0, -0.5))), 1e-13);
}

TEST(Laurent, GaussianSeries) {
  const BranchedRadical rad({-2.0, 2.0});
  const LaurentSeries L = laurent_at_infinity(Polynomial({0.0, 1.0}), rad, 6);
  EXPECT_EQ(L.top_degree(), 0);
  EXPECT_LT(std::abs(L.coeff(0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(L.coeff(-1)), 1e-15);
  EXPECT_LT(std::abs(L.coeff(-2) - 2.0), 1e-15);
  EXPECT_LT(std::abs(L.coeff(-4) - 6.0), 1e-14);
}

TEST(Laurent, CubicOneCutSeries) {
  const cplx t(0.4, -0.7), beta(-0.9, 0.3), delta(0.2, 1.1);
  const BranchedRadical rad({beta - delta, beta + delta});
  const LaurentSeries L = laurent_at_infinity(Polynomial({-t, 0.0, 1.0}), rad, 4);
  EXPECT_EQ(L.top_degree(), 1);
  EXPECT_LT(std::abs(L.coeff(1) - 1.0), 1e-14);
  EXPECT_LT(std::abs(L.coeff(0) - beta), 1e-14);
  EXPECT_LT(std::abs(L.coeff(-1) - (beta * beta + delta * delta / 2.0 - t)), 1e-14);
}

TEST(Laurent, ZeroNumerator) {
  const BranchedRadical rad({-2.0, 2.0});
  EXPECT_TRUE(laurent_at_infinity(Polynomial(), rad, 3).is_zero());
  EXPECT_TRUE(oplus_part(Polynomial(), rad).is_zero());
}

TEST(Laurent, MatchesCauchyProductOracle) {
  const std::vector<cplx> a{{-0.7, -1.7}, {-0.7, 1.7}, {0.7, -0.2}, {0.7, 0.2}, {1.3, 0.4}, {-0.1, 0.9}};
  const BranchedRadical rad(a);
  const Polynomial num({{0.3, 1}, {-2, 0.5}, 0.0, {1, 0}, {0.2, -0.1}});
  const int depth = 8;
  for (double alpha : {-0.5, 0.5}) {
    const auto f = product_series_oracle(a, alpha, 20);
    const int e = alpha < 0 ? -3 : 3;
    const LaurentSeries L = alpha < 0 ? laurent_at_infinity(num, rad, depth) : laurent_times_w(num, rad, depth);
    for (int p = L.top_degree(); p >= -depth; --p) {
      cplx want = 0.0;
      for (int k = 0; k <= num.degree(); ++k) {
        const int m = k + e - p;
        if (m >= 0) want += num.coeff(k) * f[m];
      }
      EXPECT_LT(std::abs(L.coeff(p) - want), 1e-12 * (1.0 + std::abs(want))) << "power " << p;
    }
  }
}

TEST(Oplus, Examples) {
  const Polynomial g = oplus_part(Polynomial({0.0, 1.0}), BranchedRadical({-2.0, 2.0}));
  ASSERT_EQ(g.degree(), 0);
  EXPECT_LT(std::abs(g.coeff(0) - 1.0), 1e-15);

  const cplx t(-1.1, 0.0), beta(0.3, 0.1), delta(0.1, 1.4);
  const Polynomial h = oplus_part(Polynomial({-t, 0.0, 1.0}), BranchedRadical({beta - delta, beta + delta}));
  ASSERT_EQ(h.degree(), 1);
  EXPECT_LT(std::abs(h.coeff(1) - 1.0), 1e-15);
  EXPECT_LT(std::abs(h.coeff(0) - beta), 1e-14);

  const Polynomial h2 = oplus_part(Polynomial({-t, 0.0, 1.0}),
                                   BranchedRadical({{-0.6667, -1.7448}, {-0.6667, 1.7448}, {0.6667, -0.2110}, {0.6667, 0.2110}}));
  ASSERT_EQ(h2.degree(), 0);
  EXPECT_LT(std::abs(h2.coeff(0) - 1.0), 1e-15);

  EXPECT_TRUE(oplus_part(Polynomial({1.0}), BranchedRadical({-2.0, 2.0})).is_zero());
}

TEST(Oplus, RemainderDecaysLikeInverseZ) {
  const BranchedRadical rad({{-1, -1}, {1, 2}, {0.5, -0.3}, {2, 1}});
  const Polynomial num({{1, 1}, 0.0, {-2, 0}, 0.5, {0.1, 0.3}});
  const Polynomial plus = oplus_part(num, rad);
  const cplx dir = std::polar(1.0, 0.37);
  auto rem = [&](double R) {
    const cplx z = R * dir;
    return std::abs(num(z) / eval_w(rad, z) - plus(z));
  };
  const double r3 = rem(1e3), r4 = rem(1e4);
  EXPECT_NEAR(r3 / r4, 10.0, 0.5);
}

TEST(Quadrature, GaussRuleIntegratesPolynomialsExactly) {
  const auto& g = gauss20();
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], 39);
  EXPECT_NEAR(s, 1.0 / 40.0, 1e-15);
}

TEST(Quadrature, InverseSquareRootEndpoints) {
  // int_{-1}^{1} dx / sqrt(1 - x^2) = pi
  const cplx v = integrate_segment<cplx>(-1.0, 1.0, [](const SegmentNode& n) {
    return 1.0 / (2.0 * std::sqrt(n.s * n.one_minus_s));
  });
  EXPECT_NEAR(v.real(), pi, 1e-12);
}
