#include <gtest/gtest.h>

#include "scurve/onecut.hpp"
#include "scurve/quadrature.hpp"

using namespace scurve;

namespace {

// Wraps an imaginary-part difference into (-pi, pi].
double wrap_2pi(double x) { return std::remainder(x, 2.0 * pi); }

}  // namespace

TEST(CubicBranch, OriginOnBranchZero) {
  const OneCutSolution s = solve_cubic_branch(0.0, 0);
  EXPECT_LT(std::abs(s.beta + 1.0), 1e-12);
  EXPECT_LT(std::abs(s.delta2 + 2.0), 1e-12);
  EXPECT_LT(std::abs(s.a - cplx(-1, -std::sqrt(2.0))), 1e-12);
  EXPECT_LT(std::abs(s.b - cplx(-1, std::sqrt(2.0))), 1e-12);
}

TEST(CubicBranch, BranchPointModulus) {
  for (int k = 0; k < 3; ++k) {
    const cplx tk = cubic_branch_point(k);
    EXPECT_NEAR(std::abs(tk), 3.0 * std::pow(2.0, -2.0 / 3.0), 1e-10);
    EXPECT_LT(std::abs(0.25 - tk * tk * tk / 27.0), 1e-14);
  }
}

TEST(CubicBranch, BranchesOneAndTwoMeetAtRealBranchPoint) {
  const cplx t0 = cubic_branch_point(0);
  EXPECT_LT(std::abs(cubic_beta(t0, 1) - cubic_beta(t0, 2)), 1e-8);
  EXPECT_TRUE(solve_cubic_branch(t0, 1).branch_collision);
  EXPECT_THROW(solve_cubic_branch(t0, 1, true), Error);
}

TEST(CubicBranch, VietaAndResidualOnGrid) {
  for (double x = -3.0; x <= 3.0; x += 0.37) {
    for (double y = -3.0; y <= 3.0; y += 0.41) {
      const cplx t(x, y);
      const cplx b0 = cubic_beta(t, 0), b1 = cubic_beta(t, 1), b2 = cubic_beta(t, 2);
      EXPECT_LT(std::abs(b0 * b1 * b2 + 1.0), 1e-12);
      EXPECT_LT(std::abs(b0 + b1 + b2), 1e-12);
      for (int k = 0; k < 3; ++k) {
        const OneCutSolution s = solve_cubic_branch(t, k);
        EXPECT_LT(s.residual, 1e-12);
        EXPECT_LT(std::abs(2.0 * s.beta * s.beta + s.delta2 - 2.0 * t), 1e-12);
        EXPECT_GE(s.delta().imag(), 0.0);
      }
    }
  }
}

TEST(CubicBranch, SheetPermutationAroundCircleOfRadiusThree) {
  // Continue one root of beta^3 - t beta + 1 twice around |t| = 3 starting on
  // branch 0 just above arg t = 0, recording which principal branch it matches.
  const double dth = 1e-2;
  const int steps = static_cast<int>(std::ceil(4 * pi / dth));
  const double th0 = 1e-3;
  cplx beta = cubic_beta(std::polar(3.0, th0), 0);
  std::vector<int> labels{0};
  std::vector<double> switch_angles;
  for (int i = 1; i <= steps; ++i) {
    const double th = th0 + 4 * pi * i / steps;
    const cplx t = std::polar(3.0, th);
    for (int it = 0; it < 20; ++it) beta -= (beta * beta * beta - t * beta + 1.0) / (3.0 * beta * beta - t);
    int label = -1;
    for (int j = 0; j < 3; ++j)
      if (std::abs(beta - cubic_beta(t, j)) < 1e-8) label = j;
    ASSERT_GE(label, 0);
    if (label != labels.back()) {
      labels.push_back(label);
      switch_angles.push_back(th);
    }
  }
  EXPECT_EQ(labels, (std::vector<int>{0, 1, 2, 0}));
  ASSERT_EQ(switch_angles.size(), 3u);
  EXPECT_NEAR(switch_angles[0], 2 * pi / 3, 2 * dth);
  EXPECT_NEAR(switch_angles[1], 2 * pi, 2 * dth);
  EXPECT_NEAR(switch_angles[2], 10 * pi / 3, 2 * dth);
}

TEST(CubicBranch, DashedCutTakesValueFromBelow) {
  const double r = 2.5;
  for (double arg : {0.0, 2 * pi / 3}) {
    for (int k = 0; k < 3; ++k) {
      const cplx on = cubic_beta(std::polar(r, arg), k);
      const cplx below = cubic_beta(std::polar(r, arg - 1e-9), k);
      EXPECT_LT(std::abs(on - below), 1e-6);
    }
  }
}

TEST(OneCutGeneral, Gaussian) {
  const OneCutSolution s = solve_onecut_general(gaussian_potential(), make_onecut(0.3, 3.0));
  EXPECT_LT(std::abs(s.a + 2.0), 1e-12);
  EXPECT_LT(std::abs(s.b - 2.0), 1e-12);
}

TEST(OneCutGeneral, AgreesWithCubicClosedForm) {
  const OneCutSolution ref = solve_cubic_branch(0.0, 0);
  const OneCutSolution s = solve_onecut_general(cubic_potential(0.0), make_onecut(-0.9, cplx(-1.8, 0.2)));
  EXPECT_LT(std::abs(s.beta - ref.beta), 1e-10);
  EXPECT_LT(std::abs(s.delta2 - ref.delta2), 1e-10);
}

TEST(OneCutGeneral, CubicResidualsAtComplexT) {
  const cplx t(1.0, 1.0);
  const OneCutSolution seed = solve_cubic_branch(t, 0);
  const OneCutSolution s = solve_onecut_general(cubic_potential(t), make_onecut(seed.beta * 1.05, seed.delta2 * 0.95));
  // Direct substitution into 2 beta^2 + delta^2 = 2t and beta delta^2 = 2.
  EXPECT_LT(std::abs(2.0 * s.beta * s.beta + s.delta2 - 2.0 * t), 1e-10);
  EXPECT_LT(std::abs(s.beta * s.delta2 - 2.0), 1e-10);
}

TEST(OneCutGeneral, QuarticPotentialHasCorrectAsymptotics) {
  const Polynomial W({0.0, 0.0, cplx(-0.5, 0.2), 0.0, 0.25});
  const OneCutSolution s = solve_onecut_general(W, make_onecut(0.0, 8.0));
  const SpectralCurve c = onecut_curve(W, s);
  const cplx z = std::polar(1e4, 0.3);
  const Polynomial Wp = W.derivative();
  const Polynomial f = c.y2_poly() - Wp * Wp;
  const cplx y_minus = f(z) / (c.y(z) + Wp(z));
  EXPECT_LT(std::abs(z * y_minus + 2.0), 1e-6);
}

TEST(GOneCut, VanishesAtEndpoints) {
  const OneCutSolution s = solve_cubic_branch(cplx(0.3, -0.4), 0);
  const Polynomial W = cubic_potential(cplx(0.3, -0.4));
  const cplx e(1e-8, 1e-8);
  EXPECT_LT(std::abs(g_onecut(s.a + e, W, s)), 1e-5);
  EXPECT_LT(std::abs(g_onecut(s.b + e, W, s).real()), 1e-5);
}

TEST(GOneCut, GaussianMatchesQuadratureOnRealAxis) {
  const OneCutSolution s = make_onecut(0.0, 4.0);
  for (double x : {2.5, 3.0, 5.0}) {
    const cplx G = g_onecut(x, gaussian_potential(), s);
    const cplx oracle = integrate_segment<cplx>(2.0, x, [](const SegmentNode& n) {
      return std::sqrt(n.z * n.z - 4.0);
    });
    EXPECT_NEAR(G.real(), oracle.real(), 1e-8);
    EXPECT_NEAR(wrap_2pi(G.imag()), 0.0, 1e-8);
  }
}

TEST(GOneCut, CubicClosedFormAtMinusBeta) {
  const cplx t = 0.0;
  const OneCutSolution s = solve_cubic_branch(t, 0);
  const cplx G = g_onecut(-s.beta, cubic_potential(t), s);
  const cplx closed = g_cubic_at_minus_beta(t, 0);
  EXPECT_NEAR(G.real(), closed.real(), 1e-10);
  EXPECT_NEAR(wrap_2pi(G.imag() - closed.imag()), 0.0, 1e-10);
  for (cplx tt : {cplx(0.7, 0.9), cplx(-0.5, -1.2), cplx(1.5, 0.1)}) {
    for (int k = 0; k < 3; ++k) {
      const OneCutSolution sk = solve_cubic_branch(tt, k);
      const cplx Gk = g_onecut(-sk.beta, cubic_potential(tt), sk);
      EXPECT_NEAR(Gk.real(), g_cubic_at_minus_beta(tt, k).real(), 1e-10);
    }
  }
}

TEST(GOneCut, IndicatorAtCriticalAndOrigin) {
  EXPECT_LT(std::abs(g_cubic_at_minus_beta(-1.00054, 0).real()), 1e-3);
  EXPECT_GT(std::abs(g_cubic_at_minus_beta(0.0, 0).real()), 0.1);
}

TEST(GOneCut, ConjugationEquivariance) {
  // beta_0 is real-analytic away from its cuts; beta_1 and beta_2 swap.
  for (cplx t : {cplx(0.4, 0.8), cplx(-1.7, 0.6), cplx(-0.2, -2.1)}) {
    const cplx g0 = g_cubic_at_minus_beta(t, 0);
    const cplx g0c = g_cubic_at_minus_beta(std::conj(t), 0);
    EXPECT_NEAR(g0.real(), g0c.real(), 1e-10);
    const cplx g1 = g_cubic_at_minus_beta(t, 1);
    const cplx g2c = g_cubic_at_minus_beta(std::conj(t), 2);
    EXPECT_NEAR(g1.real(), g2c.real(), 1e-10);
  }
}
