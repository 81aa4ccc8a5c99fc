#include <gtest/gtest.h>

#include "scurve/twocut.hpp"

using namespace scurve;

namespace {

struct Chain {
  std::vector<TwoCutSolution> sols;  // t = -1.02, -1.1, -1.5
};

const Chain& chain() {
  static const Chain c = [] {
    const OneCutSolution one = solve_cubic_branch(-1.02, 0);
    return Chain{continue_in_t({-1.02, -1.1, -1.5}, solve_from_onecut(-1.02, one))};
  }();
  return c;
}

double residual_norm(cplx t, const TwoCutSolution& s) {
  double acc = 0.0;
  for (double v : residual(t, s)) acc += v * v;
  return std::sqrt(acc);
}

// Distance between endpoint sets, matched greedily.
double set_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (cplx x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST(TwoCutNewton, SplitSeedConvergesToConjugateClosedSet) {
  const TwoCutSolution& s = chain().sols[0];
  EXPECT_LT(s.residual_norm, 1e-10);
  std::vector<cplx> conj;
  for (cplx e : s.endpoints()) conj.push_back(std::conj(e));
  EXPECT_LT(set_distance(s.endpoints(), conj), 1e-8);
  EXPECT_GT(std::abs(s.c - s.d), 1e-3);
}

TEST(TwoCutNewton, ContinuationToMinus1_5) {
  const auto& sols = chain().sols;
  ASSERT_EQ(sols.size(), 3u);
  const cplx ts[3] = {-1.02, -1.1, -1.5};
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(residual_norm(ts[i], sols[static_cast<std::size_t>(i)]), 1e-10);
    EXPECT_LT(std::abs(sols[static_cast<std::size_t>(i)].a + sols[static_cast<std::size_t>(i)].b +
                       sols[static_cast<std::size_t>(i)].c + sols[static_cast<std::size_t>(i)].d),
              1e-10);
  }
}

TEST(TwoCutNewton, SchwarzSymmetryForRealT) {
  for (const auto& s : chain().sols) {
    std::vector<cplx> conj;
    for (cplx e : s.endpoints()) conj.push_back(std::conj(e));
    EXPECT_LT(set_distance(s.endpoints(), conj), 1e-8);
  }
}

TEST(TwoCutNewton, AsymptoticsAtLargeZ) {
  for (std::size_t i = 0; i < 3; ++i) {
    const cplx t = std::array<cplx, 3>{-1.02, -1.1, -1.5}[i];
    const TwoCutSolution& s = chain().sols[i];
    const SpectralCurve c = twocut_curve(s);
    const Polynomial Wp = cubic_potential(t).derivative();
    const Polynomial f = c.y2_poly() - Wp * Wp;
    // y - W' + 2/z = O(z^-2): z^2 times it stays bounded at |z| = 1e4.
    const cplx z = std::polar(1e4, 0.4);
    const cplx y_minus = f(z) / (c.y(z) + Wp(z));
    EXPECT_LT(std::abs(z * (z * y_minus + 2.0)), 10.0);
  }
}

TEST(TwoCutNewton, HermitianSeedStaysOnRealAxisWithZeroR) {
  const double t = 3.0, q = std::sqrt(t);
  const TwoCutSolution s = newton_solve(t, {-q - 0.6, -q + 0.6, q - 0.6, q + 0.6});
  for (cplx e : s.endpoints()) EXPECT_LT(std::abs(e.imag()), 1e-10);
  EXPECT_NEAR(s.r, 0.0, 1e-8);
}

TEST(TwoCutNewton, CollisionIsReported) {
  const TwoCutSolution& s = chain().sols[0];
  TwoCutSolution bad = s;
  bad.c = bad.b + 1e-8;
  EXPECT_THROW(newton_solve(-1.02, bad), Error);
  try {
    newton_solve(-1.02, bad);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EndpointCollision);
  }
}

TEST(Continuation, EndpointMotionIsContinuous) {
  const OneCutSolution one = solve_cubic_branch(-1.02, 0);
  std::vector<cplx> path;
  for (int i = 0; i <= 24; ++i) path.push_back(-1.02 - 0.02 * i);
  const auto sols = continue_in_t(path, solve_from_onecut(-1.02, one));
  for (std::size_t i = 1; i < sols.size(); ++i) {
    const auto p = sols[i - 1].endpoints(), q = sols[i].endpoints();
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(p[k] - q[k]), 10 * 0.02);
  }
}

TEST(Continuation, SmallLoopReturnsToStart) {
  const TwoCutSolution& start = chain().sols[2];
  std::vector<cplx> loop;
  for (int i = 0; i <= 16; ++i) loop.push_back(-1.5 + 0.1 * (std::polar(1.0, 2 * pi * i / 16) - 1.0));
  const auto sols = continue_in_t(loop, start);
  const auto a = start.endpoints(), b = sols.back().endpoints();
  for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(a[k] - b[k]), 1e-6);
}

TEST(Periods, ConjugateClosedConfigurationGivesRealOrImaginaryA0) {
  const TwoCutSolution& s = chain().sols[1];
  const cplx A0 = cubic_periods(s, 0).first;
  EXPECT_LT(std::min(std::abs(A0.real()), std::abs(A0.imag())), 1e-10 * std::abs(A0));
}

TEST(Periods, LogarithmicGrowthAsPairMerges) {
  // A_0 ~ alpha log(gap) + beta: successive halvings change it by a constant.
  std::vector<double> mags;
  for (int k = 0; k < 5; ++k) {
    const double eps = 1e-2 / std::pow(2.0, k);
    const TwoCutSolution s{-2.0, cplx(-1.0, 0.1), cplx(1.0, 0.0) - eps, cplx(1.0, 0.0) + eps};
    mags.push_back(std::abs(cubic_periods(s, 0).first));
  }
  std::vector<double> d;
  for (std::size_t k = 1; k < mags.size(); ++k) d.push_back(mags[k] - mags[k - 1]);
  for (double v : d) EXPECT_GT(v, 0.0);
  EXPECT_LT(std::abs(d[3] - d[2]), 0.05 * d[2]);
}

TEST(Periods, NodeDoublingAgreement) {
  const TwoCutSolution& s = chain().sols[2];
  QuadOptions fine;
  fine.base_panels = 2;
  for (int n = 0; n <= 4; ++n) {
    const auto p1 = cubic_periods(s, n), p2 = cubic_periods(s, n, fine);
    EXPECT_LT(std::abs(p1.first - p2.first), 1e-9);
    EXPECT_LT(std::abs(p1.second - p2.second), 1e-9);
  }
  EXPECT_NEAR(compute_r(s, -1.5), compute_r(s, -1.5, fine), 1e-8);
  EXPECT_THROW(cubic_periods(s, 5), Error);
}

TEST(ComputeR, HermitianConfigurationGivesZero) {
  const TwoCutSolution s{-2.2, -0.8, 0.7, 2.3};
  EXPECT_NEAR(compute_r(s, 1.7), 0.0, 1e-8);
}

TEST(ComputeR, AgreesWithGapIntegralAtSolution) {
  const TwoCutSolution& s = chain().sols[1];
  const cplx gap = gap_integral_of_y(s);
  EXPECT_NEAR(gap.real(), 0.0, 1e-9);
  EXPECT_NEAR(gap.imag(), compute_r(s, -1.1), 1e-9);
}

TEST(Residual, ExactSolutionIsSmall) {
  for (double v : residual(-1.1, chain().sols[1])) EXPECT_LT(std::abs(v), 1e-10);
}

TEST(Residual, OneCutLimitReducesToOneCutSystem) {
  const cplx t(0.3, 0.5);
  const OneCutSolution one = solve_cubic_branch(t, 0);
  const auto r = symmetric_residuals(t, one.a, one.b, -one.beta, -one.beta);
  for (cplx v : r) EXPECT_LT(std::abs(v), 1e-12);
}

TEST(Residual, LinearResponseToEndpointPerturbation) {
  const TwoCutSolution s = chain().sols[1];
  TwoCutSolution p = s;
  const double h = 1e-6;
  p.a += h;
  const auto r0 = symmetric_residuals(-1.1, s.a, s.b, s.c, s.d);
  const auto r1 = symmetric_residuals(-1.1, p.a, p.b, p.c, p.d);
  const cplx slope = s.b * s.c + s.b * s.d + s.c * s.d;
  EXPECT_NEAR(std::abs(r1[0] - r0[0]) / h, std::abs(slope), 1e-5);
}

TEST(Charges, ChordChargesSumToOne) {
  for (const auto& s : chain().sols) {
    const auto q = chord_charges(twocut_curve(s));
    ASSERT_EQ(q.size(), 2u);
    EXPECT_LT(std::abs(q[0] + q[1] - 1.0), 1e-8);
  }
}
