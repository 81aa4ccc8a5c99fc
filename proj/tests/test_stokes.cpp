#include <gtest/gtest.h>

#include "scurve/onecut.hpp"
#include "scurve/stokes.hpp"
#include "scurve/twocut.hpp"

using namespace scurve;

namespace {

SpectralCurve gaussian_curve() { return onecut_curve(gaussian_potential(), make_onecut(0.0, 4.0)); }

SpectralCurve cubic_onecut(cplx t) { return onecut_curve(cubic_potential(t), solve_cubic_branch(t, 0)); }

// Two-cut curve at t = -1.1 with its pairs set to the traced cuts.
SpectralCurve twocut_curve_minus_1_1() {
  const OneCutSolution one = solve_cubic_branch(-1.02, 0);
  const TwoCutSolution s = continue_in_t({-1.02, -1.1}, solve_from_onecut(-1.02, one)).back();
  const SpectralCurve raw = twocut_curve(s);
  const RootSet rs = RootSet::of(raw);
  const auto m = short_matchings(rs, trace_all(raw));
  EXPECT_EQ(m.size(), 1u);
  std::vector<cplx> e;
  for (auto [p, q] : m.at(0)) {
    cplx lo = rs.roots[static_cast<std::size_t>(p)].z, hi = rs.roots[static_cast<std::size_t>(q)].z;
    if (lo.imag() > hi.imag()) std::swap(lo, hi);
    e.push_back(lo);
    e.push_back(hi);
  }
  return twocut_curve(TwoCutSolution::from(e));
}

int count_shorts(const std::vector<StokesLine>& lines, int p, int q) {
  int n = 0;
  for (const auto& l : lines)
    if (l.origin_index == p && l.terminal == Terminal::Short && l.target_index == q) ++n;
  return n;
}

}  // namespace

TEST(InitialDirections, SimpleRootHasThreeEquallySpaced) {
  const auto d = initial_directions(cplx(0.3, 1.1), 1);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[1] - d[0], 2 * pi / 3, 1e-14);
  EXPECT_NEAR(d[2] - d[1], 2 * pi / 3, 1e-14);
}

TEST(InitialDirections, DoubleRootHasFour) { EXPECT_EQ(initial_directions(cplx(1.0, 0.0), 2).size(), 4u); }

TEST(InitialDirections, LeadingOrderRealPartVanishes) {
  // Oracle: int_0^r K^(1/2) u^(m/2) e^(i m theta/2) e^(i theta) du has zero real part.
  for (int m : {1, 2}) {
    const cplx K(0.7, -1.9);
    for (double th : initial_directions(K, m)) {
      const cplx v = std::sqrt(K) * std::polar(1.0, (0.5 * m + 1.0) * th);
      EXPECT_LT(std::abs(v.real()), 1e-14);
    }
  }
}

TEST(InitialDirections, GaussianRootPointsAlongRealAxis) {
  // Near z = 2, y ~ 2 (z - 2)^(1/2): one direction is pi, toward -2.
  const Polynomial y2 = gaussian_curve().y2_poly();
  const auto d = initial_directions(y2, 2.0, 1);
  EXPECT_NEAR(std::abs(local_coefficient(y2, 2.0, 1) - 4.0), 0.0, 1e-12);
  bool found = false;
  for (double th : d) found = found || std::abs(std::remainder(th - pi, 2 * pi)) < 1e-12;
  EXPECT_TRUE(found);
}

TEST(TraceLine, GaussianShortFollowsTheRealSegment) {
  const SpectralCurve c = gaussian_curve();
  const RootSet rs = RootSet::of(c);
  const int from = root_index(rs, -2.0), to = root_index(rs, 2.0);
  const auto lines = trace_all(c);
  const auto l = find_short(lines, from, to);
  ASSERT_TRUE(l.has_value());
  for (cplx z : l->samples) EXPECT_LT(std::abs(z.imag()), 1e-6);
  EXPECT_LT(std::abs(l->samples.back() - 2.0), 1e-12);
}

TEST(TraceLine, CubicOneCutShortsAtZeroAndMinus0_9) {
  for (double t : {0.0, -0.9}) {
    const SpectralCurve c = cubic_onecut(t);
    const RootSet rs = RootSet::of(c);
    const OneCutSolution s = solve_cubic_branch(t, 0);
    const int a = root_index(rs, s.a), b = root_index(rs, s.b);
    const auto lines = trace_all(c);
    EXPECT_EQ(count_shorts(lines, a, b), 1) << "t=" << t;
    EXPECT_EQ(count_shorts(lines, b, a), 1) << "t=" << t;
  }
}

TEST(TraceLine, NoShortBetweenEndpointsPastCritical) {
  const SpectralCurve c = cubic_onecut(-1.1);
  const RootSet rs = RootSet::of(c);
  const OneCutSolution s = solve_cubic_branch(-1.1, 0);
  const auto lines = trace_all(c);
  EXPECT_EQ(count_shorts(lines, root_index(rs, s.a), root_index(rs, s.b)), 0);
  EXPECT_EQ(count_shorts(lines, root_index(rs, s.b), root_index(rs, s.a)), 0);
}

TEST(TraceLine, StepBudgetExhaustionIsReported) {
  const SpectralCurve c = cubic_onecut(0.0);
  const RootSet rs = RootSet::of(c);
  StokesOptions opt;
  opt.max_steps = 3;
  const auto d = initial_directions(c.y2_poly(), rs.roots[0].z, 1);
  EXPECT_THROW(trace_line(c, rs, 0, d[0], 0, opt), Error);
}

TEST(StokesProperties, LevelSetFidelityAndNoLoops) {
  for (const SpectralCurve& c : {gaussian_curve(), cubic_onecut(0.0), cubic_onecut(cplx(-0.5, 0.8)), twocut_curve_minus_1_1()}) {
    for (const auto& l : trace_all(c)) {
      double gscale = 0.0;
      for (cplx g : l.G) gscale = std::max(gscale, std::abs(g));
      for (cplx g : l.G) EXPECT_LT(std::abs(g.real()), 1e-6 * (1.0 + gscale));
      EXPECT_FALSE(self_intersects(l.samples));
      for (std::size_t i = 1; i < l.samples.size(); ++i) EXPECT_LE(std::abs(l.samples[i] - l.samples[i - 1]), 0.11);
    }
  }
}

TEST(StokesProperties, ShortsAreSymmetric) {
  for (const SpectralCurve& c : {cubic_onecut(0.0), cubic_onecut(cplx(-0.5, 0.8)), twocut_curve_minus_1_1()}) {
    const auto lines = trace_all(c);
    for (const auto& l : lines) {
      if (l.terminal != Terminal::Short) continue;
      const auto back = find_short(lines, l.target_index, l.origin_index);
      ASSERT_TRUE(back.has_value());
      EXPECT_LT(hausdorff(l.samples, back->samples), 1e-5);
    }
  }
}

TEST(Density, GaussianSemicircle) {
  const CutAnalysis an = analyze_cuts(gaussian_curve());
  ASSERT_TRUE(an.branch.has_value());
  ASSERT_EQ(an.cuts.size(), 1u);
  const CutCandidate& c = an.cuts[0];
  EXPECT_TRUE(c.positive);
  EXPECT_NEAR(c.charge, 1.0, 1e-8);
  for (auto [z, rho] : c.density_samples) {
    const double x = z.real();
    EXPECT_NEAR(rho, std::sqrt(std::abs(x * x - 4.0)) / (2 * pi), 1e-6);
  }
}

TEST(Density, SquareRootVanishingAtEndpoints) {
  // rho / sqrt(distance to endpoint) tends to a constant.
  const CutAnalysis an = analyze_cuts(cubic_onecut(0.0));
  ASSERT_EQ(an.cuts.size(), 1u);
  const auto& line = an.cuts[0].line;
  const cplx a = line.samples.front();
  std::vector<double> ratios;
  for (double d : {1e-3, 2e-3, 4e-3}) {
    std::size_t k = 1;
    while (std::abs(line.samples[k] - a) < d) ++k;
    const cplx z = line.samples[k];
    const cplx T = (line.samples[k + 1] - line.samples[k - 1]) / std::abs(line.samples[k + 1] - line.samples[k - 1]);
    const double rho = (an.branch->y(z + 1e-9 * I * T) * T / (2 * pi * I)).real();
    ratios.push_back(rho / std::sqrt(std::abs(z - a)));
  }
  EXPECT_NEAR(ratios[0] / ratios[2], 1.0, 0.02);
}

TEST(Density, ImaginaryPartOfGIsMonotoneOnPositiveCuts) {
  for (const SpectralCurve& c : {cubic_onecut(0.0), twocut_curve_minus_1_1()}) {
    const CutAnalysis an = analyze_cuts(c);
    for (const auto& cut : an.cuts) {
      ASSERT_TRUE(cut.positive);
      const auto& G = cut.line.G;
      const double dir = (G.back() - G.front()).imag() > 0 ? 1.0 : -1.0;
      for (std::size_t i = 1; i < G.size(); ++i) EXPECT_GT(dir * (G[i] - G[i - 1]).imag(), 0.0);
    }
  }
}

TEST(Density, TwoCutChargesSumToOne) {
  const SpectralCurve c = twocut_curve_minus_1_1();
  const CutAnalysis an = analyze_cuts(c);
  ASSERT_TRUE(an.all_positive());
  ASSERT_EQ(an.cuts.size(), 2u);
  // Oracle: the 1/z coefficient of y - W' is -2, i.e. total charge 1.
  // Richardson on z (y - W') = c1 + c2 / z + ... at |z| = R and 2R.
  const Polynomial Wp = cubic_potential(-1.1).derivative();
  const Polynomial f = c.y2_poly() - Wp * Wp;
  auto v = [&](cplx z) { return z * f(z) / (c.y(z) + Wp(z)); };
  const cplx z = std::polar(1e4, 0.3);
  ASSERT_LT(std::abs(2.0 * v(2.0 * z) - v(z) + 2.0), 1e-6);
  EXPECT_NEAR(an.cuts[0].charge + an.cuts[1].charge, 1.0, 1e-6);
}

TEST(SignMap, GaussianRealAxisOutsideCutIsPositive) {
  const SpectralCurve c = gaussian_curve();
  const CutAnalysis an = analyze_cuts(c);
  const SignMap m = sign_map(*an.branch, default_bbox(c), 64, 64);
  int i, j;
  for (double x : {-2.4, -2.2, 2.2, 2.4}) {
    ASSERT_TRUE(m.cell_of(cplx(x, 0.01), i, j));
    EXPECT_EQ(m.at(i, j), 1) << x;
  }
  // Next to the cut on either side.
  for (double x : {-1.0, 0.0, 1.0}) {
    for (double y : {0.1, -0.1}) {
      ASSERT_TRUE(m.cell_of(cplx(x, y), i, j));
      EXPECT_EQ(m.at(i, j), -1);
    }
  }
}

TEST(SignMap, FarFieldOnSectorBisectorsIsPositive) {
  const SpectralCurve c = cubic_onecut(0.0);
  const CutAnalysis an = analyze_cuts(c);
  const BBox box = default_bbox(c);
  const SignMap m = sign_map(*an.branch, box, 64, 64);
  for (int k = 0; k < 3; ++k) {
    const cplx z = std::polar(0.9 * box.x1, sector_angle(k));
    ASSERT_GT(std::real(z * z * z / 3.0), 0.0);  // Re W dominates there
    int i, j;
    ASSERT_TRUE(m.cell_of(z, i, j));
    EXPECT_EQ(m.at(i, j), 1) << k;
  }
}

TEST(SignMap, BoundaryCellsStraddleZeroOfClosedFormG) {
  // Oracle: Re G from the closed one-cut formula, mapped to the true branch
  // by the lens parity. Every +/- neighbour pair must bracket a zero.
  struct Case {
    Polynomial W;
    OneCutSolution s;
  };
  for (const Case& k : {Case{gaussian_potential(), make_onecut(0.0, 4.0)}, Case{cubic_potential(0.0), solve_cubic_branch(0.0, 0)},
                        Case{cubic_potential(cplx(-0.5, 0.8)), solve_cubic_branch(cplx(-0.5, 0.8), 0)}}) {
    const SpectralCurve c = onecut_curve(k.W, k.s);
    const CutAnalysis an = analyze_cuts(c);
    ASSERT_TRUE(an.branch.has_value());
    const SignMap m = sign_map(*an.branch, default_bbox(c), 64, 64);
    auto oracle = [&](cplx z) { return an.branch->parity(z) * g_onecut(z, k.W, k.s).real(); };
    int pairs = 0;
    for (int j = 0; j < m.ny; ++j) {
      for (int i = 0; i + 1 < m.nx; ++i) {
        if (m.at(i, j) * m.at(i + 1, j) != -1) continue;
        const double f0 = oracle(m.center(i, j)), f1 = oracle(m.center(i + 1, j));
        EXPECT_LT(f0 * f1, 0.0) << m.center(i, j);
        EXPECT_EQ(f0 > 0 ? 1 : -1, m.at(i, j));
        ++pairs;
      }
    }
    EXPECT_GT(pairs, 0);
  }
}

TEST(SignMap, RejectsCoarseResolution) {
  const SpectralCurve c = gaussian_curve();
  const CutAnalysis an = analyze_cuts(c);
  EXPECT_THROW(sign_map(*an.branch, default_bbox(c), 32, 32), Error);
}

TEST(SignMap, PgmExport) {
  const SpectralCurve c = gaussian_curve();
  const CutAnalysis an = analyze_cuts(c);
  const std::string pgm = to_pgm(sign_map(*an.branch, default_bbox(c), 64, 64));
  EXPECT_EQ(pgm.rfind("P2\n64 64\n255\n", 0), 0u);
}

TEST(Embedding, CubicAtOriginReachesSectorsOneAndTwo) {
  const SpectralCurve c = cubic_onecut(0.0);
  const CutAnalysis an = analyze_cuts(c);
  const EmbeddingReport r = embed_s_curve(an.cuts, *an.branch, {1, 2});
  EXPECT_TRUE(r.embeddable) << r.reason;
  EXPECT_FALSE(r.gamma.empty());
  // Gamma runs from the upper-left sector to the lower-left one.
  EXPECT_GT(r.gamma.front().imag(), 0.0);
  EXPECT_LT(r.gamma.back().imag(), 0.0);
}

TEST(Embedding, OneCutBranchPastCriticalIsNotEmbeddable) {
  const SpectralCurve c = cubic_onecut(-1.1);
  const CutAnalysis an = analyze_cuts(c);
  EXPECT_FALSE(an.branch.has_value());
  const EmbeddingReport r = embed_on_map(an.cuts, SignMap{}, {1, 2});
  EXPECT_FALSE(r.embeddable);
}

TEST(Embedding, TwoCutAtMinus1_1IsEmbeddable) {
  const SpectralCurve c = twocut_curve_minus_1_1();
  const CutAnalysis an = analyze_cuts(c);
  const EmbeddingReport r = embed_s_curve(an.cuts, *an.branch, {1, 2});
  EXPECT_TRUE(r.embeddable) << r.reason;
  EXPECT_EQ(r.endpoint_order.size(), 4u);
}
