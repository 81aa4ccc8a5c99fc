// acceptance: one PASS/FAIL line per acceptance criterion 1-9.
//
// Usage: acceptance [criterion...]   (default: all). Exit status 1 if any
// selected criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "scurve/abelian.hpp"
#include "scurve/onecut.hpp"
#include "scurve/orthopoly.hpp"
#include "scurve/phase.hpp"
#include "scurve/stokes.hpp"
#include "scurve/twocut.hpp"

using namespace scurve;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [fail: " << what << "]";
    }
  }
  template <class T>
  void note(const std::string& key, const T& v) {
    notes << " " << key << "=" << v;
  }
};

std::vector<cplx> segment(cplx a, cplx b, int n) {
  std::vector<cplx> p;
  for (int i = 0; i <= n; ++i) p.push_back(a + (b - a) * (static_cast<double>(i) / n));
  return p;
}

const TwoCutCatalogue& catalogue() {
  static const TwoCutCatalogue c = TwoCutCatalogue::standard();
  return c;
}

TwoCutSolution twocut_at(cplx t) { return solve_twocut(t, {}, catalogue()).front(); }

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (cplx x : v) m = std::max(m, std::abs(x));
  return m;
}

// Worst distance from each point to the conjugate of its nearest partner.
double conjugate_closure(const std::vector<cplx>& e) {
  double worst = 0.0;
  for (cplx x : e) {
    double best = 1e300;
    for (cplx y : e) best = std::min(best, std::abs(std::conj(x) - y));
    worst = std::max(worst, best);
  }
  return worst;
}

void gaussian(Outcome& o) {
  const OneCutSolution s = solve_onecut_general(gaussian_potential(), make_onecut(0.3, 3.0));
  const double ends = std::max(std::abs(s.a + 2.0), std::abs(s.b - 2.0));
  o.note("endpoint_err", ends);
  o.check(ends < 1e-12, "endpoints +-2");
  const CutAnalysis an = analyze_cuts(onecut_curve(gaussian_potential(), s));
  o.check(an.cuts.size() == 1 && an.all_positive(), "one positive cut");
  if (an.cuts.size() != 1) return;
  double worst = 0.0;
  for (auto [z, rho] : an.cuts[0].density_samples) {
    const double x = z.real();
    worst = std::max(worst, std::abs(rho - std::sqrt(std::abs(x * x - 4.0)) / (2 * pi)));
  }
  o.note("density_err", worst);
  o.note("charge_err", std::abs(an.cuts[0].charge - 1.0));
  o.check(worst < 1e-8, "semicircle pointwise");
  o.check(std::abs(an.cuts[0].charge - 1.0) < 1e-8, "total charge");
}

void cubic_onecut(Outcome& o) {
  const double beta_err = std::abs(solve_cubic_branch(0.0, 0).beta + 1.0);
  o.note("beta0_err", beta_err);
  o.check(beta_err < 1e-12, "beta_0(0) = -1");
  double mod = 0.0;
  for (int k = 0; k < 3; ++k) mod = std::max(mod, std::abs(std::abs(cubic_branch_point(k)) - 3.0 * std::pow(2.0, -2.0 / 3.0)));
  o.note("modulus_err", mod);
  o.check(mod < 1e-10, "|t^(k)|");

  // Continue beta_0 twice around |t| = 3 and record the principal branch it matches.
  const double dth = 1e-2, th0 = 1e-3;
  const int steps = static_cast<int>(std::ceil(4 * pi / dth));
  cplx beta = cubic_beta(std::polar(3.0, th0), 0);
  std::vector<int> labels{0};
  for (int i = 1; i <= steps; ++i) {
    const cplx t = std::polar(3.0, th0 + 4 * pi * i / steps);
    for (int it = 0; it < 20; ++it) beta -= (beta * beta * beta - t * beta + 1.0) / (3.0 * beta * beta - t);
    int label = -1;
    for (int j = 0; j < 3; ++j)
      if (std::abs(beta - cubic_beta(t, j)) < 1e-8) label = j;
    if (label < 0) {
      o.check(false, "continued root off every branch");
      return;
    }
    if (label != labels.back()) labels.push_back(label);
  }
  std::string seq;
  for (int l : labels) seq += std::to_string(l);
  o.note("sheet_sequence", seq);
  o.check(labels == std::vector<int>{0, 1, 2, 0}, "sheet permutation 0->1->2->0");
}

void critical_point(Outcome& o) {
  const cplx tc = critical_t_on_ray(0, pi);
  o.note("t_c", tc.real());
  o.check(std::abs(tc - cplx(-1.00054, 0.0)) < 5e-4, "t_c in -1.00054 +- 5e-4");
}

void twocut_minus_1_1(Outcome& o) {
  const cplx t = -1.1;
  const TwoCutSolution s = twocut_at(t);
  const auto e = s.endpoints();
  const double conj = conjugate_closure(e), sum = std::abs(s.a + s.b + s.c + s.d);
  const auto an = analyze_cuts(twocut_curve(s));
  double charge = 0.0;
  for (const auto& c : an.cuts) charge += c.charge;
  const double r_periods = compute_r(s, t), r_abelian = solve_r(e, cubic_potential(t)).at(0);
  o.note("residual", s.residual_norm);
  o.note("conj_err", conj);
  o.note("sum", sum);
  o.note("charge", charge);
  o.note("r_diff", std::abs(r_periods - r_abelian));
  o.check(s.residual_norm < 1e-10, "residual_norm");
  o.check(conj < 1e-8, "conjugate-closed");
  o.check(sum < 1e-10, "a+b+c+d = 0");
  o.check(an.cuts.size() == 2 && std::abs(charge - 1.0) < 1e-6, "total charge over two cuts");
  o.check(std::abs(r_periods - r_abelian) < 1e-6, "r by both routes");
}

void intrinsic(Outcome& o) {
  double worst = 0.0;
  int configs = 0;
  const std::vector<std::pair<cplx, int>> one{{0.0, 0}, {-0.9, 0}, {cplx(0.5, 0.5), 0}, {cplx(-1.5, 1.7), 1}, {cplx(-1.5, -1.7), 2}};
  for (auto [t, k] : one) {
    worst = std::max(worst, max_abs(ce_residual(solve_cubic_branch(t, k).endpoints(), cubic_potential(t), {})));
    ++configs;
  }
  for (cplx t : {cplx(-1.1), cplx(-1.3), cplx(-1.5), cplx(-1.5, 1.0), cplx(-1.5, -1.0)}) {
    const TwoCutSolution s = twocut_at(t);
    worst = std::max(worst, max_abs(ce_residual(s.endpoints(), cubic_potential(t), {s.r})));
    ++configs;
  }
  o.note("configs", configs);
  o.note("ce_max", worst);
  o.check(worst < 1e-6, "ce residuals");

  // Hermitian two-cut configuration at real t = 3: real endpoints, r = 0.
  const double q = std::sqrt(3.0);
  const TwoCutSolution h = newton_solve(3.0, {-q - 0.6, -q + 0.6, q - 0.6, q + 0.6});
  const double ceh = max_abs(ce_residual(h.endpoints(), cubic_potential(3.0), {0.0}));
  o.note("hermitian_r", h.r);
  o.note("ceh_max", ceh);
  o.check(std::abs(h.r) < 1e-8 && ceh < 1e-6, "hermitian case with r = 0");
}

void stokes_structure(Outcome& o) {
  double spacing = 0.0;
  for (const SpectralCurve& c : {onecut_curve(cubic_potential(0.0), solve_cubic_branch(0.0, 0)),
                                 twocut_curve(twocut_at(-1.1))}) {
    const auto lines = trace_all(c);
    std::map<int, std::vector<double>> angles;
    for (const auto& l : lines) angles[l.origin_index].push_back(l.start_angle);
    const RootSet rs = RootSet::of(c);
    for (auto& [idx, a] : angles) {
      if (rs.roots[static_cast<std::size_t>(idx)].multiplicity != 1) continue;
      std::sort(a.begin(), a.end());
      if (a.size() != 3) {
        o.check(false, "simple root without three lines");
        continue;
      }
      for (std::size_t i = 0; i < 3; ++i) {
        const double d = std::remainder(a[(i + 1) % 3] - a[i], 2 * pi);
        spacing = std::max(spacing, std::abs(std::abs(d) - 2 * pi / 3));
      }
    }
  }
  o.note("spacing_err", spacing);
  o.check(spacing < 1e-6, "direction spacing 2pi/3");

  std::string fig3;
  for (double t : {0.0, -0.9, -1.1}) {
    const SpectralCurve c = onecut_curve(cubic_potential(t), solve_cubic_branch(t, 0));
    const RootSet rs = RootSet::of(c);
    const OneCutSolution s = solve_cubic_branch(t, 0);
    const bool has = find_short(trace_all(c), root_index(rs, s.a), root_index(rs, s.b)).has_value();
    fig3 += has ? "S" : "-";
  }
  o.note("short_ab(0,-0.9,-1.1)", fig3);
  o.check(fig3 == "SS-", "short a-b at 0 and -0.9 only");

  const auto split = transition_report(segment(-0.8, -1.3, 10), {1, 2}, {}, catalogue());
  o.note("real_path_events", split.size());
  o.check(split.size() == 1 && split[0].kind == TransitionKind::Split && std::abs(split[0].t + 1.00054) < 5e-4,
          "single split at t_c");

  const auto bd = transition_report(segment(cplx(-1.5, 1.5), cplx(-1.5, -1.5), 60), {1, 2}, {}, catalogue());
  std::string seq;
  for (const auto& e : bd) seq += std::string(seq.empty() ? "" : ",") + to_string(e.kind);
  o.note("vertical_path_events", seq.empty() ? std::string("none") : seq);
  o.check(bd.size() == 2 && bd[0].kind == TransitionKind::Birth && bd[1].kind == TransitionKind::Death,
          "birth then death on -1.5+1.5i -> -1.5-1.5i");
}

void phase_diagram(Outcome& o) {
  const int n = 41;
  PhaseOptions opt;
  opt.base_resolution = 64;
  const auto grid = classify_grid(-3.0, 3.0, -3.0, 3.0, n, n, {1, 2}, opt, catalogue());
  std::map<std::string, int> counts;
  for (const auto& g : grid) ++counts[g.label];
  for (const auto& [k, v] : counts) o.note(k, v);
  o.check(counts["unclassified"] == 0, "every grid point classified");

  // Connected components of two-cut cells (4-neighbour), boundary cells excluded.
  auto at = [&](int i, int j) -> const std::string& { return grid[static_cast<std::size_t>(j) * n + i].label; };
  std::vector<int> comp(grid.size(), -1);
  int ncomp = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (at(i, j) != "2cut" || comp[static_cast<std::size_t>(j) * n + i] >= 0) continue;
      std::vector<std::pair<int, int>> stack{{i, j}};
      comp[static_cast<std::size_t>(j) * n + i] = ncomp;
      while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          const int u = x + dx, v = y + dy;
          if (u < 0 || v < 0 || u >= n || v >= n || at(u, v) != "2cut") continue;
          auto& c = comp[static_cast<std::size_t>(v) * n + u];
          if (c < 0) {
            c = ncomp;
            stack.push_back({u, v});
          }
        }
      }
      ++ncomp;
    }
  o.note("twocut_components", ncomp);
  o.check(ncomp == 1, "one connected two-cut region");
  // -1.1 falls between the nodes x = -1.2 and x = -1.05 on the real axis.
  const int j0 = 20;
  const bool contains = at(12, j0) == "2cut" && at(13, j0) == "2cut";
  o.check(contains, "two-cut region contains -1.1");

  const std::vector<std::pair<cplx, std::string>> samples{
      {0.0, "1cut:0"}, {-1.1, "2cut"}, {cplx(-1.5, 1.5), "1cut:1"}};
  for (const auto& [t, want] : samples) {
    const std::string got = short_label(classify_t(t, {1, 2}, opt, catalogue()));
    std::ostringstream k;
    k << "label(" << t.real() << (t.imag() < 0 ? "" : "+") << t.imag() << "i)";
    o.note(k.str(), got);
    o.check(got == want, k.str() + " expected " + want);
  }
}

void zeros_vs_cuts_check(Outcome& o) {
  const double tube = 0.01;
  auto counts_at = [&](cplx t) {
    const ZeroSet z = zeros_of_pn(recurrence_from_moments(compute_cubic_moments(t, 24, {}, 120)), 24);
    return zeros_vs_cuts(z.zeros, classify_t(t, {1, 2}, {}, catalogue()).cuts);
  };
  auto str = [](const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : "/") + std::to_string(x);
    return s;
  };
  const ZeroCutReport r0 = counts_at(0.0);
  o.note("hausdorff(0)", r0.hausdorff);
  o.check(r0.hausdorff < tube && r0.counts == std::vector<int>{24}, "t = 0 zeros inside the tube");
  const ZeroCutReport r1 = counts_at(-1.1);
  o.note("counts(-1.1)", str(r1.counts));
  o.check(r1.counts == std::vector<int>{12, 12}, "12/12 split at -1.1");
  // Cuts are ordered lower, upper.
  const ZeroCutReport rp = counts_at(cplx(-1.5, 1.0)), rm = counts_at(cplx(-1.5, -1.0));
  o.note("counts(-1.5+i)", str(rp.counts));
  o.note("counts(-1.5-i)", str(rm.counts));
  o.check(rp.counts == std::vector<int>{20, 4} && rm.counts == std::vector<int>{4, 20}, "20/4 and 4/20 at -1.5+-i");
}

// Binomial-series product of prod (1 - a_m / z)^alpha, coefficient of z^-k.
std::vector<cplx> product_series(const std::vector<cplx>& a, double alpha, int count) {
  std::vector<cplx> acc(static_cast<std::size_t>(count), 0.0);
  acc[0] = 1.0;
  for (cplx am : a) {
    std::vector<cplx> f(static_cast<std::size_t>(count));
    double binom = 1.0;
    cplx pw = 1.0;
    for (int k = 0; k < count; ++k) {
      f[static_cast<std::size_t>(k)] = binom * pw;
      binom *= (alpha - k) / (k + 1);
      pw *= -am;
    }
    std::vector<cplx> next(static_cast<std::size_t>(count), 0.0);
    for (int i = 0; i < count; ++i)
      for (int j = 0; i + j < count; ++j)
        next[static_cast<std::size_t>(i + j)] += acc[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(j)];
    acc = next;
  }
  return acc;
}

void oracle_suites(Outcome& o) {
  const std::vector<cplx> a{{-0.7, -1.7}, {-0.7, 1.7}, {0.7, -0.2}, {0.7, 0.2}, {1.3, 0.4}, {-0.1, 0.9}};
  const BranchedRadical rad(a);
  const Polynomial num({{0.3, 1}, {-2, 0.5}, 0.0, {1, 0}, {0.2, -0.1}});
  double laurent = 0.0;
  for (double alpha : {-0.5, 0.5}) {
    const auto f = product_series(a, alpha, 20);
    const int e = alpha < 0 ? -3 : 3;
    const LaurentSeries L = alpha < 0 ? laurent_at_infinity(num, rad, 8) : laurent_times_w(num, rad, 8);
    for (int p = L.top_degree(); p >= -8; --p) {
      cplx want = 0.0;
      for (int k = 0; k <= num.degree(); ++k)
        if (k + e - p >= 0) want += num.coeff(k) * f[static_cast<std::size_t>(k + e - p)];
      laurent = std::max(laurent, std::abs(L.coeff(p) - want) / (1.0 + std::abs(want)));
    }
  }
  o.note("laurent_err", laurent);
  o.check(laurent < 1e-12, "Laurent against series");

  // Gap period on (-1, 1) of 1/w for endpoints -2, -1, 1, 2 by x = sin(theta).
  const std::vector<cplx> e{-2.0, -1.0, 1.0, 2.0};
  const cplx sign = eval_w(BranchedRadical(e), 0.0) / 2.0;
  cplx trap = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double s = std::sin(2.0 * pi * k / 256);
    trap += 1.0 / std::sqrt(4.0 - s * s);
  }
  const cplx oracle = (trap * (2.0 * pi / 256)).real() / sign;
  const double gap = std::abs(a_period(e, Polynomial::constant(1.0), 1) - oracle);
  o.note("gap_period_err", gap);
  o.check(gap < 1e-8, "period against substitution quadrature");

  QuadOptions fine;
  fine.base_panels = 2;
  const TwoCutSolution s = twocut_at(-1.5);
  double doubling = 0.0;
  for (int n = 0; n <= 4; ++n) {
    const auto p1 = cubic_periods(s, n), p2 = cubic_periods(s, n, fine);
    doubling = std::max({doubling, std::abs(p1.first - p2.first), std::abs(p1.second - p2.second)});
  }
  o.note("node_doubling", doubling);
  o.check(doubling < 1e-8, "periods under node doubling");

  const int n = 8;
  const RecurrenceCoefficients rc = recurrence_from_moments(compute_moments(gaussian_potential(), n, {{1, 0}, 0.0}, 60));
  PrecisionScope scope(70);
  double hermite = 0.0;
  for (const auto& x : rc.alpha) hermite = std::max(hermite, static_cast<double>(abs(x)));
  for (int j = 1; j < n; ++j)
    hermite = std::max(hermite, static_cast<double>(abs(rc.beta[static_cast<std::size_t>(j - 1)] - MpComplex(mp_real(j) / n))));
  o.note("hermite_err", hermite);
  o.check(hermite < 1e-10, "Gaussian recurrence equals scaled Hermite");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gaussian model", 1.0, gaussian},
      {2, "cubic one-cut", 10.0, cubic_onecut},
      {3, "critical point", 10.0, critical_point},
      {4, "two-cut at t = -1.1", 60.0, twocut_minus_1_1},
      {5, "intrinsic consistency", 1e300, intrinsic},
      {6, "stokes structure", 4 * 120.0, stokes_structure},
      {7, "phase diagram", 1800.0, phase_diagram},
      {8, "zeros vs cuts", 1800.0, zeros_vs_cuts_check},
      {9, "oracle suites", 1e300, oracle_suites},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  bool ok = true;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) o.check(false, "runtime budget");
    std::printf("criterion %d (%s): %s  runtime=%.2fs%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.notes.str().c_str());
    std::fflush(stdout);
    ok &= o.pass;
  }
  return ok ? 0 : 1;
}
