#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scurve/error.hpp"
#include "scurve/onecut.hpp"
#include "scurve/parallel.hpp"
#include "scurve/stokes.hpp"
#include "scurve/twocut.hpp"

namespace scurve {

/// Re G_k(-beta_k(t)) with the chord value S = w(-beta_k) continued in t:
/// among +-S the one nearest to `S_ref` is used when a reference is given.
struct TrackedG {
  cplx G;
  cplx S;
};

inline TrackedG g_minus_beta_tracked(cplx t, int k, std::optional<cplx> S_ref = std::nullopt) {
  const OneCutSolution sol = solve_cubic_branch(t, k);
  const BranchedRadical rad(sol.endpoints());
  cplx S = eval_w(rad, -sol.beta);
  if (S_ref && std::abs(-S - *S_ref) < std::abs(S - *S_ref)) S = -S;
  return {g_minus_beta_closed(sol.beta, sol.delta(), S), S};
}

/// Root of r -> Re G_k(-beta_k(r e^(i theta))) on [r_lo, r_hi], bracketed on a
/// uniform scan and refined by bisection to 1e-8 in |t|.
inline cplx critical_t_on_ray(int k, double theta, double r_lo = 0.05, double r_hi = 3.0, int samples = 300) {
  const cplx dir = std::polar(1.0, theta);
  TrackedG prev = g_minus_beta_tracked(r_lo * dir, k);
  double r_prev = r_lo;
  for (int i = 1; i <= samples; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / samples;
    const TrackedG cur = g_minus_beta_tracked(r * dir, k, prev.S);
    if ((prev.G.real() > 0) != (cur.G.real() > 0)) {
      double lo = r_prev, hi = r;
      TrackedG glo = prev;
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const TrackedG gm = g_minus_beta_tracked(mid * dir, k, glo.S);
        if ((gm.G.real() > 0) == (glo.G.real() > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi) * dir;
    }
    prev = cur;
    r_prev = r;
  }
  fail(ErrorCode::NoSignChange, "Re G_k(-beta_k) keeps one sign along the ray");
}

struct PhaseBoundary {
  int branch_k = 0;
  std::vector<cplx> polyline;
  bool closed = false;
};

struct BoundaryOptions {
  double step = 0.02;
  double extent = 3.5;  // stop when |Re t| or |Im t| exceeds this
  int max_points = 5000;
  double tol = 1e-12;
};

namespace detail {

inline bool crosses_dashed_cut(cplx p, cplx q) {
  const double rc = 3.0 * std::pow(2.0, -2.0 / 3.0);
  for (int j = 0; j < 3; ++j) {
    const cplx rot = std::polar(1.0, -2.0 * pi * j / 3.0);
    const cplx a = p * rot, b = q * rot;
    if ((a.imag() >= 0) == (b.imag() >= 0)) continue;
    const double x = a.real() - a.imag() * (b.real() - a.real()) / (b.imag() - a.imag());
    if (x > rc) return true;
  }
  return false;
}

/// Newton on t for Re g = 0 along the gradient; g' by central differences.
inline std::optional<std::pair<cplx, cplx>> correct_to_boundary(cplx t, int k, cplx S_ref, double tol) {
  for (int it = 0; it < 30; ++it) {
    const TrackedG g = g_minus_beta_tracked(t, k, S_ref);
    const double h = 1e-6;
    const cplx gp = (g_minus_beta_tracked(t + h, k, g.S).G - g_minus_beta_tracked(t - h, k, g.S).G) / (2.0 * h);
    if (std::abs(g.G.real()) < tol) return std::make_pair(t, g.S);
    if (std::norm(gp) == 0.0) return std::nullopt;
    t -= g.G.real() * std::conj(gp) / std::norm(gp);
    S_ref = g.S;
  }
  return std::nullopt;
}

}  // namespace detail

/// Pseudo-arclength continuation of Re G_k(-beta_k(t)) = 0 from a seed, in
/// both directions, stopping at the dashed cuts of the beta surface, at the
/// edge of the window, or when the curve closes.
inline PhaseBoundary trace_boundary(int k, cplx seed, const BoundaryOptions& opt = {}) {
  const TrackedG g0 = g_minus_beta_tracked(seed, k);
  if (std::abs(g0.G.real()) > 1e-6) fail(ErrorCode::InvalidArgument, "seed is not on the boundary");
  auto start = detail::correct_to_boundary(seed, k, g0.S, opt.tol);
  if (!start) fail(ErrorCode::ContinuationStalled, "could not correct the seed onto the boundary");

  PhaseBoundary out;
  out.branch_k = k;
  std::vector<cplx> halves[2];
  for (int side = 0; side < 2; ++side) {
    cplx t = start->first, S = start->second;
    double sgn = side == 0 ? 1.0 : -1.0;
    cplx prev_dir{};
    for (int n = 0; n < opt.max_points; ++n) {
      const double h = 1e-6;
      const cplx gp = (g_minus_beta_tracked(t + h, k, S).G - g_minus_beta_tracked(t - h, k, S).G) / (2.0 * h);
      cplx T = I * std::conj(gp) / std::abs(gp) * sgn;
      if (n > 0 && (T.real() * prev_dir.real() + T.imag() * prev_dir.imag()) < 0) T = -T;
      prev_dir = T;
      double step = opt.step;
      std::optional<std::pair<cplx, cplx>> next;
      while (step > 1e-6) {
        next = detail::correct_to_boundary(t + step * T, k, S, opt.tol);
        if (next && std::abs(next->first - t) < 2.0 * step) break;
        next.reset();
        step *= 0.5;
      }
      if (!next) fail(ErrorCode::ContinuationStalled, "boundary continuation step collapsed");
      if (detail::crosses_dashed_cut(t, next->first)) break;
      if (std::abs(next->first.real()) > opt.extent || std::abs(next->first.imag()) > opt.extent) break;
      t = next->first;
      S = next->second;
      halves[side].push_back(t);
      if (side == 0 && n > 10 && std::abs(t - start->first) < opt.step) {
        out.closed = true;
        break;
      }
    }
    if (out.closed) break;
  }
  std::reverse(halves[1].begin(), halves[1].end());
  out.polyline = halves[1];
  out.polyline.push_back(start->first);
  out.polyline.insert(out.polyline.end(), halves[0].begin(), halves[0].end());
  return out;
}

/// Seeds on the rays theta = pi, pi/3, 5 pi/3 for branches 0, 1, 2.
inline cplx boundary_seed(int k) {
  static const double thetas[3] = {pi, pi / 3.0, 5.0 * pi / 3.0};
  return critical_t_on_ray(k, thetas[k]);
}

enum class PhaseKind { OneCut, TwoCut, Boundary };

inline const char* to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::OneCut: return "one-cut";
    case PhaseKind::TwoCut: return "two-cut";
    case PhaseKind::Boundary: return "boundary";
  }
  return "?";
}

struct PhaseLabel {
  cplx t;
  std::pair<int, int> pair{1, 2};
  PhaseKind kind = PhaseKind::OneCut;
  int branch = -1;  // for OneCut
  std::optional<TwoCutSolution> twocut;
  std::vector<std::vector<cplx>> cuts;  // traced cut polylines
  EmbeddingReport evidence;
};

struct PhaseOptions {
  int base_resolution = 96;
  double boundary_tol = 1e-4;
  TwoCutOptions twocut{};
  StokesOptions stokes{};
};

/// Relabels a two-cut solution so that its pairs are joined by Short lines:
/// cuts ordered by the imaginary part of their midpoints (then real part),
/// each pair (lo, hi) with Im lo <= Im hi. One candidate per matching.
inline std::vector<TwoCutSolution> canonical_twocut(cplx t, const TwoCutSolution& sol, const PhaseOptions& opt = {}) {
  const SpectralCurve raw = twocut_curve(sol);
  const RootSet rs = RootSet::of(raw);
  const auto matchings = short_matchings(rs, trace_all(raw, opt.stokes));
  std::vector<TwoCutSolution> out;
  for (const auto& m : matchings) {
    if (m.size() != 2) continue;
    std::vector<std::pair<cplx, cplx>> cuts;
    for (auto [p, q] : m) {
      cplx lo = rs.roots[static_cast<std::size_t>(p)].z, hi = rs.roots[static_cast<std::size_t>(q)].z;
      if (lo.imag() > hi.imag() || (lo.imag() == hi.imag() && lo.real() > hi.real())) std::swap(lo, hi);
      cuts.emplace_back(lo, hi);
    }
    auto mid = [](const std::pair<cplx, cplx>& c) { return 0.5 * (c.first + c.second); };
    std::sort(cuts.begin(), cuts.end(), [&](const auto& x, const auto& y) {
      const cplx a = mid(x), b = mid(y);
      return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    TwoCutSolution s{cuts[0].first, cuts[0].second, cuts[1].first, cuts[1].second};
    try {
      out.push_back(newton_solve(t, s, opt.twocut));
    } catch (const Error&) {
    }
  }
  return out;
}

namespace detail {

inline std::optional<PhaseLabel> try_onecut(cplx t, int k, std::pair<int, int> pair, const PhaseOptions& opt) {
  OneCutSolution s;
  try {
    s = solve_cubic_branch(t, k);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (s.branch_collision) return std::nullopt;
  const SpectralCurve c = onecut_curve(cubic_potential(t), s);
  CutAnalysis an;
  try {
    an = analyze_cuts(c, opt.stokes);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!an.all_positive()) return std::nullopt;
  PhaseLabel lab;
  lab.t = t;
  lab.pair = pair;
  lab.kind = PhaseKind::OneCut;
  lab.branch = k;
  lab.evidence = embed_s_curve(an.cuts, *an.branch, pair, opt.base_resolution);
  if (!lab.evidence.embeddable) return std::nullopt;
  for (const auto& cut : an.cuts) lab.cuts.push_back(cut.line.samples);
  return lab;
}

inline std::optional<PhaseLabel> try_twocut(cplx t, const TwoCutSolution& sol, std::pair<int, int> pair,
                                            const PhaseOptions& opt) {
  for (const TwoCutSolution& s : canonical_twocut(t, sol, opt)) {
    const SpectralCurve c = twocut_curve(s);
    CutAnalysis an;
    try {
      an = analyze_cuts(c, opt.stokes);
    } catch (const Error&) {
      continue;
    }
    if (!an.all_positive()) continue;
    PhaseLabel lab;
    lab.t = t;
    lab.pair = pair;
    lab.kind = PhaseKind::TwoCut;
    lab.twocut = s;
    lab.evidence = embed_s_curve(an.cuts, *an.branch, pair, opt.base_resolution);
    if (!lab.evidence.embeddable) continue;
    for (const auto& cut : an.cuts) lab.cuts.push_back(cut.line.samples);
    return lab;
  }
  return std::nullopt;
}

}  // namespace detail

/// Known two-cut solutions used to seed the two-cut pipeline by continuation.
class TwoCutCatalogue {
 public:
  TwoCutCatalogue() = default;
  explicit TwoCutCatalogue(std::vector<std::pair<cplx, TwoCutSolution>> entries) : entries_(std::move(entries)) {}

  /// The solution at t = -1.1 obtained by splitting the cut of beta_0 at t = -1.02.
  static TwoCutCatalogue standard() {
    const OneCutSolution one = solve_cubic_branch(-1.02, 0);
    const auto chain = continue_in_t({-1.02, -1.1}, solve_from_onecut(-1.02, one));
    return TwoCutCatalogue({{cplx(-1.1), chain.back()}});
  }

  void add(cplx t, const TwoCutSolution& s) { entries_.emplace_back(t, s); }
  bool empty() const { return entries_.empty(); }

  /// Entries ordered by distance from t.
  std::vector<std::pair<cplx, TwoCutSolution>> nearest(cplx t) const {
    auto e = entries_;
    std::sort(e.begin(), e.end(), [&](const auto& a, const auto& b) { return std::abs(a.first - t) < std::abs(b.first - t); });
    return e;
  }

 private:
  std::vector<std::pair<cplx, TwoCutSolution>> entries_;
};

/// Two-cut solutions at t in canonical labeling, seeded as in classify_t.
/// Candidates whose cuts all carry positive density come first.
inline std::vector<TwoCutSolution> solve_twocut(cplx t, const PhaseOptions& opt = {},
                                                const TwoCutCatalogue& catalogue = TwoCutCatalogue::standard()) {
  std::vector<TwoCutSolution> seeds;
  for (const auto& [t0, s0] : catalogue.nearest(t)) {
    try {
      seeds.push_back(continue_in_t({t0, t}, s0, opt.twocut).back());
    } catch (const Error&) {
    }
  }
  for (int k = 0; k < 3; ++k) {
    try {
      seeds.push_back(solve_from_onecut(t, solve_cubic_branch(t, k), opt.twocut));
    } catch (const Error&) {
    }
  }
  std::vector<TwoCutSolution> good, rest;
  for (const auto& s : seeds) {
    for (const auto& c : canonical_twocut(t, s, opt)) {
      bool positive = false;
      try {
        positive = analyze_cuts(twocut_curve(c), opt.stokes).all_positive();
      } catch (const Error&) {
      }
      (positive ? good : rest).push_back(c);
    }
    if (!good.empty()) break;
  }
  if (good.empty() && rest.empty()) fail(ErrorCode::NoConvergence, "no two-cut solution found");
  good.insert(good.end(), rest.begin(), rest.end());
  return good;
}

/// Distance in t from the nearest boundary curve, to first order.
inline double boundary_distance(cplx t) {
  double best = 1e300;
  for (int k = 0; k < 3; ++k) {
    try {
      const TrackedG g = g_minus_beta_tracked(t, k);
      const double h = 1e-6;
      const cplx gp = (g_minus_beta_tracked(t + h, k, g.S).G - g_minus_beta_tracked(t - h, k, g.S).G) / (2.0 * h);
      if (std::abs(gp) > 0) best = std::min(best, std::abs(g.G.real()) / std::abs(gp));
    } catch (const Error&) {
    }
  }
  return best;
}

/// One-cut branches first, then the two-cut pipeline seeded by splitting each
/// one-cut solution and by continuation from the catalogue.
inline PhaseLabel classify_t(cplx t, std::pair<int, int> pair = {1, 2}, const PhaseOptions& opt = {},
                             const TwoCutCatalogue& catalogue = {}) {
  if (boundary_distance(t) < opt.boundary_tol) {
    PhaseLabel lab;
    lab.t = t;
    lab.pair = pair;
    lab.kind = PhaseKind::Boundary;
    return lab;
  }
  for (int k = 0; k < 3; ++k)
    if (auto lab = detail::try_onecut(t, k, pair, opt)) return *lab;

  std::vector<TwoCutSolution> seeds;
  for (const auto& [t0, s0] : catalogue.nearest(t)) {
    try {
      seeds.push_back(continue_in_t({t0, t}, s0, opt.twocut).back());
    } catch (const Error&) {
    }
  }
  for (int k = 0; k < 3; ++k) {
    try {
      seeds.push_back(solve_from_onecut(t, solve_cubic_branch(t, k), opt.twocut));
    } catch (const Error&) {
    }
  }
  for (const auto& s : seeds)
    if (auto lab = detail::try_twocut(t, s, pair, opt)) return *lab;
  fail(ErrorCode::Unclassified, "no one-cut or two-cut S-curve found");
}

struct GridLabel {
  cplx t;
  std::string label;  // "1cut:k", "2cut", "boundary", "unclassified"
  std::optional<PhaseLabel> detail;
};

inline std::string short_label(const PhaseLabel& l) {
  switch (l.kind) {
    case PhaseKind::OneCut: return "1cut:" + std::to_string(l.branch);
    case PhaseKind::TwoCut: return "2cut";
    case PhaseKind::Boundary: return "boundary";
  }
  return "?";
}

/// classify_t over an nx x ny grid of [x0, x1] x [y0, y1]; row-major from
/// the bottom-left corner. Failures are recorded as "unclassified".
inline std::vector<GridLabel> classify_grid(double x0, double x1, double y0, double y1, int nx, int ny,
                                            std::pair<int, int> pair = {1, 2}, const PhaseOptions& opt = {},
                                            const TwoCutCatalogue& catalogue = TwoCutCatalogue::standard()) {
  std::vector<GridLabel> out(static_cast<std::size_t>(nx) * ny);
  parallel_for(out.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % nx), j = static_cast<int>(idx / nx);
    const cplx t(nx > 1 ? x0 + (x1 - x0) * i / (nx - 1) : x0, ny > 1 ? y0 + (y1 - y0) * j / (ny - 1) : y0);
    out[idx].t = t;
    try {
      PhaseLabel l = classify_t(t, pair, opt, catalogue);
      out[idx].label = short_label(l);
      out[idx].detail = std::move(l);
    } catch (const Error&) {
      out[idx].label = "unclassified";
    }
  });
  return out;
}

enum class TransitionKind { Split, Merge, Birth, Death, BranchChange };

inline const char* to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::Split: return "split";
    case TransitionKind::Merge: return "merge";
    case TransitionKind::Birth: return "birth";
    case TransitionKind::Death: return "death";
    case TransitionKind::BranchChange: return "branch-change";
  }
  return "?";
}

struct TransitionEvent {
  TransitionKind kind;
  cplx t;
  std::string from, to;
  double closest_pair_distance = 0.0;
};

namespace detail {

/// Bisection of Re G_k(-beta_k) on the segment p -> q; nullopt without a sign change.
inline std::optional<cplx> locate_boundary(int k, cplx p, cplx q) {
  TrackedG gp = g_minus_beta_tracked(p, k);
  TrackedG gq = g_minus_beta_tracked(q, k, gp.S);
  // Continue S along the segment so that the sign comparison is meaningful.
  const int n = 16;
  cplx a = p;
  TrackedG ga = gp;
  for (int i = 1; i <= n; ++i) {
    const cplx b = p + (q - p) * (static_cast<double>(i) / n);
    const TrackedG gb = g_minus_beta_tracked(b, k, ga.S);
    if ((ga.G.real() > 0) != (gb.G.real() > 0)) {
      cplx lo = a, hi = b;
      TrackedG glo = ga;
      while (std::abs(hi - lo) > 1e-10) {
        const cplx mid = 0.5 * (lo + hi);
        const TrackedG gm = g_minus_beta_tracked(mid, k, glo.S);
        if ((gm.G.real() > 0) == (glo.G.real() > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    ga = gb;
  }
  (void)gq;
  return std::nullopt;
}

/// Closest endpoint pair of a two-cut solution: (distance, same cut?).
inline std::pair<double, bool> closest_pair(const TwoCutSolution& s) {
  const auto e = s.endpoints();
  double best = 1e300;
  bool same = false;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double d = std::abs(e[i] - e[j]);
      if (d < best) {
        best = d;
        same = (i / 2 == j / 2);
      }
    }
  return {best, same};
}

}  // namespace detail

/// Classifies every path point and names each label change. A one-cut /
/// two-cut change is located on Re G_k(-beta_k) = 0 and typed by the
/// closest endpoint pair of the two-cut solution there: a pair inside one cut
/// is a birth or death at a distance, a pair across the gap a split or merge.
inline std::vector<TransitionEvent> transition_report(const std::vector<cplx>& path, std::pair<int, int> pair = {1, 2},
                                                      const PhaseOptions& opt = {},
                                                      const TwoCutCatalogue& catalogue = TwoCutCatalogue::standard(),
                                                      std::vector<GridLabel>* labels_out = nullptr) {
  std::vector<GridLabel> labels(path.size());
  parallel_for(path.size(), [&](std::size_t i) {
    labels[i].t = path[i];
    try {
      PhaseLabel l = classify_t(path[i], pair, opt, catalogue);
      labels[i].label = short_label(l);
      labels[i].detail = std::move(l);
    } catch (const Error&) {
      labels[i].label = "unclassified";
    }
  });
  std::vector<TransitionEvent> events;
  std::size_t last = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& cur = labels[i];
    if (!cur.detail || cur.detail->kind == PhaseKind::Boundary) continue;
    if (last < labels.size() && labels[last].label != cur.label) {
      const PhaseLabel& A = *labels[last].detail;
      const PhaseLabel& B = *cur.detail;
      TransitionEvent ev;
      ev.from = labels[last].label;
      ev.to = cur.label;
      ev.t = 0.5 * (A.t + B.t);
      if (A.kind == PhaseKind::OneCut && B.kind == PhaseKind::OneCut) {
        ev.kind = TransitionKind::BranchChange;
      } else {
        const bool entering = B.kind == PhaseKind::TwoCut;
        const PhaseLabel& one = entering ? A : B;
        const PhaseLabel& two = entering ? B : A;
        if (auto tb = detail::locate_boundary(one.branch, one.t, two.t)) ev.t = *tb;
        // Two-cut solution just inside the two-cut side of the event.
        TwoCutSolution s = *two.twocut;
        const cplx inside = ev.t + 1e-3 * (two.t - ev.t) / std::abs(two.t - ev.t);
        try {
          s = continue_in_t({two.t, inside}, s, opt.twocut).back();
        } catch (const Error&) {
        }
        const auto [d, same] = detail::closest_pair(s);
        ev.closest_pair_distance = d;
        ev.kind = same ? (entering ? TransitionKind::Birth : TransitionKind::Death)
                       : (entering ? TransitionKind::Split : TransitionKind::Merge);
      }
      events.push_back(ev);
    }
    last = i;
  }
  if (labels_out) *labels_out = std::move(labels);
  return events;
}

}  // namespace scurve
