#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "scurve/algebra.hpp"
#include "scurve/curve.hpp"
#include "scurve/error.hpp"
#include "scurve/parallel.hpp"
#include "scurve/polynomial.hpp"
#include "scurve/quadrature.hpp"

namespace scurve {

struct StokesOptions {
  double eps_hit_rel = 1e-4;  // arrival radius, relative to the root scale
  double start_rel = 1e-3;    // distance of the first sample from the origin
  double ds_min = 1e-5;
  double ds_max = 0.1;
  double sag_tol = 1e-6;
  double r_inf_factor = 8.0;
  int max_steps = 200000;
};

enum class Terminal { Short, Leg, Critical };

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::Short: return "short";
    case Terminal::Leg: return "leg";
    case Terminal::Critical: return "critical";
  }
  return "?";
}

struct StokesLine {
  cplx origin;
  int origin_index = -1;
  int direction_index = 0;
  double start_angle = 0.0;
  std::vector<cplx> samples;
  std::vector<cplx> G;  // int_origin^z y dz along the line (y continued)
  std::vector<cplx> y;  // the continued y at each sample
  Terminal terminal = Terminal::Leg;
  int target_index = -1;  // root index for Short / Critical
  cplx target{};
  double asymptotic_angle = 0.0;  // for Leg
  int orientation = 1;            // tangent = orientation * i conj(y) / |y|
};

/// Roots of y^2 with a common length scale.
struct RootSet {
  std::vector<Root> roots;
  double scale = 1.0;

  static RootSet of(const SpectralCurve& c) {
    RootSet r;
    r.roots = c.roots();
    double m = 0.0;
    for (const auto& x : r.roots) m = std::max(m, std::abs(x.z));
    r.scale = 1.0 + m;
    return r;
  }
};

/// m + 2 directions at a root of multiplicity m along which Re int y dz
/// vanishes to leading order. `K` is the leading coefficient of y^2 at the root.
inline std::vector<double> initial_directions(cplx K, int m) {
  const cplx sk = std::sqrt(K);
  const double p = 0.5 * m + 1.0;
  std::vector<double> out;
  for (int j = 0; j < m + 2; ++j) out.push_back((0.5 * pi - std::arg(sk) + j * pi) / p);
  return out;
}

/// Leading coefficient of y^2 = K (z - z0)^m + ... at a root of multiplicity m.
inline cplx local_coefficient(const Polynomial& y2, cplx z0, int m) {
  Polynomial d = y2;
  double fact = 1.0;
  for (int k = 1; k <= m; ++k) {
    d = d.derivative();
    fact *= k;
  }
  return d(z0) / fact;
}

inline std::vector<double> initial_directions(const Polynomial& y2, cplx root, int m) {
  return initial_directions(local_coefficient(y2, root, m), m);
}

namespace detail {

inline cplx align(cplx v, cplx ref) { return (v.real() * ref.real() + v.imag() * ref.imag()) >= 0.0 ? v : -v; }

/// int_p^q y dz with y = sqrt(y2) continued from y_ref at p (short segment).
inline cplx short_segment_integral(const Polynomial& y2, cplx p, cplx q, cplx y_ref) {
  const auto& rule = gauss20();
  cplx acc{};
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const cplx z = p + rule.x[i] * (q - p);
    acc += rule.w[i] * align(std::sqrt(y2(z)), y_ref);
  }
  return acc * (q - p);
}

}  // namespace detail

/// Traces the level set Re int_origin^z y dz = 0 leaving `origin` at angle
/// `theta`, by a midpoint predictor on the unit tangent i conj(y)/|y| and a
/// Newton corrector back onto the level set.
inline StokesLine trace_line(const SpectralCurve& curve, const RootSet& rs, int origin_index, double theta,
                             int direction_index = 0, const StokesOptions& opt = {}) {
  const Polynomial y2 = curve.y2_poly();
  const Polynomial dy2 = y2.derivative();
  const Root& org = rs.roots.at(static_cast<std::size_t>(origin_index));
  const double eps_hit = opt.eps_hit_rel * rs.scale;
  const double rho = opt.start_rel * rs.scale;
  const double r_inf = opt.r_inf_factor * rs.scale;
  const int m = org.multiplicity;
  const cplx K = local_coefficient(y2, org.z, m);
  const cplx sk = std::sqrt(K);

  StokesLine line;
  line.origin = org.z;
  line.origin_index = origin_index;
  line.direction_index = direction_index;
  line.start_angle = theta;

  // Local model y ~ sqrt(K) (z - z0)^(m/2) on the initial ray.
  auto model = [&](double r) { return sk * std::pow(r, 0.5 * m) * std::polar(1.0, 0.5 * m * theta); };
  const cplx dir = std::polar(1.0, theta);
  cplx z = org.z + rho * dir;
  cplx y = detail::align(std::sqrt(y2(z)), model(rho));
  auto G_from_origin = [&](cplx q) {
    const double phase = theta + std::remainder(std::arg(q - org.z) - theta, 2.0 * pi);
    const double len = std::abs(q - org.z);
    return integrate_segment<cplx>(org.z, q, [&](const SegmentNode& n) {
      const cplx ref = sk * std::pow(n.s * len, 0.5 * m) * std::polar(1.0, 0.5 * m * phase);
      return detail::align(std::sqrt(y2(n.z)), ref);
    });
  };
  cplx G = G_from_origin(z);
  for (int c = 0; c < 3; ++c) {
    z -= G.real() * std::conj(y) / std::norm(y);
    y = detail::align(std::sqrt(y2(z)), y);
    G = G_from_origin(z);
  }
  line.samples.push_back(org.z);
  line.G.push_back(0.0);
  line.y.push_back(0.0);
  line.samples.push_back(z);
  line.G.push_back(G);
  line.y.push_back(y);

  const cplx t0 = I * std::conj(y) / std::abs(y);
  line.orientation = (t0.real() * dir.real() + t0.imag() * dir.imag()) >= 0.0 ? 1 : -1;
  const double sigma = line.orientation;
  auto tangent = [&](cplx yy) { return sigma * I * std::conj(yy) / std::abs(yy); };

  auto finish_at = [&](std::size_t idx) {
    const Root& r = rs.roots[idx];
    const cplx tail = integrate_segment<cplx>(z, r.z, [&](const SegmentNode& n) {
      return detail::align(std::sqrt(y2(n.z)), y);
    });
    line.samples.push_back(r.z);
    line.G.push_back(G + tail);
    line.y.push_back(0.0);
    line.target_index = static_cast<int>(idx);
    line.target = r.z;
    line.terminal = r.multiplicity == 1 ? Terminal::Short : Terminal::Critical;
  };

  for (int step = 0; step < opt.max_steps; ++step) {
    double dnear = std::abs(z - org.z);
    for (std::size_t i = 0; i < rs.roots.size(); ++i) {
      if (static_cast<int>(i) == origin_index) continue;
      const double d = std::abs(z - rs.roots[i].z);
      if (d < eps_hit) {
        finish_at(i);
        return line;
      }
      dnear = std::min(dnear, d);
    }
    if (std::abs(z) > r_inf) {
      line.terminal = Terminal::Leg;
      line.asymptotic_angle = std::arg(z);
      return line;
    }
    const double logder = std::abs(0.5 * dy2(z) / y2(z));
    // Chord sag ds^2 kappa / 8 with kappa ~ |y'/y| kept near sag_tol; relaxed
    // quadratically outside the root region where only legs run.
    const double rel = std::max(1.0, std::abs(z) / rs.scale);
    const double sag = std::sqrt(8.0 * opt.sag_tol * rel * rel / std::max(logder, 1e-300));
    double ds = std::min({0.05 / std::max(logder, 1e-300), sag, 0.25 * dnear});
    ds = std::clamp(ds, opt.ds_min, opt.ds_max);

    const cplx zm = z + 0.5 * ds * tangent(y);
    const cplx ym = detail::align(std::sqrt(y2(zm)), y);
    cplx zn = z + ds * tangent(ym);
    cplx yn = detail::align(std::sqrt(y2(zn)), ym);
    cplx Gn = G + detail::short_segment_integral(y2, z, zn, y);
    for (int c = 0; c < 3; ++c) {
      const double F = Gn.real();
      if (std::abs(F) < 1e-14 * (1.0 + std::abs(Gn))) break;
      const cplx zc = zn - F * std::conj(yn) / std::norm(yn);
      Gn += detail::short_segment_integral(y2, zn, zc, yn);
      yn = detail::align(std::sqrt(y2(zc)), yn);
      zn = zc;
    }
    z = zn;
    y = yn;
    G = Gn;
    line.samples.push_back(z);
    line.G.push_back(G);
    line.y.push_back(y);
  }
  fail(ErrorCode::StepCollapse, "Stokes line did not terminate within the step budget");
}

/// All m + 2 lines from every root.
inline std::vector<StokesLine> trace_all(const SpectralCurve& curve, const StokesOptions& opt = {}) {
  const RootSet rs = RootSet::of(curve);
  const Polynomial y2 = curve.y2_poly();
  struct Job {
    int root;
    int dir;
    double theta;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const auto dirs = initial_directions(y2, rs.roots[i].z, rs.roots[i].multiplicity);
    for (std::size_t j = 0; j < dirs.size(); ++j) jobs.push_back({static_cast<int>(i), static_cast<int>(j), dirs[j]});
  }
  std::vector<StokesLine> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t k) {
    out[k] = trace_line(curve, rs, jobs[k].root, jobs[k].theta, jobs[k].dir, opt);
  });
  return out;
}

/// Short line from root p to root q (first found), if any.
inline std::optional<StokesLine> find_short(const std::vector<StokesLine>& lines, int p, int q) {
  for (const auto& l : lines)
    if (l.origin_index == p && l.terminal == Terminal::Short && l.target_index == q) return l;
  return std::nullopt;
}

/// Hausdorff distance between two polylines measured on their vertices.
inline double hausdorff(const std::vector<cplx>& A, const std::vector<cplx>& B) {
  auto seg_dist = [](cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double L2 = std::norm(ab);
    double s = L2 > 0 ? ((p - a) * std::conj(ab)).real() / L2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
  };
  auto one_sided = [&](const std::vector<cplx>& X, const std::vector<cplx>& Y) {
    double h = 0.0;
    for (cplx p : X) {
      double d = 1e300;
      for (std::size_t i = 0; i + 1 < Y.size(); ++i) d = std::min(d, seg_dist(p, Y[i], Y[i + 1]));
      if (Y.size() == 1) d = std::abs(p - Y[0]);
      h = std::max(h, d);
    }
    return h;
  };
  return std::max(one_sided(A, B), one_sided(B, A));
}

/// Distance from a point to a polyline.
inline double distance_to_polyline(cplx p, const std::vector<cplx>& Y) {
  if (Y.empty()) return 1e300;
  if (Y.size() == 1) return std::abs(p - Y[0]);
  double d = 1e300;
  for (std::size_t i = 0; i + 1 < Y.size(); ++i) {
    const cplx ab = Y[i + 1] - Y[i];
    const double L2 = std::norm(ab);
    double s = L2 > 0 ? ((p - Y[i]) * std::conj(ab)).real() / L2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    d = std::min(d, std::abs(p - (Y[i] + s * ab)));
  }
  return d;
}

/// True if two non-adjacent segments of the polyline intersect.
inline bool self_intersects(const std::vector<cplx>& P) {
  auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
  auto seg_hit = [&](cplx p1, cplx p2, cplx q1, cplx q2) {
    const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
  };
  const std::size_t n = P.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double minx = std::min(P[i].real(), P[i + 1].real()), maxx = std::max(P[i].real(), P[i + 1].real());
    double miny = std::min(P[i].imag(), P[i + 1].imag()), maxy = std::max(P[i].imag(), P[i + 1].imag());
    for (std::size_t j = i + 2; j + 1 < n; ++j) {
      if (std::max(P[j].real(), P[j + 1].real()) < minx || std::min(P[j].real(), P[j + 1].real()) > maxx) continue;
      if (std::max(P[j].imag(), P[j + 1].imag()) < miny || std::min(P[j].imag(), P[j + 1].imag()) > maxy) continue;
      if (seg_hit(P[i], P[i + 1], P[j], P[j + 1])) return true;
    }
  }
  return false;
}

/// Even-odd point-in-polygon test; the polygon closes from the last vertex to the first.
inline bool inside_polygon(cplx p, const std::vector<cplx>& poly) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = poly[i].imag(), yj = poly[j].imag();
    if ((yi > p.imag()) != (yj > p.imag())) {
      const double x = poly[j].real() + (p.imag() - yj) * (poly[i].real() - poly[j].real()) / (yi - yj);
      if (p.real() < x) in = !in;
    }
  }
  return in;
}

/// y with its cuts moved from the chords onto traced Stokes lines. Cut j must
/// join the endpoints of pair j of the curve's radical. Inside the lens
/// between a chord and its traced cut the chord branch changes sign.
class TrueBranch {
 public:
  TrueBranch(SpectralCurve curve, std::vector<std::vector<cplx>> cuts) : curve_(std::move(curve)), cuts_(std::move(cuts)) {
    for (const auto& c : cuts_) {
      double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
      for (cplx p : c) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
      }
      boxes_.push_back({x0, x1, y0, y1});
    }
  }

  const SpectralCurve& curve() const { return curve_; }
  const std::vector<std::vector<cplx>>& cuts() const { return cuts_; }

  /// +1 or -1: the factor relating the chord branch to the true branch at z.
  int parity(cplx z) const {
    int p = 1;
    for (std::size_t j = 0; j < cuts_.size(); ++j) {
      const auto& b = boxes_[j];
      if (z.real() < b[0] || z.real() > b[1] || z.imag() < b[2] || z.imag() > b[3]) continue;
      if (inside_polygon(z, cuts_[j])) p = -p;
    }
    return p;
  }

  cplx w(cplx z) const { return static_cast<double>(parity(z)) * eval_w(curve_.radical(), z); }
  cplx y(cplx z) const { return curve_.h()(z) * w(z); }

 private:
  SpectralCurve curve_;
  std::vector<std::vector<cplx>> cuts_;
  std::vector<std::array<double, 4>> boxes_;
};

struct CutCandidate {
  StokesLine line;
  std::vector<std::pair<cplx, double>> density_samples;
  bool positive = false;
  double charge = 0.0;
};

/// Density rho |dz| = y_+ dz / (2 pi i) along a traced short, with y_+ the
/// true-branch value on the left of the traced direction.
inline CutCandidate density_on_line(const TrueBranch& branch, const StokesLine& line) {
  if (line.terminal != Terminal::Short) fail(ErrorCode::InvalidArgument, "density needs a short line");
  CutCandidate cand;
  cand.line = line;
  double scale = 1.0;
  for (cplx z : line.samples) scale = std::max(scale, std::abs(z));
  const std::size_t n = line.samples.size();
  // The tracer's y and the true boundary value differ by a constant sign.
  int agree_votes = 0, disagree_votes = 0;
  const std::size_t stride = std::max<std::size_t>(1, n / 60);
  for (std::size_t i = 1; i + 1 < n; i += stride) {
    const cplx z = line.samples[i];
    const cplx tan = line.samples[i + 1] - line.samples[i - 1];
    const cplx T = tan / std::abs(tan);
    const double d = std::min(std::abs(z - line.samples.front()), std::abs(z - line.samples.back()));
    const double eta = std::min(1e-6 * scale, 0.01 * d);
    cplx yplus;
    try {
      yplus = branch.y(z + eta * I * T);
    } catch (const Error&) {
      continue;
    }
    const cplx yc = line.y[i];
    const int rel = (yplus.real() * yc.real() + yplus.imag() * yc.imag()) >= 0.0 ? 1 : -1;
    (rel > 0 ? agree_votes : disagree_votes)++;
    const double rho = (static_cast<double>(rel) * yc * T / (2.0 * pi * I)).real();
    cand.density_samples.emplace_back(z, rho);
  }
  const int rel = agree_votes >= disagree_votes ? 1 : -1;
  const cplx dG = line.G.back() - line.G.front();
  cand.charge = (static_cast<double>(rel) * dG / (2.0 * pi * I)).real();
  cand.positive = !cand.density_samples.empty() && agree_votes * disagree_votes == 0;
  for (const auto& s : cand.density_samples)
    if (!(s.second > 0.0)) cand.positive = false;
  return cand;
}

/// Index of the root nearest to z.
inline int root_index(const RootSet& rs, cplx z) {
  int best = -1;
  double d = 1e300;
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const double e = std::abs(rs.roots[i].z - z);
    if (e < d) {
      d = e;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Perfect matchings of the endpoints (simple roots) using Short lines only.
inline std::vector<std::vector<std::pair<int, int>>> short_matchings(const RootSet& rs, const std::vector<StokesLine>& lines) {
  std::vector<int> ends;
  for (std::size_t i = 0; i < rs.roots.size(); ++i)
    if (rs.roots[i].multiplicity == 1) ends.push_back(static_cast<int>(i));
  auto joined = [&](int p, int q) {
    for (const auto& l : lines)
      if (l.terminal == Terminal::Short &&
          ((l.origin_index == p && l.target_index == q) || (l.origin_index == q && l.target_index == p)))
        return true;
    return false;
  };
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> cur;
  std::vector<bool> used(ends.size(), false);
  auto rec = [&](auto&& self) -> void {
    std::size_t first = 0;
    while (first < ends.size() && used[first]) ++first;
    if (first == ends.size()) {
      out.push_back(cur);
      return;
    }
    used[first] = true;
    for (std::size_t k = first + 1; k < ends.size(); ++k) {
      if (used[k] || !joined(ends[first], ends[k])) continue;
      used[k] = true;
      cur.emplace_back(ends[first], ends[k]);
      self(self);
      cur.pop_back();
      used[k] = false;
    }
    used[first] = false;
  };
  rec(rec);
  return out;
}

/// Traced cuts of a curve whose radical pairs are the intended cuts: the
/// Short from lo(j) to hi(j) for every pair, the true branch built on them
/// and the density candidates. Empty if some pair has no Short.
struct CutAnalysis {
  std::vector<StokesLine> lines;
  std::optional<TrueBranch> branch;
  std::vector<CutCandidate> cuts;
  bool all_positive() const {
    return branch && !cuts.empty() &&
           std::all_of(cuts.begin(), cuts.end(), [](const CutCandidate& c) { return c.positive; });
  }
};

inline CutAnalysis analyze_cuts(const SpectralCurve& curve, const StokesOptions& opt = {}) {
  CutAnalysis out;
  out.lines = trace_all(curve, opt);
  const RootSet rs = RootSet::of(curve);
  const BranchedRadical& rad = curve.radical();
  std::vector<StokesLine> shorts;
  for (int j = 0; j < rad.genus_plus_one(); ++j) {
    const auto l = find_short(out.lines, root_index(rs, rad.lo(j)), root_index(rs, rad.hi(j)));
    if (!l) return out;
    shorts.push_back(*l);
  }
  std::vector<std::vector<cplx>> polys;
  for (const auto& l : shorts) polys.push_back(l.samples);
  out.branch.emplace(curve, polys);
  for (const auto& l : shorts) out.cuts.push_back(density_on_line(*out.branch, l));
  return out;
}

struct BBox {
  double x0, x1, y0, y1;
};

struct SignMap {
  BBox bbox{};
  int nx = 0, ny = 0;
  std::vector<int8_t> signs;  // row-major, row j = y index from bottom
  std::vector<double> re_g;

  double dx() const { return (bbox.x1 - bbox.x0) / nx; }
  double dy() const { return (bbox.y1 - bbox.y0) / ny; }
  cplx center(int i, int j) const { return {bbox.x0 + (i + 0.5) * dx(), bbox.y0 + (j + 0.5) * dy()}; }
  int at(int i, int j) const { return signs[static_cast<std::size_t>(j) * nx + i]; }
  bool cell_of(cplx z, int& i, int& j) const {
    i = static_cast<int>(std::floor((z.real() - bbox.x0) / dx()));
    j = static_cast<int>(std::floor((z.imag() - bbox.y0) / dy()));
    return i >= 0 && j >= 0 && i < nx && j < ny;
  }
};

/// Symmetric box around the origin that contains all roots with margin.
inline BBox default_bbox(const SpectralCurve& curve) {
  double m = 0.0;
  for (const auto& r : curve.roots()) m = std::max({m, std::abs(r.z.real()), std::abs(r.z.imag())});
  const double h = std::max(2.5, 1.6 * m);
  return {-h, h, -h, h};
}

namespace detail {

/// w continued along the straight segment from endpoint a_i to q, fixed up to
/// a global sign; returns w(q) and int_{a_i}^q h w dz.
inline std::pair<cplx, cplx> from_branch_point(const SpectralCurve& c, int i, cplx q) {
  const auto& a = c.radical().endpoints();
  const cplx ai = a[static_cast<std::size_t>(i)];
  cplx c0 = std::sqrt(q - ai);
  for (std::size_t m = 0; m < a.size(); ++m)
    if (static_cast<int>(m) != i) c0 *= std::sqrt(ai - a[m]);
  auto wat = [&](double s, cplx z) {
    cplx w = c0 * std::sqrt(s);
    for (std::size_t m = 0; m < a.size(); ++m)
      if (static_cast<int>(m) != i) w *= std::sqrt((z - a[m]) / (ai - a[m]));
    return w;
  };
  const cplx G = integrate_segment<cplx>(ai, q, [&](const SegmentNode& n) { return c.h()(n.z) * wat(n.s, n.z); });
  return {wat(1.0, q), G};
}

}  // namespace detail

/// sign(Re G) on a grid, G = int_{a_1^-}^z y dz with the true branch.
/// y is continued exactly along straight segments (rows from the left edge,
/// each row start reached from a_1^-); Re G_true = e Re G_cont where
/// e = y_cont / y_true = +-1.
inline SignMap sign_map(const TrueBranch& branch, const BBox& box, int nx, int ny, double zero_tol = 1e-12) {
  if (nx < 64 || ny < 64) fail(ErrorCode::InvalidArgument, "sign map resolution must be at least 64x64");
  SignMap map;
  map.bbox = box;
  map.nx = nx;
  map.ny = ny;
  map.signs.assign(static_cast<std::size_t>(nx) * ny, 0);
  map.re_g.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  const SpectralCurve& c = branch.curve();
  const BranchedRadical& rad = c.radical();
  const auto& rule = gauss20();
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    cplx p = map.center(0, j);
    cplx w{}, G{};
    bool ok = true;
    try {
      std::tie(w, G) = detail::from_branch_point(c, 0, p);
    } catch (const Error&) {
      ok = false;
    }
    for (int i = 0; i < nx; ++i) {
      const cplx q = map.center(i, j);
      try {
        if (!ok) {
          std::tie(w, G) = detail::from_branch_point(c, 0, q);
          ok = true;
        } else if (i > 0) {
          cplx acc{};
          for (std::size_t k = 0; k < rule.x.size(); ++k) {
            const cplx z = p + rule.x[k] * (q - p);
            acc += rule.w[k] * c.h()(z) * continue_w(rad, p, w, z);
          }
          G += acc * (q - p);
          w = continue_w(rad, p, w, q);
        }
        p = q;
        const cplx wt = branch.w(q);
        const double e = (w.real() * wt.real() + w.imag() * wt.imag()) >= 0.0 ? 1.0 : -1.0;
        const double v = e * G.real();
        const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
        map.re_g[idx] = v;
        map.signs[idx] = std::abs(v) < zero_tol ? 0 : (v > 0 ? 1 : -1);
      } catch (const Error&) {
        ok = false;
        p = q;
      }
    }
  });
  return map;
}

/// Connected components of + cells (4-connectivity); -1 for other cells.
inline std::vector<int> plus_components(const SignMap& map) {
  std::vector<int> comp(map.signs.size(), -1);
  int next = 0;
  std::deque<std::pair<int, int>> q;
  for (int j = 0; j < map.ny; ++j) {
    for (int i = 0; i < map.nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * map.nx + i;
      if (map.signs[idx] != 1 || comp[idx] >= 0) continue;
      comp[idx] = next;
      q.emplace_back(i, j);
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop_front();
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int ni = ci + di[k], nj = cj + dj[k];
          if (ni < 0 || nj < 0 || ni >= map.nx || nj >= map.ny) continue;
          const std::size_t nidx = static_cast<std::size_t>(nj) * map.nx + ni;
          if (map.signs[nidx] == 1 && comp[nidx] < 0) {
            comp[nidx] = next;
            q.emplace_back(ni, nj);
          }
        }
      }
      ++next;
    }
  }
  return comp;
}

struct EmbeddingReport {
  bool embeddable = false;
  std::pair<int, int> sectors{1, 2};
  int resolution = 0;
  /// Endpoint order along Gamma: sector i, e0 -cut- e1, e2 -cut- e3, ..., sector j.
  std::vector<cplx> endpoint_order;
  std::vector<int> components;  // component index of each bridge
  std::vector<cplx> gamma;      // representative polyline
  std::string reason;
};

namespace detail {

/// A + cell near z inside the wedge of half-angle `half` around `dir`.
inline std::optional<std::pair<int, int>> plus_cell_near(const SignMap& map, cplx z, cplx dir, double half) {
  const double h = std::max(map.dx(), map.dy());
  for (double r : {2.5, 3.0, 3.5, 4.0, 5.0, 6.0}) {
    for (int k = 0; k <= 12; ++k) {
      for (int sgn : {1, -1}) {
        const double a = std::arg(dir) + sgn * half * k / 12.0;
        int i, j;
        if (!map.cell_of(z + std::polar(r * h, a), i, j)) continue;
        if (map.at(i, j) == 1) return std::make_pair(i, j);
      }
    }
  }
  return std::nullopt;
}

inline std::vector<cplx> bfs_path(const SignMap& map, const std::vector<int>& comp, std::pair<int, int> s,
                                  std::pair<int, int> t) {
  const int nx = map.nx, ny = map.ny;
  std::vector<int> prev(static_cast<std::size_t>(nx) * ny, -2);
  std::deque<int> q;
  const int si = s.second * nx + s.first, ti = t.second * nx + t.first;
  const int cid = comp[static_cast<std::size_t>(si)];
  prev[static_cast<std::size_t>(si)] = -1;
  q.push_back(si);
  while (!q.empty()) {
    const int cur = q.front();
    q.pop_front();
    if (cur == ti) break;
    const int ci = cur % nx, cj = cur / nx;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ni = ci + di[k], nj = cj + dj[k];
      if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
      const int n = nj * nx + ni;
      if (comp[static_cast<std::size_t>(n)] == cid && prev[static_cast<std::size_t>(n)] == -2) {
        prev[static_cast<std::size_t>(n)] = cur;
        q.push_back(n);
      }
    }
  }
  std::vector<cplx> path;
  if (prev[static_cast<std::size_t>(ti)] == -2) return path;
  for (int cur = ti; cur != -1; cur = prev[static_cast<std::size_t>(cur)]) path.push_back(map.center(cur % nx, cur / nx));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

/// Cubic convergence sector bisectors lambda_k = 2 pi k / 3.
inline double sector_angle(int k) { return 2.0 * pi * k / 3.0; }

/// Decides on one sign map whether the cuts extend through {Re G > 0} to the
/// two sectors: every bridge (sector -> first endpoint, cut-to-cut, last
/// endpoint -> sector) must lie in a single + component.
inline EmbeddingReport embed_on_map(const std::vector<CutCandidate>& cuts, const SignMap& map, std::pair<int, int> sectors) {
  EmbeddingReport rep;
  rep.sectors = sectors;
  rep.resolution = map.nx;
  if (cuts.empty()) {
    rep.reason = "no cuts";
    return rep;
  }
  for (const auto& c : cuts)
    if (!c.positive) {
      rep.reason = "cut density not positive";
      return rep;
    }
  const auto comp = plus_components(map);
  auto comp_at = [&](std::pair<int, int> c) { return comp[static_cast<std::size_t>(c.second) * map.nx + c.first]; };

  // Seeds in the wedge opposite each cut's outgoing direction.
  struct End {
    cplx z;
    std::optional<std::pair<int, int>> cell;
  };
  std::vector<std::array<End, 2>> ends;
  for (const auto& c : cuts) {
    const auto& s = c.line.samples;
    auto seed = [&](cplx e, cplx inward) {
      const cplx u = inward - e;
      return End{e, detail::plus_cell_near(map, e, -u / std::abs(u), pi / 3.0)};
    };
    const std::size_t k = std::min<std::size_t>(s.size() - 1, 3);
    ends.push_back({seed(s.front(), s[k]), seed(s.back(), s[s.size() - 1 - k])});
  }
  auto sector_cell = [&](int k) -> std::optional<std::pair<int, int>> {
    const double R = 0.92 * std::min({-map.bbox.x0, map.bbox.x1, -map.bbox.y0, map.bbox.y1});
    const cplx z = std::polar(R, sector_angle(k));
    int i, j;
    if (!map.cell_of(z, i, j)) return std::nullopt;
    if (map.at(i, j) == 1) return std::make_pair(i, j);
    return detail::plus_cell_near(map, z, -z / std::abs(z), pi);
  };
  const auto si = sector_cell(sectors.first), sj = sector_cell(sectors.second);
  if (!si || !sj) {
    rep.reason = "sector seed not in a + region";
    return rep;
  }

  // Orders: permutations of cuts with both orientations each.
  std::vector<int> perm(cuts.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  const int n = static_cast<int>(cuts.size());
  do {
    for (int flips = 0; flips < (1 << n); ++flips) {
      std::vector<End> seq;
      for (int idx : perm) {
        const bool f = (flips >> idx) & 1;
        seq.push_back(ends[static_cast<std::size_t>(idx)][f ? 1 : 0]);
        seq.push_back(ends[static_cast<std::size_t>(idx)][f ? 0 : 1]);
      }
      bool ok = true;
      std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> bridges;
      std::vector<std::pair<int, int>> stops{*si};
      for (const auto& e : seq) {
        if (!e.cell) {
          ok = false;
          break;
        }
        stops.push_back(*e.cell);
      }
      if (!ok) continue;
      stops.push_back(*sj);
      std::vector<int> comps;
      for (std::size_t b = 0; b + 1 < stops.size(); b += 2) {
        if (comp_at(stops[b]) != comp_at(stops[b + 1])) {
          ok = false;
          break;
        }
        comps.push_back(comp_at(stops[b]));
      }
      if (!ok) continue;
      rep.embeddable = true;
      rep.components = comps;
      for (const auto& e : seq) rep.endpoint_order.push_back(e.z);
      // Representative Gamma.
      for (std::size_t b = 0; b + 1 < stops.size(); b += 2) {
        const auto path = detail::bfs_path(map, comp, stops[b], stops[b + 1]);
        rep.gamma.insert(rep.gamma.end(), path.begin(), path.end());
        if (b / 2 < static_cast<std::size_t>(n)) {
          const int idx = perm[b / 2];
          const bool f = (flips >> idx) & 1;
          auto s = cuts[static_cast<std::size_t>(idx)].line.samples;
          if (f) std::reverse(s.begin(), s.end());
          rep.gamma.insert(rep.gamma.end(), s.begin(), s.end());
        }
      }
      return rep;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  rep.reason = "no + region bridges the cuts to both sectors";
  return rep;
}

/// Embedding at resolution n and 2n; if they disagree, 4n decides when it
/// agrees with 2n, otherwise InconclusiveResolution.
inline EmbeddingReport embed_s_curve(const std::vector<CutCandidate>& cuts, const TrueBranch& branch,
                                     std::pair<int, int> sectors, int base_resolution = 96,
                                     std::optional<BBox> box = std::nullopt) {
  const BBox bb = box ? *box : default_bbox(branch.curve());
  auto run = [&](int n) { return embed_on_map(cuts, sign_map(branch, bb, n, n), sectors); };
  if (cuts.empty() || std::any_of(cuts.begin(), cuts.end(), [](const CutCandidate& c) { return !c.positive; })) {
    return embed_on_map(cuts, SignMap{}, sectors);
  }
  const EmbeddingReport r1 = run(base_resolution);
  const EmbeddingReport r2 = run(2 * base_resolution);
  if (r1.embeddable == r2.embeddable) return r2;
  const EmbeddingReport r4 = run(4 * base_resolution);
  if (r4.embeddable == r2.embeddable) return r4;
  fail(ErrorCode::InconclusiveResolution, "embedding changes under grid refinement");
}

/// Sign map as a plain-text grey map: 255 for +, 0 for -, 128 for undecided.
/// The first row written is the top of the box.
inline std::string to_pgm(const SignMap& map) {
  std::string out = "P2\n" + std::to_string(map.nx) + " " + std::to_string(map.ny) + "\n255\n";
  for (int j = map.ny - 1; j >= 0; --j) {
    for (int i = 0; i < map.nx; ++i) {
      const int v = map.at(i, j) > 0 ? 255 : (map.at(i, j) < 0 ? 0 : 128);
      out += std::to_string(v);
      out += (i + 1 < map.nx) ? ' ' : '\n';
    }
  }
  return out;
}

}  // namespace scurve
