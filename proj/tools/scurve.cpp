// scurve: command-line driver for the cubic model W = z^3/3 - t z.
//
// Exit codes: 0 ok, 1 numerical failure, 2 usage. Failures print a JSON
// object {"error": {...}} on stderr.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "scurve/abelian.hpp"
#include "scurve/io.hpp"
#include "scurve/onecut.hpp"
#include "scurve/orthopoly.hpp"
#include "scurve/phase.hpp"
#include "scurve/stokes.hpp"
#include "scurve/twocut.hpp"

using namespace scurve;
using io::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cplx need_complex(const std::string& name, const std::string& s) {
  auto z = io::parse_complex(s);
  if (!z) throw UsageError("malformed complex value for --" + name + ": '" + s + "'");
  return *z;
}

std::pair<int, int> need_pair(const std::string& s) {
  int i = -1, j = -1;
  char comma = 0;
  std::istringstream in(s);
  if (!(in >> i >> comma >> j) || comma != ',' || i < 0 || j < 0 || i > 2 || j > 2 || i == j)
    throw UsageError("--pair expects two distinct sector indices in 0..2, e.g. 1,2");
  return {i, j};
}

struct Common {
  std::string out = ".";
  std::string format = "json";
  std::string config;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--format", c.format, "summary format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--config", c.config, "JSON file whose keys override the flags of this command");
}

/// Applies a JSON config to the options of a parsed subcommand.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.key() == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + it.key());
    if (!opt) throw UsageError("unknown config key '" + it.key() + "'");
    std::string v;
    if (it->is_string()) {
      v = it->get<std::string>();
    } else if (it->is_boolean()) {
      v = it->get<bool>() ? "true" : "false";
    } else if (it->is_array() && it->size() == 2) {
      v = (*it)[0].dump() + "," + (*it)[1].dump();
    } else {
      v = it->dump();
    }
    opt->clear();
    opt->add_result(v);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config key '" + it.key() + "': " + e.what());
    }
  }
}

/// The effective options of a subcommand, for hashing and for the metadata.
json effective_config(CLI::App* sub) {
  json c = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name == "out") continue;
    const auto res = opt->results();
    if (!res.empty()) {
      c[name] = res.size() == 1 ? json(res[0]) : json(res);
    } else if (!opt->get_default_str().empty()) {
      c[name] = opt->get_default_str();
    }
  }
  return c;
}

std::string out_path(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

void write_summary(const Common& c, const std::string& stem, const json& meta, const json& body) {
  if (c.format == "json") {
    io::write_json(out_path(c, stem + ".json"), meta, body);
  } else {
    io::write_file(out_path(c, stem + ".csv"), io::csv_preamble(meta) + "key,value\n" + io::to_kv_csv(body));
  }
}

json cut_json(const CutCandidate& cut) {
  return {{"lo", io::to_json(cut.line.origin)},
          {"hi", io::to_json(cut.line.target)},
          {"charge", io::fmt(cut.charge)},
          {"positive", cut.positive}};
}

/// Stokes graph, cut analysis and sign map of a curve; files go next to the summary.
json analyze_and_export(const SpectralCurve& curve, const Common& c, const json& meta, std::pair<int, int> pair,
                        int resolution) {
  json body;
  const auto lines = trace_all(curve);
  io::write_file(out_path(c, "stokes.csv"), io::stokes_csv(meta, lines));
  const CutAnalysis an = analyze_cuts(curve);
  json cuts = json::array();
  for (const auto& cut : an.cuts) cuts.push_back(cut_json(cut));
  body["cuts"] = cuts;
  body["cuts_found"] = an.branch.has_value();
  body["all_positive"] = an.all_positive();
  if (an.branch) {
    const SignMap map = sign_map(*an.branch, default_bbox(curve), resolution, resolution);
    io::write_file(out_path(c, "signmap.pgm"), to_pgm(map));
    io::write_file(out_path(c, "signmap.csv"), io::sign_map_csv(meta, map));
    if (an.all_positive()) {
      const EmbeddingReport e = embed_s_curve(an.cuts, *an.branch, pair);
      body["embedding"] = {{"sectors", {pair.first, pair.second}},
                           {"embeddable", e.embeddable},
                           {"resolution", e.resolution},
                           {"endpoint_order", io::to_json(e.endpoint_order)},
                           {"reason", e.reason}};
    }
  }
  return body;
}

json twocut_json(cplx t, const TwoCutSolution& s) {
  const auto e = s.endpoints();
  double ce = 0.0;
  for (cplx v : ce_residual(e, cubic_potential(t), {s.r})) ce = std::max(ce, std::abs(v));
  const auto r_abelian = solve_r(e, cubic_potential(t));
  return {{"endpoints", io::to_json(e)},
          {"r", io::fmt(s.r)},
          {"r_periods", io::fmt(compute_r(s, t))},
          {"r_abelian", io::fmt(r_abelian.empty() ? 0.0 : r_abelian[0])},
          {"residual_norm", io::fmt(s.residual_norm)},
          {"endpoint_sum", io::to_json(s.a + s.b + s.c + s.d)},
          {"ce_residual_max", io::fmt(ce)}};
}

std::string mp_str(const mp_real& x, int digits) { return x.str(digits, std::ios_base::scientific); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S-curves, equilibrium densities and phase structure of the cubic model W = z^3/3 - t z"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kVersion);

  // onecut
  Common c_one;
  std::string one_t;
  int one_k = 0, one_res = 128;
  std::string one_pair = "1,2";
  auto* one = app.add_subcommand("onecut", "one-cut solution on branch k: endpoints, G(-beta), Stokes graph, sign map");
  one->add_option("--t", one_t, "complex t, e.g. -1.1 or -1.5+1.5i")->required();
  one->add_option("--k", one_k, "branch of beta (0, 1, 2)")->check(CLI::Range(0, 2))->capture_default_str();
  one->add_option("--pair", one_pair, "sector pair for the embedding check")->capture_default_str();
  one->add_option("--resolution", one_res, "sign map cells per side")->check(CLI::Range(64, 2048))->capture_default_str();
  add_common(one, c_one);

  // twocut
  Common c_two;
  std::string two_t, two_seed;
  std::string two_pair = "1,2";
  int two_res = 128;
  auto* two = app.add_subcommand("twocut", "two-cut solution in canonical labeling with Stokes graph and charges");
  two->add_option("--t", two_t, "complex t")->required();
  two->add_option("--seed", two_seed, "JSON file {\"t\": [re, im], \"endpoints\": [[re, im] x 4]} to continue from");
  two->add_option("--pair", two_pair, "sector pair for the embedding check")->capture_default_str();
  two->add_option("--resolution", two_res, "sign map cells per side")->check(CLI::Range(64, 2048))->capture_default_str();
  add_common(two, c_two);

  // phase
  Common c_phase;
  std::string ph_grid = "-3:3:-3:3:41", ph_pair = "1,2";
  int ph_res = 64;
  bool ph_no_boundaries = false;
  auto* ph = app.add_subcommand("phase", "classify a grid of t values and trace the critical curves");
  ph->add_option("--grid", ph_grid, "x0:x1:y0:y1:N")->capture_default_str();
  ph->add_option("--pair", ph_pair, "sector pair")->capture_default_str();
  ph->add_option("--resolution", ph_res, "base sign map resolution of the embedding check")
      ->check(CLI::Range(64, 1024))
      ->capture_default_str();
  ph->add_flag("--no-boundaries", ph_no_boundaries, "skip tracing the critical curves");
  add_common(ph, c_phase);

  // stokes
  Common c_st;
  std::string st_model = "cubic", st_t = "0", st_endpoints, st_pair = "1,2";
  int st_k = 0, st_res = 128;
  auto* st = app.add_subcommand("stokes", "Stokes graph and sign map of a curve given by a model or by endpoints");
  st->add_option("--model", st_model, "gaussian or cubic")->check(CLI::IsMember({"gaussian", "cubic"}))->capture_default_str();
  st->add_option("--t", st_t, "complex t (cubic)")->capture_default_str();
  st->add_option("--k", st_k, "one-cut branch when no endpoints are given")->check(CLI::Range(0, 2))->capture_default_str();
  st->add_option("--endpoints", st_endpoints, "JSON list of [re, im] endpoints; h is the polynomial part of W'/w");
  st->add_option("--pair", st_pair, "sector pair for the embedding check")->capture_default_str();
  st->add_option("--resolution", st_res, "sign map cells per side")->check(CLI::Range(64, 2048))->capture_default_str();
  add_common(st, c_st);

  // zeros
  Common c_z;
  std::string z_t, z_pair = "1,2", z_hinge = "0";
  int z_n = 24, z_digits = 120;
  bool z_dump = false;
  auto* zs = app.add_subcommand("zeros", "zeros of the orthogonal polynomial p_n and their distance to the cuts");
  zs->add_option("--t", z_t, "complex t")->required();
  zs->add_option("--n", z_n, "degree")->check(CLI::Range(1, 400))->capture_default_str();
  zs->add_option("--pair", z_pair, "sectors joined by the contour")->capture_default_str();
  zs->add_option("--digits", z_digits, "working precision in decimal digits")->check(CLI::Range(50, 5000))->capture_default_str();
  zs->add_option("--hinge", z_hinge, "point where the two rays of the contour meet")->capture_default_str();
  zs->add_flag("--dump-moments", z_dump, "also write the moments as decimal strings");
  add_common(zs, c_z);

  // sweep
  Common c_sw;
  std::string sw_path, sw_pair = "1,2";
  int sw_steps = 20, sw_res = 64;
  auto* sw = app.add_subcommand("sweep", "classify along a path of t values and report transitions");
  sw->add_option("--path", sw_path, "\"t0 -> t1 -> ...\"")->required();
  sw->add_option("--steps", sw_steps, "subdivisions per segment")->check(CLI::Range(1, 100000))->capture_default_str();
  sw->add_option("--pair", sw_pair, "sector pair")->capture_default_str();
  sw->add_option("--resolution", sw_res, "base sign map resolution of the embedding check")
      ->check(CLI::Range(64, 1024))
      ->capture_default_str();
  add_common(sw, c_sw);

  auto usage_error = [](const std::string& msg) {
    json e = {{"error", {{"code", 2}, {"name", "Usage"}, {"message", msg}}}};
    std::cerr << e.dump() << "\n";
    return 2;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  try {
    for (auto [sub, common] : std::initializer_list<std::pair<CLI::App*, Common*>>{
             {one, &c_one}, {two, &c_two}, {ph, &c_phase}, {st, &c_st}, {zs, &c_z}, {sw, &c_sw}}) {
      if (sub->parsed() && !common->config.empty()) apply_config(sub, common->config);
    }

    if (one->parsed()) {
      const cplx t = need_complex("t", one_t);
      const auto pair = need_pair(one_pair);
      const json meta = io::metadata("onecut", effective_config(one));
      const OneCutSolution s = solve_cubic_branch(t, one_k);
      const SpectralCurve curve = onecut_curve(cubic_potential(t), s);
      json body = {{"t", io::to_json(t)},
                   {"k", one_k},
                   {"beta", io::to_json(s.beta)},
                   {"delta2", io::to_json(s.delta2)},
                   {"endpoints", io::to_json(s.endpoints())},
                   {"residual", io::fmt(s.residual)},
                   {"branch_collision", s.branch_collision},
                   {"G_minus_beta", io::to_json(g_cubic_at_minus_beta(t, one_k))}};
      json a = analyze_and_export(curve, c_one, meta, pair, one_res);
      for (auto it = a.begin(); it != a.end(); ++it) body[it.key()] = *it;
      body["report"] = a["cuts_found"].get<bool>() ? "short line a-b" : "no short line a-b";
      write_summary(c_one, "onecut", meta, body);
      std::cout << body["report"].get<std::string>() << "\n";
    } else if (two->parsed()) {
      const cplx t = need_complex("t", two_t);
      const auto pair = need_pair(two_pair);
      const json meta = io::metadata("twocut", effective_config(two));
      TwoCutSolution sol;
      if (!two_seed.empty()) {
        std::ifstream f(two_seed);
        if (!f) throw UsageError("cannot read seed file " + two_seed);
        json sj;
        cplx t0;
        std::vector<cplx> e;
        try {
          sj = json::parse(f);
          auto get = [](const json& v) {
            auto z = io::complex_from_json(v);
            if (!z) throw UsageError("malformed complex in seed file");
            return *z;
          };
          t0 = get(sj.at("t"));
          for (const auto& v : sj.at("endpoints")) e.push_back(get(v));
        } catch (const json::exception& ex) {
          throw UsageError(std::string("malformed seed file: ") + ex.what());
        }
        if (e.size() != 4) throw UsageError("seed file needs four endpoints");
        const TwoCutSolution seed = continue_in_t({t0, t}, TwoCutSolution{e[0], e[1], e[2], e[3]}).back();
        const auto cands = canonical_twocut(t, seed);
        if (cands.empty()) fail(ErrorCode::NoConvergence, "no canonical labeling of the continued seed");
        sol = cands.front();
      } else {
        sol = solve_twocut(t).front();
      }
      json body = twocut_json(t, sol);
      body["t"] = io::to_json(t);
      json a = analyze_and_export(twocut_curve(sol), c_two, meta, pair, two_res);
      for (auto it = a.begin(); it != a.end(); ++it) body[it.key()] = *it;
      write_summary(c_two, "twocut", meta, body);
    } else if (ph->parsed()) {
      const auto pair = need_pair(ph_pair);
      double x0, x1, y0, y1;
      int N;
      char c1, c2, c3, c4;
      std::istringstream in(ph_grid);
      if (!(in >> x0 >> c1 >> x1 >> c2 >> y0 >> c3 >> y1 >> c4 >> N) || c1 != ':' || c2 != ':' || c3 != ':' ||
          c4 != ':' || N < 2 || x1 <= x0 || y1 <= y0)
        throw UsageError("--grid expects x0:x1:y0:y1:N with x0 < x1, y0 < y1, N >= 2");
      const json meta = io::metadata("phase", effective_config(ph));
      PhaseOptions opt;
      opt.base_resolution = ph_res;
      const auto grid = classify_grid(x0, x1, y0, y1, N, N, pair, opt);
      std::string raster = io::csv_preamble(meta) + "i,j,re,im,label\n";
      std::map<std::string, int> counts;
      for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const auto& g = grid[idx];
        raster += std::to_string(idx % static_cast<std::size_t>(N)) + "," + std::to_string(idx / static_cast<std::size_t>(N)) +
                  "," + io::fmt(g.t.real()) + "," + io::fmt(g.t.imag()) + "," + g.label + "\n";
        ++counts[g.label];
      }
      io::write_file(out_path(c_phase, "phase_raster.csv"), raster);
      json body;
      body["grid"] = {{"x0", x0}, {"x1", x1}, {"y0", y0}, {"y1", y1}, {"n", N}};
      body["counts"] = counts;
      body["t_c"] = io::to_json(critical_t_on_ray(0, pi));
      if (!ph_no_boundaries) {
        std::string b = io::csv_preamble(meta) + "k,index,re,im\n";
        json closed = json::array();
        for (int k = 0; k < 3; ++k) {
          const PhaseBoundary pb = trace_boundary(k, boundary_seed(k));
          for (std::size_t i = 0; i < pb.polyline.size(); ++i)
            b += std::to_string(k) + "," + std::to_string(i) + "," + io::fmt(pb.polyline[i].real()) + "," +
                 io::fmt(pb.polyline[i].imag()) + "\n";
          closed.push_back(pb.closed);
        }
        io::write_file(out_path(c_phase, "phase_boundaries.csv"), b);
        body["boundary_closed"] = closed;
      }
      write_summary(c_phase, "phase", meta, body);
    } else if (st->parsed()) {
      const auto pair = need_pair(st_pair);
      const json meta = io::metadata("stokes", effective_config(st));
      SpectralCurve curve;
      if (st_model == "gaussian") {
        curve = SpectralCurve::from_potential(gaussian_potential(), {-2.0, 2.0});
      } else {
        const cplx t = need_complex("t", st_t);
        if (!st_endpoints.empty()) {
          json ej;
          try {
            ej = json::parse(st_endpoints);
          } catch (const json::exception&) {
            throw UsageError("--endpoints must be a JSON list of [re, im] pairs");
          }
          std::vector<cplx> e;
          for (const auto& v : ej) {
            auto z = io::complex_from_json(v);
            if (!z) throw UsageError("malformed endpoint " + v.dump());
            e.push_back(*z);
          }
          if (e.size() < 2 || e.size() % 2) throw UsageError("--endpoints needs an even number (>= 2) of points");
          curve = SpectralCurve::from_potential(cubic_potential(t), e);
        } else {
          curve = onecut_curve(cubic_potential(t), solve_cubic_branch(t, st_k));
        }
      }
      json body;
      json roots = json::array();
      for (const auto& r : curve.roots()) roots.push_back({{"z", io::to_json(r.z)}, {"multiplicity", r.multiplicity}});
      body["roots"] = roots;
      json a = analyze_and_export(curve, c_st, meta, pair, st_res);
      for (auto it = a.begin(); it != a.end(); ++it) body[it.key()] = *it;
      write_summary(c_st, "stokes", meta, body);
    } else if (zs->parsed()) {
      const cplx t = need_complex("t", z_t);
      const cplx hinge = need_complex("hinge", z_hinge);
      const auto pair = need_pair(z_pair);
      const json meta = io::metadata("zeros", effective_config(zs));
      const MomentTable m = compute_cubic_moments(io::fmt(t.real()), io::fmt(t.imag()), z_n, {pair, hinge}, z_digits);
      const RecurrenceCoefficients rc = recurrence_from_moments(m);
      const ZeroSet z = zeros_of_pn(rc, z_n);
      const int shown = std::min(z_digits, 40);
      {
        PrecisionScope scope(z_digits + 10);
        std::string csv = io::csv_preamble(meta) + "re,im,index\n";
        for (std::size_t i = 0; i < z.zeros_mp.size(); ++i)
          csv += mp_str(z.zeros_mp[i].re, shown) + "," + mp_str(z.zeros_mp[i].im, shown) + "," + std::to_string(i) + "\n";
        io::write_file(out_path(c_z, "zeros.csv"), csv);
        if (z_dump) {
          std::string mc = io::csv_preamble(meta) + "k,re,im\n";
          for (std::size_t k = 0; k < m.moments.size(); ++k)
            mc += std::to_string(k) + "," + mp_str(m.moments[k].re, z_digits) + "," + mp_str(m.moments[k].im, z_digits) + "\n";
          io::write_file(out_path(c_z, "moments.csv"), mc);
        }
      }
      json body;
      body["t"] = io::to_json(t);
      body["n"] = z_n;
      body["max_residual"] = io::fmt(z.max_residual);
      body["iterations"] = z.iterations;
      body["quadrature_panels_per_unit"] = m.panels;
      try {
        const PhaseLabel l = classify_t(t, pair);
        const ZeroCutReport r = zeros_vs_cuts(z.zeros, l.cuts);
        json d = json::array();
        for (double v : r.distance) d.push_back(io::fmt(v));
        body["comparison"] = {{"phase", short_label(l)},
                              {"counts", r.counts},
                              {"hausdorff", io::fmt(r.hausdorff)},
                              {"nearest_cut", r.nearest_cut},
                              {"distance", d}};
      } catch (const Error& e) {
        body["comparison"] = {{"phase", "unclassified"}, {"reason", e.what()}};
      }
      write_summary(c_z, "zeros_report", meta, body);
    } else if (sw->parsed()) {
      const auto pair = need_pair(sw_pair);
      const auto nodes = io::parse_path(sw_path);
      if (!nodes) throw UsageError("--path expects \"t0 -> t1 [-> ...]\"");
      const json meta = io::metadata("sweep", effective_config(sw));
      std::vector<cplx> path{nodes->front()};
      for (std::size_t s = 1; s < nodes->size(); ++s)
        for (int i = 1; i <= sw_steps; ++i)
          path.push_back((*nodes)[s - 1] + ((*nodes)[s] - (*nodes)[s - 1]) * (static_cast<double>(i) / sw_steps));
      PhaseOptions opt;
      opt.base_resolution = sw_res;
      std::vector<GridLabel> labels;
      const auto events = transition_report(path, pair, opt, TwoCutCatalogue::standard(), &labels);
      std::string log = io::csv_preamble(meta) + "index,re,im,label,endpoints\n";
      for (std::size_t i = 0; i < labels.size(); ++i) {
        std::string e;
        if (labels[i].detail) {
          const PhaseLabel& l = *labels[i].detail;
          std::vector<cplx> pts;
          if (l.twocut) {
            pts = l.twocut->endpoints();
          } else if (l.kind == PhaseKind::OneCut) {
            pts = solve_cubic_branch(l.t, l.branch).endpoints();
          }
          for (cplx p : pts) e += (e.empty() ? "" : " ") + io::fmt(p.real()) + (p.imag() < 0 ? "" : "+") + io::fmt(p.imag()) + "i";
        }
        log += std::to_string(i) + "," + io::fmt(labels[i].t.real()) + "," + io::fmt(labels[i].t.imag()) + "," +
               labels[i].label + "," + e + "\n";
      }
      io::write_file(out_path(c_sw, "sweep_log.csv"), log);
      json ev = json::array();
      for (const auto& e : events)
        ev.push_back({{"kind", to_string(e.kind)},
                      {"t", io::to_json(e.t)},
                      {"from", e.from},
                      {"to", e.to},
                      {"closest_pair_distance", io::fmt(e.closest_pair_distance)}});
      json body;
      body["events"] = ev;
      if (c_sw.format == "json") {
        io::write_json(out_path(c_sw, "events.json"), meta, body);
      } else {
        std::string csv = io::csv_preamble(meta) + "kind,re,im,from,to\n";
        for (const auto& e : events)
          csv += std::string(to_string(e.kind)) + "," + io::fmt(e.t.real()) + "," + io::fmt(e.t.imag()) + "," + e.from +
                 "," + e.to + "\n";
        io::write_file(out_path(c_sw, "events.csv"), csv);
      }
      for (const auto& e : events) std::cout << to_string(e.kind) << " at " << io::fmt(e.t.real()) << (e.t.imag() < 0 ? "" : "+") << io::fmt(e.t.imag()) << "i\n";
    }
  } catch (const UsageError& e) {
    return usage_error(e.what());
  } catch (const Error& e) {
    json j = {{"error", {{"code", static_cast<int>(e.code())}, {"name", to_string(e.code())}, {"message", e.what()}}}};
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json j = {{"error", {{"code", 0}, {"name", "Internal"}, {"message", e.what()}}}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 0;
}
