#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "scurve/algebra.hpp"
#include "scurve/error.hpp"
#include "scurve/stokes.hpp"

namespace scurve::io {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kEndpointOrdering =
    "cuts ordered by Im of the midpoint, then Re; each cut (lo, hi) with Im lo <= Im hi";
inline constexpr const char* kCycleOrientation =
    "A_i: twice the gap integral from cut i-1 to cut i; B_i: minus twice the sum of chord integrals of the + boundary "
    "value over cuts 0..i-1; + side is the left of each chord traversed lo -> hi";

using json = nlohmann::ordered_json;

/// Shortest decimal string that round-trips the double.
inline std::string fmt(double x) {
  if (x == 0.0) x = 0.0;
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline json to_json(cplx z) { return json::array({fmt(z.real()), fmt(z.imag())}); }

inline json to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(to_json(z));
  return a;
}

/// Accepts "a", "bi", "a+bi", "a-bi", "i", "-i" (also with j) and "[a, b]".
inline std::optional<cplx> parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) return std::nullopt;
  static const std::string num = R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))";
  static const std::regex pair_re("^\\[" + num + "," + num + "\\]$");
  static const std::regex real_re("^" + num + "$");
  static const std::regex imag_re(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\*?[ij]$)");
  static const std::regex full_re("^" + num + R"(([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)\*?[ij]$)");
  std::smatch m;
  auto coef = [](const std::string& c) {
    if (c.empty() || c == "+") return 1.0;
    if (c == "-") return -1.0;
    return std::stod(c);
  };
  if (std::regex_match(s, m, pair_re)) return cplx(std::stod(m[1]), std::stod(m[2]));
  if (std::regex_match(s, m, real_re)) return cplx(std::stod(m[1]), 0.0);
  if (std::regex_match(s, m, full_re)) return cplx(std::stod(m[1]), coef(m[2]));
  if (s == "-i" || s == "-j") return cplx(0.0, -1.0);
  if (s == "+i" || s == "+j") return cplx(0.0, 1.0);
  if (std::regex_match(s, m, imag_re)) return cplx(0.0, coef(m[1]));
  return std::nullopt;
}

/// [re, im] with numbers or decimal strings, or a string accepted by parse_complex.
inline std::optional<cplx> complex_from_json(const json& v) {
  auto num = [](const json& x) -> std::optional<double> {
    if (x.is_number()) return x.get<double>();
    if (x.is_string()) {
      auto z = parse_complex(x.get<std::string>());
      if (z && z->imag() == 0.0) return z->real();
    }
    return std::nullopt;
  };
  if (v.is_array() && v.size() == 2) {
    auto re = num(v[0]), im = num(v[1]);
    if (re && im) return cplx(*re, *im);
    return std::nullopt;
  }
  if (v.is_string()) return parse_complex(v.get<std::string>());
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  return std::nullopt;
}

/// Splits "a -> b -> c" into complex points.
inline std::optional<std::vector<cplx>> parse_path(const std::string& s) {
  std::vector<cplx> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find("->", pos);
    auto z = parse_complex(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (!z) return std::nullopt;
    out.push_back(*z);
    if (next == std::string::npos) break;
    pos = next + 2;
  }
  if (out.size() < 2) return std::nullopt;
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Metadata block attached to every output file.
inline json metadata(const std::string& command, const json& config) {
  json m;
  m["tool"] = "scurve";
  m["version"] = kVersion;
  m["schema"] = kSchemaVersion;
  m["command"] = command;
  m["config_hash"] = "fnv1a64:" + hex64(fnv1a(config.dump()));
  m["config"] = config;
  m["conventions"] = {{"endpoint_ordering", kEndpointOrdering},
                      {"cycle_orientation", kCycleOrientation},
                      {"complex", "[re, im] decimal strings"},
                      {"potential", "W = z^3/3 - t z"}};
  return m;
}

/// CSV header lines carrying the metadata, one "# key: value" per line.
inline std::string csv_preamble(const json& meta) {
  std::string s;
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    s += "# " + it.key() + ": " + (it->is_string() ? it->get<std::string>() : it->dump()) + "\n";
  }
  return s;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  f << content;
}

inline void write_json(const std::string& path, const json& meta, json body) {
  json out;
  out["meta"] = meta;
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = *it;
  write_file(path, out.dump(2) + "\n");
}

/// Flat key,value CSV of the scalar leaves of a JSON object.
inline std::string to_kv_csv(const json& body, const std::string& prefix = "") {
  std::string s;
  for (auto it = body.begin(); it != body.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      s += to_kv_csv(*it, key);
    } else {
      s += key + "," + (it->is_string() ? it->get<std::string>() : "\"" + it->dump() + "\"") + "\n";
    }
  }
  return s;
}

/// Stokes polylines with G along them: line, origin, direction, terminal, re, im, Re_G, Im_G.
inline std::string stokes_csv(const json& meta, const std::vector<StokesLine>& lines) {
  std::string s = csv_preamble(meta) + "line,origin,direction,terminal,re,im,Re_G,Im_G\n";
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const StokesLine& L = lines[l];
    for (std::size_t i = 0; i < L.samples.size(); ++i) {
      s += std::to_string(l) + "," + std::to_string(L.origin_index) + "," + std::to_string(L.direction_index) + "," +
           to_string(L.terminal) + "," + fmt(L.samples[i].real()) + "," + fmt(L.samples[i].imag()) + "," +
           fmt(L.G[i].real()) + "," + fmt(L.G[i].imag()) + "\n";
    }
  }
  return s;
}

/// Sign raster: i, j, re, im, sign (+1, -1, 0 undecided).
inline std::string sign_map_csv(const json& meta, const SignMap& map) {
  std::string s = csv_preamble(meta) + "i,j,re,im,sign\n";
  for (int j = 0; j < map.ny; ++j)
    for (int i = 0; i < map.nx; ++i) {
      const cplx z = map.center(i, j);
      s += std::to_string(i) + "," + std::to_string(j) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "," +
           std::to_string(static_cast<int>(map.at(i, j))) + "\n";
    }
  return s;
}

}  // namespace scurve::io
