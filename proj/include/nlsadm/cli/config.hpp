#pragma once

#include "nlsadm/classify.hpp"
#include "nlsadm/geometry.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace nlsadm::cli {

inline constexpr const char* kVersion = "0.1.0";

[[noreturn]] inline void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.push_back("");
  return parts;
}

inline double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t.empty()) config_error(what + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) config_error(what + ": cannot parse '" + s + "'");
  return v;
}

inline long parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) config_error(what + ": cannot parse integer '" + s + "'");
  return v;
}

/// Complex numbers are written "re,im".
inline cplx parse_complex(const std::string& s, const std::string& what) {
  const auto p = split(s, ',');
  if (p.size() != 2) config_error(what + ": expected re,im but got '" + s + "'");
  return {parse_double(p[0], what), parse_double(p[1], what)};
}

inline std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what) {
  const auto p = split(s, ',');
  if (p.size() != n) config_error(what + ": expected " + std::to_string(n) + " comma-separated values");
  std::vector<double> v;
  for (const auto& x : p) v.push_back(parse_double(x, what));
  return v;
}

/// Flat key=value text; "[section]" lines group keys. Keys in
/// [tolerances] map to tol-<key>; other sections are organisational.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  static const std::vector<std::string> sections = {"triple", "family", "grid", "cuts", "tolerances", "output", "run"};
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        config_error("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (section == "tolerances" && key.rfind("tol-", 0) != 0) key = "tol-" + key;
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IOError, "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

struct RunConfig {
  std::string command;
  double lambda = 1.0;
  std::optional<double> alpha, omega, K, c2;
  std::optional<cplx> c;
  std::optional<Family> family;
  int sign = 1;
  std::optional<Box> window;
  Resolution resolution{800, 800};
  std::string cut_strategy = "default";
  double tol_root = 1e-6;
  double tol_membership = 1e-9;
  double tol_geometry = 1e-12;
  double tol_integrator = 1e-10;
  std::string out;
  std::string format = "json";
  uint64_t seed = 1;
  int samples = 100;
  std::vector<std::string> ranges;
  std::string inject_fault;
  std::string profile = "gaussian";
  /// Canonical key=value pairs the config was built from (without `out`).
  std::map<std::string, std::string> canonical;

  Mode mode() const { return lambda > 0 ? Mode::Defocusing : Mode::Focusing; }

  bool has_triple() const { return (alpha && omega && c) || family.has_value(); }

  /// The explicit triple, or the family triple generated from its parameters.
  Triple triple() const {
    if (alpha && omega && c && !family) return Triple(*alpha, *omega, *c, mode());
    if (family) {
      FamilyParams p;
      if (alpha) p.alpha = *alpha;
      if (omega) p.omega = *omega;
      if (K) p.K = *K;
      if (c2) p.c2 = *c2;
      return generate_family(*family, p, sign);
    }
    config_error("a triple needs --alpha, --omega and --c, or --family with its parameters");
  }

  /// Lower-level cut strategy; "gamma" is resolved by the caller since it needs the roots.
  CutStrategy strategy(const RootSet& rs) const {
    CutStrategy s;
    if (cut_strategy == "default" || cut_strategy == "gamma") return s;
    if (cut_strategy.rfind("loop:", 0) == 0) {
      const auto v = parse_list(cut_strategy.substr(5), 3, "cut-strategy loop");
      return CutStrategy::loop_around(cplx(v[0], v[1]), v[2]);
    }
    if (cut_strategy.rfind("pairs:", 0) == 0) {
      s.kind = CutStrategy::Kind::Explicit;
      for (const auto& pr : split(cut_strategy.substr(6), ',')) {
        const auto ab = split(pr, '-');
        if (ab.size() != 2) config_error("cut-strategy pairs: expected i-j");
        const long i = parse_int(ab[0], "cut-strategy"), j = parse_int(ab[1], "cut-strategy");
        const long n = static_cast<long>(rs.expanded().size());
        if (i < 0 || j < 0 || i >= n || j >= n) config_error("cut-strategy pairs: index out of range");
        s.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
      return s;
    }
    config_error("unknown cut strategy '" + cut_strategy + "'");
  }

  void validate() const {
    for (double t : {tol_root, tol_membership, tol_geometry, tol_integrator})
      if (!(t > 0.0)) config_error("tolerances must be positive");
    if (resolution.nx < 64 || resolution.ny < 64) config_error("resolution must be at least 64 per axis");
    if (window) window->validate();
    if (format != "json" && format != "csv" && format != "svg") config_error("format must be json, csv or svg");
    if (samples < 1) config_error("samples must be positive");
    if (lambda != 1.0 && lambda != -1.0) config_error("lambda must be +1 or -1");
  }
};

inline RunConfig config_from_map(const std::string& command, const std::map<std::string, std::string>& kv) {
  static const std::vector<std::string> known = {
      "alpha", "omega", "c", "lambda", "family", "K", "c2", "sign", "window", "resolution", "cut-strategy",
      "tol-root", "tol-membership", "tol-geometry", "tol-integrator", "out", "format", "seed", "samples",
      "range", "inject-fault", "profile"};
  RunConfig r;
  r.command = command;
  for (const auto& [k, v] : kv) {
    if (std::find(known.begin(), known.end(), k) == known.end()) config_error("unknown key '" + k + "'");
    if (k != "out") r.canonical[k] = v;
  }
  const auto get = [&](const char* k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("alpha")) r.alpha = parse_double(*v, "alpha");
  if (auto v = get("omega")) r.omega = parse_double(*v, "omega");
  if (auto v = get("K")) r.K = parse_double(*v, "K");
  if (auto v = get("c2")) r.c2 = parse_double(*v, "c2");
  if (auto v = get("c")) r.c = parse_complex(*v, "c");
  if (auto v = get("lambda")) r.lambda = parse_double(*v, "lambda");
  if (auto v = get("family")) {
    r.family = parse_family(*v);
    if (!r.family) config_error("family must be one of A..E");
  }
  if (auto v = get("sign")) {
    const long s = parse_int(*v, "sign");
    if (s != 1 && s != -1) config_error("sign must be +1 or -1");
    r.sign = static_cast<int>(s);
  }
  if (auto v = get("window")) {
    const auto w = parse_list(*v, 4, "window");
    r.window = Box{w[0], w[1], w[2], w[3]};
  }
  if (auto v = get("resolution")) {
    const auto p = split(*v, ',');
    if (p.size() != 2) config_error("resolution: expected nx,ny");
    r.resolution = {static_cast<int>(parse_int(p[0], "resolution")), static_cast<int>(parse_int(p[1], "resolution"))};
  }
  if (auto v = get("cut-strategy")) r.cut_strategy = *v;
  if (auto v = get("tol-root")) r.tol_root = parse_double(*v, "tol-root");
  if (auto v = get("tol-membership")) r.tol_membership = parse_double(*v, "tol-membership");
  if (auto v = get("tol-geometry")) r.tol_geometry = parse_double(*v, "tol-geometry");
  if (auto v = get("tol-integrator")) r.tol_integrator = parse_double(*v, "tol-integrator");
  if (auto v = get("out")) r.out = *v;
  if (auto v = get("format")) r.format = *v;
  if (auto v = get("seed")) r.seed = static_cast<uint64_t>(parse_int(*v, "seed"));
  if (auto v = get("samples")) r.samples = static_cast<int>(parse_int(*v, "samples"));
  if (auto v = get("range")) r.ranges = split(*v, ';');
  if (auto v = get("inject-fault")) r.inject_fault = *v;
  if (auto v = get("profile")) r.profile = *v;
  r.validate();
  return r;
}

/// FNV-1a over the canonical key=value lines and the command name.
inline std::string config_hash(const RunConfig& r) {
  uint64_t h = 1469598103934665603ull;
  const auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  feed(r.command + "\n");
  for (const auto& [k, v] : r.canonical) feed(k + "=" + v + "\n");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nlsadm::cli
