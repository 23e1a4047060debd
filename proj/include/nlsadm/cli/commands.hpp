#pragma once

#include "nlsadm/cli/config.hpp"
#include "nlsadm/cli/figure.hpp"
#include "nlsadm/cli/json_out.hpp"
#include "nlsadm/cli/verify.hpp"
#include "nlsadm/scattering.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace nlsadm::cli {

/// What a command produced: a report for stdout (or --out), extra files and
/// the exit status. Files are written only after the command succeeds.
struct CommandResult {
  std::string report;
  std::vector<std::pair<std::string, std::string>> files;
  int exit_code = 0;
};

inline int exit_code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::OutOfWindow:
    case ErrorCode::InvalidTriple:
    case ErrorCode::InvalidPairing: return 2;
    case ErrorCode::InternalInconsistency: return 3;
    case ErrorCode::IOError: return 4;
    default: return 1;
  }
}

/// Writes via a sibling temp file and rename.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IOError, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error(ErrorCode::IOError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IOError, "cannot rename onto " + path);
  }
}

namespace detail {

inline json header(const RunConfig& cfg) {
  return json{{"schema", 1},
              {"tool", {{"name", "nlsadm"}, {"version", kVersion}}},
              {"command", cfg.command},
              {"config_hash", config_hash(cfg)}};
}

inline json triple_json(const Triple& t) {
  return json{{"lambda", t.lambda()}, {"alpha", t.alpha}, {"omega", t.omega}, {"c", to_json(t.c)}};
}

inline json roots_json(const RootSet& rs) {
  json roots = json::array();
  for (const auto& r : rs.roots) roots.push_back({{"location", to_json(r.location)}, {"multiplicity", r.multiplicity}});
  return json{{"pattern", rs.pattern_string()},
              {"residual", rs.residual},
              {"cluster_tolerance", rs.cluster_tolerance},
              {"roots", roots}};
}

inline json cut_json(const Cut& c) {
  return json{{"kind", c.kind == CutKind::Quartic ? "quartic" : "vertical"},
              {"from", to_json(c.front())},
              {"to", to_json(c.back())},
              {"vertices", c.points.size()},
              {"length", c.length()},
              {"degenerate", c.degenerate()}};
}

inline json cuts_json(const CutConfiguration& cfg) {
  json cuts = json::array();
  for (const Cut* c : cfg.all()) cuts.push_back(cut_json(*c));
  json bp = json::array();
  for (cplx b : cfg.branch_points) bp.push_back(to_json(b));
  return json{{"cuts", cuts}, {"branch_points", bp}};
}

inline json classification_json(const Classification& c) {
  json reasons = json::array();
  for (const auto& r : c.reasons) {
    json q = json::object();
    for (const auto& [k, v] : r.quantities) q[k] = v;
    reasons.push_back({{"id", r.id}, {"passed", r.passed}, {"margin", r.margin}, {"quantities", q}});
  }
  json flags = json::array();
  for (const auto& f : c.boundary_flags) flags.push_back(f);
  json j{{"verdict", to_string(c.verdict)},
         {"boundary_flags", flags},
         {"tolerance_ambiguous", c.tolerance_ambiguous},
         {"cross_check_consistent", c.cross_check_consistent}};
  j["witness_K"] = c.witness_K ? json(*c.witness_K) : json(nullptr);
  j["reasons"] = reasons;
  return j;
}

inline CutStrategy resolve_strategy(const RunConfig& cfg, const Triple& t, const RootSet& rs) {
  if (cfg.cut_strategy != "gamma") return cfg.strategy(rs);
  // Each upper-half-plane simple zero runs along Gamma to the real axis and back to its conjugate.
  std::vector<std::vector<cplx>> chains;
  for (const auto& r : rs.roots) {
    if (r.location.imag() <= rs.cluster_tolerance) continue;
    if (r.multiplicity != 1) config_error("cut-strategy gamma needs simple non-real zeros");
    chains.push_back(gamma_cut(t, r.location));
  }
  for (const auto& r : rs.roots)
    if (std::abs(r.location.imag()) <= rs.cluster_tolerance && r.multiplicity % 2 == 1)
      config_error("cut-strategy gamma cannot pair real zeros of odd order");
  return CutStrategy::custom(std::move(chains));
}

inline BranchedOmega make_branched(const RunConfig& cfg, const Triple& t) {
  auto q = build_omega_squared(t);
  RootOptions ro;
  ro.cluster_rel = cfg.tol_root;
  auto rs = solve_quartic(q, ro);
  auto cuts = build_cuts(rs, t, resolve_strategy(cfg, t, rs), cfg.tol_geometry);
  return BranchedOmega(std::move(q), std::move(rs), std::move(cuts));
}

inline Box window_for(const RunConfig& cfg, const BranchedOmega& bo) {
  return cfg.window ? *cfg.window : default_window(bo.cuts());
}

inline json box_json(const Box& b) { return json{b.x0, b.x1, b.y0, b.y1}; }

/// Base path for multi-file outputs: --out without its extension.
inline std::string output_base(const RunConfig& cfg, const std::string& fallback) {
  std::string b = cfg.out.empty() ? fallback : cfg.out;
  const auto slash = b.find_last_of('/');
  const auto dot = b.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) b = b.substr(0, dot);
  return b;
}

}  // namespace detail

inline CommandResult cmd_classify(const RunConfig& cfg) {
  const Triple t = cfg.triple();
  ClassifyOptions opt;
  opt.tol = cfg.tol_membership;
  opt.verify = true;
  const auto c = classify(t, opt);
  json j = detail::header(cfg);
  j["input"] = detail::triple_json(t);
  if (cfg.family) j["input"]["family"] = to_string(*cfg.family);
  j["classification"] = detail::classification_json(c);
  json checks = json::array();
  try {
    const auto bo = detail::make_branched(cfg, t);
    j["roots"] = detail::roots_json(bo.roots());
    j["cuts"] = detail::cuts_json(bo.cuts());
    // Pattern expected from the verdict, where the verdict names a family.
    if (static_cast<int>(c.verdict) <= static_cast<int>(Verdict::FamilyE)) {
      const auto f = static_cast<Family>(static_cast<int>(c.verdict));
      const bool ok = bo.roots().pattern() == expected_pattern(f, t);
      checks.push_back({{"id", "root_pattern_matches_family"}, {"passed", ok}, {"margin", ok ? 0.0 : -1.0}});
    }
  } catch (const IllConditionedError& e) {
    j["roots"] = json{{"error", e.what()}};
  }
  if (t.mode == Mode::Defocusing) {
    const auto ex = exclusion_rules(t);
    j["exclusion_rules"] = {{"evaluated", ex.evaluated},
                            {"complex_pair_first_quadrant", ex.complex_pair_first_quadrant},
                            {"odd_order_real_zero", ex.odd_order_real_zero}};
    checks.push_back({{"id", "exclusion_cross_check"}, {"passed", c.cross_check_consistent}, {"margin", 0.0}});
    if (std::abs(t.c1()) > 1e-12 * std::max(1.0, std::abs(t.c))) {
      std::optional<Family> fam;
      if (static_cast<int>(c.verdict) <= static_cast<int>(Verdict::FamilyE))
        fam = static_cast<Family>(static_cast<int>(c.verdict));
      const auto ci = cut_intersects_D1_closure(t, fam);
      json x{{"top_point", to_json(ci.top_point)},
             {"im_omega_squared", ci.top_value},
             {"sign", ci.top_point_sign},
             {"intersects_cl_D1", ci.intersects}};
      x["left_of_K"] = ci.left_of_K ? json(*ci.left_of_K) : json(nullptr);
      j["vertical_cut_intersection"] = x;
    } else {
      j["vertical_cut_intersection"] = json{{"note", "c1 = 0: the vertical cut is absent"}};
    }
  }
  j["checks"] = checks;
  return {dump_json(j), {}, 0};
}

inline CommandResult cmd_roots(const RunConfig& cfg) {
  const Triple t = cfg.triple();
  json j = detail::header(cfg);
  j["input"] = detail::triple_json(t);
  const auto q = build_omega_squared(t);
  j["quartic"] = json(q.coeffs);
  RootOptions ro;
  ro.cluster_rel = cfg.tol_root;
  const auto rs = solve_quartic(q, ro);
  j["roots"] = detail::roots_json(rs);
  return {dump_json(j), {}, 0};
}

inline CommandResult cmd_curves(const RunConfig& cfg) {
  const Triple t = cfg.triple();
  const auto bo = detail::make_branched(cfg, t);
  const Box w = detail::window_for(cfg, bo);
  const auto g = trace_gamma(t, w, cfg.resolution);
  if (cfg.format == "csv") {
    std::string s = "k1,k2,tag\n";
    for (std::size_t i = 0; i < g.polylines.size(); ++i)
      for (cplx z : g.polylines[i])
        s += format_double(z.real()) + "," + format_double(z.imag()) + ",gamma:" + std::to_string(i) + "\n";
    int id = 0;
    for (const Cut* c : bo.cuts().all()) {
      if (c->degenerate()) continue;
      for (cplx z : c->points)
        s += format_double(z.real()) + "," + format_double(z.imag()) + ",cut:" + std::to_string(id) + "\n";
      ++id;
    }
    return {s, {}, 0};
  }
  json j = detail::header(cfg);
  j["input"] = detail::triple_json(t);
  j["window"] = detail::box_json(w);
  j["real_intersections"] = json(g.real_intersections);
  j["curve_tolerance"] = g.curve_tolerance;
  json polys = json::array();
  for (const auto& p : g.polylines) {
    json pts = json::array();
    for (cplx z : p) pts.push_back(json{z.real(), z.imag()});
    polys.push_back(pts);
  }
  j["gamma"] = polys;
  j["cuts"] = detail::cuts_json(bo.cuts());
  return {dump_json(j), {}, 0};
}

inline CommandResult cmd_regions(const RunConfig& cfg) {
  const Triple t = cfg.triple();
  const auto bo = detail::make_branched(cfg, t);
  const Box w = detail::window_for(cfg, bo);
  const auto p = partition_domains(bo, w, cfg.resolution);
  json j = detail::header(cfg);
  j["input"] = detail::triple_json(t);
  j["window"] = detail::box_json(w);
  j["resolution"] = {cfg.resolution.nx, cfg.resolution.ny};
  json counts = json::object();
  for (auto l : {DomainLabel::D1, DomainLabel::D2, DomainLabel::D3, DomainLabel::D4, DomainLabel::Boundary,
                 DomainLabel::Cut})
    counts[to_string(l)] = p.count(l);
  j["cell_counts"] = counts;
  j["d1_components"] = p.components();
  j["d1_component_sizes"] = json(p.component_sizes);
  j["d1_minus_C_connected"] = p.d1_connected();
  const auto rc = resample_labels(bo, p, static_cast<std::size_t>(100 * cfg.samples), cfg.seed);
  j["resample"] = {{"tested", rc.tested}, {"matched", rc.matched}, {"rate", rc.rate()}};
  return {dump_json(j), {}, 0};
}

inline CommandResult cmd_figure(const RunConfig& cfg) {
  const Triple t = cfg.triple();
  const auto bo = detail::make_branched(cfg, t);
  const Box w = detail::window_for(cfg, bo);
  const auto fig = build_figure(bo, w, cfg.resolution);
  const auto signs = compute_sign_field(t, w, cfg.resolution);
  const std::string base = detail::output_base(cfg, "figure");
  const std::string grid_name = std::filesystem::path(base + ".grid.bin").filename().string();
  CommandResult r;
  r.files.push_back({base + ".svg", render_svg(fig)});
  r.files.push_back({base + ".csv", render_csv(fig)});
  r.files.push_back({base + ".grid.bin", render_sign_grid(signs)});
  r.files.push_back({base + ".grid.json", dump_json(sign_grid_header(signs, grid_name))});
  json j = detail::header(cfg);
  j["input"] = detail::triple_json(t);
  j["window"] = detail::box_json(w);
  std::size_t roots = 0, bps = 0;
  for (const auto& rt : fig.roots) roots += w.contains(rt.location);
  for (cplx b : fig.branch_points) bps += w.contains(b);
  j["root_markers"] = roots;
  j["branch_point_markers"] = bps;
  j["d1_components"] = fig.partition.components();
  json files = json::array();
  for (const auto& f : r.files) files.push_back(f.first);
  j["files"] = files;
  r.report = dump_json(j);
  return r;
}

inline CommandResult cmd_verify(const RunConfig& cfg) {
  const auto results = run_invariants(cfg);
  json j = detail::header(cfg);
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["fault"] = cfg.inject_fault.empty() ? json(nullptr) : json(cfg.inject_fault);
  json inv = json::array();
  json failed = json::array();
  for (const auto& r : results) {
    inv.push_back({{"id", r.id},
                   {"samples", r.samples},
                   {"worst", r.worst},
                   {"threshold", r.threshold},
                   {"margin", r.threshold - r.worst},
                   {"passed", r.passed()}});
    if (!r.passed()) failed.push_back(r.id);
  }
  j["invariants"] = inv;
  j["failed"] = failed;
  j["passed"] = failed.empty();
  return {dump_json(j), {}, failed.empty() ? 0 : 1};
}

namespace detail {

struct Axis {
  std::string name;
  std::vector<double> values;
};

/// n lattice points on an interval; a closed end is included, an open end
/// is not.
inline std::vector<double> lattice(double lo, double hi, int n, bool lo_closed, bool hi_closed) {
  std::vector<double> v;
  if (n == 1) {
    v.push_back(lo_closed ? lo : (hi_closed ? hi : 0.5 * (lo + hi)));
    return v;
  }
  const int gaps = n - 1 + (lo_closed ? 0 : 1) + (hi_closed ? 0 : 1);
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * (i + (lo_closed ? 0 : 1)) / gaps);
  return v;
}

/// Parses "name=lo:hi[:n]" range items.
inline std::map<std::string, std::tuple<double, double, int>> parse_ranges(const std::vector<std::string>& items,
                                                                          int default_n) {
  std::map<std::string, std::tuple<double, double, int>> m;
  for (const auto& it : items) {
    if (trim(it).empty()) continue;
    const auto eq = it.find('=');
    if (eq == std::string::npos) config_error("range '" + it + "': expected name=lo:hi[:n]");
    const std::string name = trim(it.substr(0, eq));
    if (name != "alpha" && name != "K" && name != "omega" && name != "c2")
      config_error("range: unknown parameter '" + name + "'");
    const auto p = split(it.substr(eq + 1), ':');
    if (p.size() != 2 && p.size() != 3) config_error("range '" + it + "': expected lo:hi[:n]");
    const double lo = parse_double(p[0], "range"), hi = parse_double(p[1], "range");
    const int n = p.size() == 3 ? static_cast<int>(parse_int(p[2], "range")) : default_n;
    if (n < 1 || hi < lo) config_error("range '" + it + "': need lo <= hi and n >= 1");
    m[name] = {lo, hi, n};
  }
  return m;
}

}  // namespace detail

/// Sweeps a family on a lattice. Without an explicit range, omega and c2 run
/// over the family window in normalised coordinates.
inline CommandResult cmd_scan(const RunConfig& cfg) {
  if (!cfg.family) config_error("scan needs --family");
  const Family f = *cfg.family;
  const int n = std::min(cfg.samples, 400);
  const auto ranges = detail::parse_ranges(cfg.ranges, n);
  const bool BE = f == Family::B || f == Family::E;
  const std::string scale_name = BE ? "K" : "alpha";
  const double scale_default = BE ? (cfg.K ? *cfg.K : 1.0) : (cfg.alpha ? *cfg.alpha : 1.0);
  std::vector<double> scales{scale_default};
  if (auto it = ranges.find(scale_name); it != ranges.end()) {
    const auto [lo, hi, m] = it->second;
    scales = detail::lattice(lo, hi, m, true, true);
  }

  std::string csv = "family," + scale_name + ",omega_param,c2_param,alpha,omega,c1,c2,verdict,boundary_flags,pattern,round_trip\n";
  std::size_t total = 0, in_window = 0, matched = 0, out_of_window = 0, flagged = 0;
  for (double s : scales) {
    const double s2 = s * s;
    // Omega axis: the family window in omega for this scale.
    std::vector<double> omegas;
    if (auto it = ranges.find("omega"); it != ranges.end()) {
      const auto [lo, hi, m] = it->second;
      omegas = detail::lattice(lo, hi, m, true, true);
    } else {
      switch (f) {
        case Family::A: omegas = detail::lattice(-3.0 * s2, 0.0, n, true, false); break;
        case Family::C: omegas = detail::lattice(-3.0 * s2 - 10.0, -3.0 * s2, n, true, false); break;
        case Family::D: omegas = detail::lattice(-s2, -s2 + 10.0, n, true, false); break;
        case Family::B: omegas = detail::lattice(-12.0 * s2, -4.0 * s2, n, false, false); break;
        case Family::E: omegas = detail::lattice(-4.0 * s2, -3.0 * s2, n, false, true); break;
      }
    }
    for (double w : omegas) {
      std::vector<double> c2s{0.0};
      if (BE) {
        if (auto it = ranges.find("c2"); it != ranges.end()) {
          const auto [lo, hi, m] = it->second;
          c2s = detail::lattice(lo, hi, m, true, true);
        } else {
          const double edge = -(4.0 * s2 + w) / 2.0;
          c2s = f == Family::B ? detail::lattice(0.0, edge, n, false, true) : detail::lattice(edge, 0.0, n, true, false);
        }
      }
      for (double c2 : c2s) {
        ++total;
        FamilyParams p;
        p.alpha = s;
        p.K = s;
        p.omega = w;
        p.c2 = c2;
        std::string row = std::string(to_string(f)) + "," + format_double(s) + "," + format_double(w) + "," +
                          (BE ? format_double(c2) : std::string()) + ",";
        Triple t;
        try {
          t = generate_family(f, p, cfg.sign);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::OutOfWindow) throw;
          ++out_of_window;
          csv += row + ",,,,OutOfWindow,\"" + std::string(e.what()) + "\",,\n";
          continue;
        }
        ++in_window;
        const auto c = classify(t, {cfg.tol_membership, false});
        std::string flags;
        for (const auto& fl : c.boundary_flags) flags += (flags.empty() ? "" : ";") + fl;
        if (!c.boundary_flags.empty()) ++flagged;
        std::string pattern;
        try {
          pattern = solve_quartic(build_omega_squared(t)).pattern_string();
        } catch (const IllConditionedError&) {
          pattern = "ill-conditioned";
        }
        const bool ok = c.verdict == verdict_of(f);
        matched += ok;
        csv += row + format_double(t.alpha) + "," + format_double(t.omega) + "," + format_double(t.c1()) + "," +
               format_double(t.c2()) + "," + to_string(c.verdict) + "," + flags + "," + pattern + "," +
               (ok ? "1" : "0") + "\n";
      }
    }
  }
  json j = detail::header(cfg);
  j["family"] = to_string(f);
  j["rows"] = total;
  j["in_window"] = in_window;
  j["out_of_window"] = out_of_window;
  j["round_trip_matched"] = matched;
  j["flagged_rows"] = flagged;
  j["round_trip_complete"] = matched == in_window;
  CommandResult r;
  r.exit_code = matched == in_window ? 0 : 1;
  if (cfg.out.empty()) {
    r.report = csv;
    std::cerr << dump_json(j);
  } else {
    r.files.push_back({cfg.out, csv});
    r.report = dump_json(j);
  }
  return r;
}

inline CommandResult cmd_jump(const RunConfig& cfg) {
  const Triple t = cfg.triple();
  const auto bo = detail::make_branched(cfg, t);
  const int n = std::min(std::max(cfg.samples, 2), 2000);
  json j = detail::header(cfg);
  j["input"] = detail::triple_json(t);
  j["roots"] = detail::roots_json(bo.roots());
  json probes = json::array();
  std::optional<JumpProbe> first;
  for (const auto& c : bo.cuts().quartic_cuts) {
    const auto probe = background_jump(bo, c, n);
    if (!first && probe.valid) first = probe;
    json samples = json::array();
    double worst_cf = 0.0, worst_h = 0.0, min_jump = std::numeric_limits<double>::infinity();
    for (const auto& s : probe.samples) {
      samples.push_back({{"k", to_json(s.k)},
                         {"omega_plus", to_json(s.omega_plus)},
                         {"jump", to_json(s.jump)},
                         {"closed_form", to_json(s.closed_form)},
                         {"closed_form_error", s.closed_form_error},
                         {"H_difference_error", s.H_difference_error}});
      worst_cf = std::max(worst_cf, s.closed_form_error);
      worst_h = std::max(worst_h, s.H_difference_error);
      min_jump = std::min(min_jump, std::abs(s.jump));
    }
    json pj{{"cut", detail::cut_json(c)}, {"valid", probe.valid}, {"skipped", probe.skipped}};
    pj["notes"] = json(probe.notes);
    pj["worst_closed_form_error"] = worst_cf;
    pj["worst_H_difference_error"] = worst_h;
    pj["min_abs_jump"] = probe.samples.empty() ? json(nullptr) : json(min_jump);
    pj["samples"] = samples;
    probes.push_back(pj);
  }
  j["probes"] = probes;
  const auto part = partition_domains(bo, detail::window_for(cfg, bo), cfg.resolution);
  const auto v = global_relation_verdict(t, part, first);
  json gv{{"d1_minus_C_connected", v.d1_minus_C_connected}, {"lemma_applies", v.lemma_applies}};
  gv["jump_obstruction"] = v.jump_obstruction ? json(*v.jump_obstruction) : json(nullptr);
  gv["consistent_with_classify"] = v.verdict_consistent_with_classify;
  gv["classify_verdict"] = to_string(classify(t).verdict);
  gv["note"] = v.note;
  j["global_relation"] = gv;
  return {dump_json(j), {}, v.verdict_consistent_with_classify ? 0 : 3};
}

inline CommandResult run_command(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "classify") return cmd_classify(cfg);
  if (c == "roots") return cmd_roots(cfg);
  if (c == "curves") return cmd_curves(cfg);
  if (c == "regions") return cmd_regions(cfg);
  if (c == "figure") return cmd_figure(cfg);
  if (c == "verify") return cmd_verify(cfg);
  if (c == "scan") return cmd_scan(cfg);
  if (c == "jump") return cmd_jump(cfg);
  config_error("unknown command '" + c + "'");
}

/// Runs a command, writes its files and report, and maps errors to exit codes.
inline int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    CommandResult r = run_command(cfg);
    for (const auto& [path, content] : r.files) atomic_write(path, content);
    const bool report_to_file = !cfg.out.empty() && r.files.empty();
    if (report_to_file)
      atomic_write(cfg.out, r.report);
    else
      out << r.report;
    return r.exit_code;
  } catch (const Error& e) {
    err << "nlsadm: " << e.what() << "\n";
    return exit_code_of(e.code());
  } catch (const std::exception& e) {
    err << "nlsadm: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nlsadm::cli
