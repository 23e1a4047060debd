#pragma once

#include "nlsadm/cli/json_out.hpp"
#include "nlsadm/geometry.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace nlsadm::cli {

/// One run of points sharing a tag (CSV) and a layer class (SVG).
struct Chain {
  std::string tag;
  std::string layer;
  std::vector<cplx> points;
};

struct FigureData {
  Triple triple;
  Box window;
  std::vector<Chain> chains;
  std::vector<Root> roots;
  std::vector<cplx> branch_points;
  DomainPartition partition;
};

namespace detail {

/// Splits a polyline into maximal runs on which pred has a constant value.
template <class Pred>
void split_runs(const std::vector<cplx>& pts, Pred pred, const std::string& tag, const std::string& yes,
                const std::string& no, std::vector<Chain>& out) {
  std::size_t start = 0;
  while (start < pts.size()) {
    const bool v = pred(pts[start]);
    std::size_t end = start + 1;
    while (end < pts.size() && pred(pts[end]) == v) ++end;
    Chain c{tag, v ? yes : no, {}};
    // Runs share their boundary point so the drawn curve stays continuous.
    for (std::size_t i = (start > 0 ? start - 1 : start); i < end; ++i) c.points.push_back(pts[i]);
    if (c.points.size() >= 2) out.push_back(std::move(c));
    start = end;
  }
}

/// True when some segment of the chain meets the box.
inline bool touches(const std::vector<cplx>& pts, const Box& b) {
  const cplx corners[4] = {{b.x0, b.y0}, {b.x1, b.y0}, {b.x1, b.y1}, {b.x0, b.y1}};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (b.contains(pts[i])) return true;
    if (i == 0) continue;
    for (int e = 0; e < 4; ++e)
      if (planar::crosses(pts[i - 1], pts[i], corners[e], corners[(e + 1) % 4])) return true;
  }
  return false;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

/// Curves of the figure: Gamma and the real axis (thin), their parts with
/// Re Omega^2 >= 0 ({Im Omega = 0}, thick dashed) and Re Omega^2 < 0 (thin
/// dashed), and the cuts.
inline FigureData build_figure(const BranchedOmega& bo, const Box& window, Resolution res) {
  FigureData f;
  f.triple = bo.triple();
  f.window = window;
  const auto& q = bo.quartic();
  const auto re_nonneg = [&](cplx k) { return re_omega_squared(q, k.real(), k.imag()) >= 0.0; };

  const auto gamma = trace_gamma(f.triple, window, {std::max(64, res.nx / 2), std::max(64, res.ny / 2)});
  for (std::size_t i = 0; i < gamma.polylines.size(); ++i) {
    const std::string tag = "gamma:" + std::to_string(i);
    f.chains.push_back({tag, "gamma", gamma.polylines[i]});
    detail::split_runs(gamma.polylines[i], re_nonneg, "imomega:" + std::to_string(i), "imomega-zero", "imomega2-neg",
                       f.chains);
  }
  if (window.y0 < 0.0 && window.y1 > 0.0) {
    std::vector<cplx> axis;
    const int n = std::max(64, res.nx);
    for (int i = 0; i <= n; ++i) axis.push_back(cplx(window.x0 + window.width() * i / n, 0.0));
    f.chains.push_back({"real-axis", "real-axis", {axis.front(), axis.back()}});
    detail::split_runs(axis, re_nonneg, "real-axis-imomega", "imomega-zero", "imomega2-neg", f.chains);
  }
  int cut_id = 0;
  for (const Cut* c : bo.cuts().all()) {
    if (c->degenerate() || !detail::touches(c->points, window)) continue;
    f.chains.push_back({"cut:" + std::to_string(cut_id++), "cut", c->points});
  }
  f.roots = bo.roots().roots;
  f.branch_points = bo.cuts().branch_points;
  f.partition = partition_domains(bo, window, res);
  return f;
}

inline std::string render_svg(const FigureData& f) {
  const Box& w = f.window;
  const double diag = std::hypot(w.width(), w.height());
  const double sw = 0.003 * diag;
  const auto X = [](double x) { return detail::num(x); };
  const auto Y = [](double y) { return detail::num(-y); };
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << X(w.x0) << ' ' << Y(w.y1) << ' '
    << detail::num(w.width()) << ' ' << detail::num(w.height()) << "\" width=\"800\" height=\""
    << static_cast<int>(800.0 * w.height() / w.width()) << "\">\n";

  // D1 shading as row runs of cells.
  const Grid& g = f.partition.grid;
  s << "<g class=\"d1\" fill=\"#cfd8e8\" stroke=\"none\">\n";
  for (int j = 0; j < g.ny; ++j) {
    int i = 0;
    while (i < g.nx) {
      if (f.partition.label_at(i, j) != DomainLabel::D1) {
        ++i;
        continue;
      }
      const int start = i;
      while (i < g.nx && f.partition.label_at(i, j) == DomainLabel::D1) ++i;
      const double x0 = w.x0 + g.dx() * start, y1 = w.y0 + g.dy() * (j + 1);
      s << "<rect x=\"" << X(x0) << "\" y=\"" << Y(y1) << "\" width=\"" << detail::num(g.dx() * (i - start))
        << "\" height=\"" << detail::num(g.dy()) << "\"/>\n";
    }
  }
  s << "</g>\n";

  s << "<g class=\"frame\" fill=\"none\" stroke=\"#000\" stroke-width=\"" << detail::num(sw) << "\">\n";
  s << "<rect x=\"" << X(w.x0) << "\" y=\"" << Y(w.y1) << "\" width=\"" << detail::num(w.width()) << "\" height=\""
    << detail::num(w.height()) << "\"/>\n</g>\n";

  struct Style {
    const char* layer;
    const char* attrs;
    double width;
  };
  const Style styles[] = {
      {"real-axis", "stroke=\"#444\"", 0.5},
      {"gamma", "stroke=\"#444\"", 0.5},
      {"imomega2-neg", "stroke=\"#1f5fbf\" stroke-dasharray=\"DASH\"", 0.6},
      {"imomega-zero", "stroke=\"#1f5fbf\" stroke-dasharray=\"DASH\"", 2.0},
      {"cut", "stroke=\"#b01c1c\"", 2.5},
  };
  for (const auto& st : styles) {
    std::string attrs = st.attrs;
    if (auto p = attrs.find("DASH"); p != std::string::npos)
      attrs.replace(p, 4, detail::num(4 * sw) + "," + detail::num(2 * sw));
    s << "<g class=\"" << st.layer << "\" fill=\"none\" " << attrs << " stroke-width=\"" << detail::num(st.width * sw)
      << "\">\n";
    for (const auto& c : f.chains) {
      if (c.layer != st.layer) continue;
      std::string pts;
      std::size_t n = 0;
      for (cplx z : c.points) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
        if (n++) pts += ' ';
        pts += X(z.real()) + "," + Y(z.imag());
      }
      if (n >= 2) s << "<polyline points=\"" << pts << "\"/>\n";
    }
    s << "</g>\n";
  }

  s << "<g class=\"markers\">\n";
  for (cplx b : f.branch_points) {
    if (!w.contains(b)) continue;
    s << "<circle class=\"branch-point\" cx=\"" << X(b.real()) << "\" cy=\"" << Y(b.imag()) << "\" r=\""
      << detail::num(2.5 * sw) << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"" << detail::num(0.5 * sw)
      << "\"/>\n";
  }
  for (const auto& r : f.roots) {
    if (!w.contains(r.location)) continue;
    s << "<circle class=\"root\" data-multiplicity=\"" << r.multiplicity << "\" cx=\"" << X(r.location.real())
      << "\" cy=\"" << Y(r.location.imag()) << "\" r=\"" << detail::num(1.5 * sw) << "\" fill=\"#000\"/>\n";
    s << "<text class=\"multiplicity\" x=\"" << X(r.location.real() + 2.0 * sw) << "\" y=\""
      << Y(r.location.imag() + 2.0 * sw) << "\" font-size=\"" << detail::num(6.0 * sw) << "\">" << r.multiplicity
      << "</text>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

inline std::string render_csv(const FigureData& f) {
  std::string s = "k1,k2,tag\n";
  for (const auto& c : f.chains)
    for (cplx z : c.points) s += format_double(z.real()) + "," + format_double(z.imag()) + "," + c.tag + "\n";
  for (const auto& r : f.roots)
    s += format_double(r.location.real()) + "," + format_double(r.location.imag()) + ",root:" +
         std::to_string(r.multiplicity) + "\n";
  for (cplx b : f.branch_points) s += format_double(b.real()) + "," + format_double(b.imag()) + ",branch-point\n";
  return s;
}

/// Row-major sign bytes {0, 1, 2} = {negative, zero band, positive}; two
/// planes, Im Omega^2 then Re Omega^2.
inline std::string render_sign_grid(const SignField& f) {
  std::string bytes;
  bytes.reserve(2 * f.grid.size());
  for (int8_t v : f.im_sign) bytes.push_back(static_cast<char>(v + 1));
  for (int8_t v : f.re_sign) bytes.push_back(static_cast<char>(v + 1));
  return bytes;
}

inline json sign_grid_header(const SignField& f, const std::string& data_file) {
  return json{{"schema", 1},
              {"data", data_file},
              {"window", {f.grid.window.x0, f.grid.window.x1, f.grid.window.y0, f.grid.window.y1}},
              {"resolution", {f.grid.nx, f.grid.ny}},
              {"order", "row-major, row j = 0 at y0, cell centres"},
              {"encoding", {{"0", "negative"}, {"1", "zero band"}, {"2", "positive"}}},
              {"planes", {"im_omega_squared", "re_omega_squared"}}};
}

}  // namespace nlsadm::cli
