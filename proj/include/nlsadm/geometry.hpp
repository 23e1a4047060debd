#pragma once

#include "nlsadm/branch.hpp"
#include "nlsadm/classify.hpp"
#include "nlsadm/parallel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>

namespace nlsadm {

/// Axis-aligned box [x0, x1] x [y0, y1] in the k-plane.
struct Box {
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;

  void validate() const {
    if (!(x1 > x0) || !(y1 > y0) || !std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) ||
        !std::isfinite(y1))
      throw Error(ErrorCode::ConfigError, "window must be a nondegenerate finite box");
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(cplx k) const { return k.real() >= x0 && k.real() <= x1 && k.imag() >= y0 && k.imag() <= y1; }
  Box mirrored_x() const { return {-x1, -x0, y0, y1}; }
  Box mirrored_y() const { return {x0, x1, -y1, -y0}; }
};

struct Resolution {
  int nx = 800, ny = 800;
};

/// [-L, L]^2 with L = 2 (1 + max |branch point|).
inline Box default_window(const CutConfiguration& cuts) {
  double m = 0.0;
  for (cplx p : cuts.branch_points) m = std::max(m, std::abs(p));
  const double L = 2.0 * (1.0 + m);
  return {-L, L, -L, L};
}

/// Cell-centred grid. Centres are placed symmetrically about the box centre,
/// so the grid of a mirrored box is the exact mirror image.
struct Grid {
  Box window;
  int nx = 0, ny = 0;

  Grid() = default;
  Grid(const Box& w, Resolution r) : window(w), nx(r.nx), ny(r.ny) {
    window.validate();
    if (nx < 1 || ny < 1) throw Error(ErrorCode::ConfigError, "resolution must be positive");
  }
  double dx() const { return window.width() / nx; }
  double dy() const { return window.height() / ny; }
  double x(int i) const { return 0.5 * (window.x0 + window.x1) + dx() * (i + 0.5 - 0.5 * nx); }
  double y(int j) const { return 0.5 * (window.y0 + window.y1) + dy() * (j + 0.5 - 0.5 * ny); }
  cplx center(int i, int j) const { return {x(i), y(j)}; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  double cell_diagonal() const { return std::hypot(dx(), dy()); }
  /// Cell containing k, or nullopt outside the window.
  std::optional<std::pair<int, int>> locate(cplx k) const {
    if (!window.contains(k)) return std::nullopt;
    int i = std::min(nx - 1, static_cast<int>((k.real() - window.x0) / dx()));
    int j = std::min(ny - 1, static_cast<int>((k.imag() - window.y0) / dy()));
    return std::make_pair(std::max(i, 0), std::max(j, 0));
  }
};

/// Im Omega^2 = 4 k2 (4 k1 (k1^2 - k2^2) + omega k1 + lambda alpha c2).
inline double im_omega_squared(const Triple& t, double k1, double k2) {
  return 4.0 * k2 * (4.0 * k1 * (k1 * k1 - k2 * k2) + t.omega * k1 + t.lambda() * t.alpha * t.c2());
}

/// Re Omega^2 = 4 (k1^4 - 6 k1^2 k2^2 + k2^4) + 2 omega (k1^2 - k2^2) + 4 lambda alpha c2 k1 + const.
inline double re_omega_squared(const OmegaSquared& q, double k1, double k2) {
  const double a = k1 * k1, b = k2 * k2;
  return 4.0 * (a * a - 6.0 * a * b + b * b) + 2.0 * q.source.omega * (a - b) + q.coeffs[3] * k1 + q.coeffs[4];
}

/// Rounding band used for the zero sign: a term-magnitude bound at k scaled by 1e-13.
inline double omega_squared_band(const OmegaSquared& q, double k1, double k2) {
  const double r = std::hypot(k1, k2);
  return 1e-13 * (4.0 * r * r * r * r + q.bounds[2] * r * r + q.bounds[3] * r + q.bounds[4]);
}

inline int8_t sign_with_band(double v, double band) { return v > band ? 1 : (v < -band ? -1 : 0); }

struct SignField {
  Grid grid;
  std::vector<int8_t> im_sign;
  std::vector<int8_t> re_sign;

  /// {Im Omega = 0} on the grid: Im Omega^2 = 0 and Re Omega^2 >= 0.
  bool im_omega_zero(int i, int j) const {
    const auto n = grid.index(i, j);
    return im_sign[n] == 0 && re_sign[n] >= 0;
  }
};

inline SignField compute_sign_field(const Triple& t, const Box& window, Resolution res) {
  SignField f;
  f.grid = Grid(window, res);
  const auto q = build_omega_squared(t);
  f.im_sign.assign(f.grid.size(), 0);
  f.re_sign.assign(f.grid.size(), 0);
  parallel_for(static_cast<std::size_t>(f.grid.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double y = f.grid.y(j);
    for (int i = 0; i < f.grid.nx; ++i) {
      const double x = f.grid.x(i);
      const double band = omega_squared_band(q, x, y);
      f.im_sign[f.grid.index(i, j)] = sign_with_band(im_omega_squared(t, x, y), band);
      f.re_sign[f.grid.index(i, j)] = sign_with_band(re_omega_squared(q, x, y), band);
    }
  });
  return f;
}

struct GammaCurve {
  std::vector<std::vector<cplx>> polylines;
  std::vector<double> real_intersections;
  double curve_tolerance = 0.0;
};

namespace detail {

inline double gamma_f(const Triple& t, double x, double y) {
  return 4.0 * x * (x * x - y * y) + t.omega * x + t.lambda() * t.alpha * t.c2();
}

inline double gamma_scale(const Triple& t, double x, double y) {
  return 4.0 * std::abs(x) * (x * x + y * y) + std::abs(t.omega * x) + t.alpha * std::abs(t.c2()) + 1e-300;
}

/// Newton projection onto f = 0 along the gradient.
inline std::optional<cplx> project_gamma(const Triple& t, cplx p, double tol_rel, double max_move) {
  const cplx start = p;
  for (int it = 0; it < 40; ++it) {
    const double x = p.real(), y = p.imag();
    const double f = gamma_f(t, x, y);
    if (std::abs(f) <= tol_rel * gamma_scale(t, x, y)) return p;
    const cplx g(12.0 * x * x - 4.0 * y * y + t.omega, -8.0 * x * y);
    const double g2 = std::norm(g);
    if (g2 == 0.0) return std::nullopt;
    p -= f * g / g2;
    if (std::abs(p - start) > max_move) return std::nullopt;
  }
  const double f = gamma_f(t, p.real(), p.imag());
  if (std::abs(f) <= tol_rel * gamma_scale(t, p.real(), p.imag())) return p;
  return std::nullopt;
}

}  // namespace detail

/// Marching squares on the node lattice of `res` (nx x ny cells), linear
/// interpolation on edges followed by Newton projection; saddle cells are
/// resolved by the sign at the cell centre.
inline GammaCurve trace_gamma(const Triple& t, const Box& window, Resolution res = {400, 400}) {
  window.validate();
  GammaCurve out;
  out.curve_tolerance = 1e-10;
  out.real_intersections = gamma_real_intersections(t.omega, t.lambda() * t.alpha * t.c2());
  const int nx = res.nx, ny = res.ny;
  const double dx = window.width() / nx, dy = window.height() / ny;
  const auto X = [&](int i) { return window.x0 + dx * i; };
  const auto Y = [&](int j) { return window.y0 + dy * j; };
  std::vector<double> val(static_cast<std::size_t>(nx + 1) * (ny + 1));
  const auto at = [&](int i, int j) -> double& { return val[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) at(i, j) = detail::gamma_f(t, X(i), Y(j));

  // Edge ids: horizontal edge (i,j)-(i+1,j) -> 2*(j*(nx+1)+i), vertical (i,j)-(i,j+1) -> +1.
  const auto hid = [&](int i, int j) { return 2L * (static_cast<long>(j) * (nx + 1) + i); };
  const auto vid = [&](int i, int j) { return 2L * (static_cast<long>(j) * (nx + 1) + i) + 1; };
  std::map<long, cplx> point;
  const auto edge_point = [&](long id) -> cplx {
    auto it = point.find(id);
    if (it != point.end()) return it->second;
    const long base = id / 2;
    const int i = static_cast<int>(base % (nx + 1)), j = static_cast<int>(base / (nx + 1));
    cplx a(X(i), Y(j)), b;
    double fa = at(i, j), fb;
    if (id % 2 == 0) {
      b = cplx(X(i + 1), Y(j));
      fb = at(i + 1, j);
    } else {
      b = cplx(X(i), Y(j + 1));
      fb = at(i, j + 1);
    }
    const double s = fa / (fa - fb);
    cplx p = a + s * (b - a);
    if (auto r = detail::project_gamma(t, p, out.curve_tolerance, std::hypot(dx, dy))) p = *r;
    point.emplace(id, p);
    return p;
  };

  std::map<long, std::vector<long>> adj;
  const auto link = [&](long a, long b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const bool s0 = at(i, j) >= 0, s1 = at(i + 1, j) >= 0, s2 = at(i + 1, j + 1) >= 0, s3 = at(i, j + 1) >= 0;
      const int code = s0 | (s1 << 1) | (s2 << 2) | (s3 << 3);
      if (code == 0 || code == 15) continue;
      const long bottom = hid(i, j), right = vid(i + 1, j), top = hid(i, j + 1), left = vid(i, j);
      std::vector<long> e;
      if (s0 != s1) e.push_back(bottom);
      if (s1 != s2) e.push_back(right);
      if (s2 != s3) e.push_back(top);
      if (s3 != s0) e.push_back(left);
      if (e.size() == 2) {
        link(e[0], e[1]);
      } else if (e.size() == 4) {
        const bool sc = detail::gamma_f(t, X(i) + 0.5 * dx, Y(j) + 0.5 * dy) >= 0;
        // Centre agrees with corner 0: corner 0 region connects through the
        // centre, so the curve separates corners 1 and 3.
        if (sc == s0) {
          link(bottom, right);
          link(top, left);
        } else {
          link(bottom, left);
          link(right, top);
        }
      }
    }
  }

  // Chain the edge graph into polylines; open chains start at degree-1 nodes.
  std::map<long, bool> seen;
  const auto walk = [&](long start) {
    std::vector<cplx> chain;
    long prev = -1, cur = start;
    for (;;) {
      seen[cur] = true;
      chain.push_back(edge_point(cur));
      long next = -1;
      for (long n : adj[cur])
        if (n != prev && !seen[n]) {
          next = n;
          break;
        }
      if (next < 0) {
        for (long n : adj[cur])
          if (n == start && n != prev && chain.size() > 2) chain.push_back(edge_point(start));
        break;
      }
      prev = cur;
      cur = next;
    }
    out.polylines.push_back(std::move(chain));
  };
  for (auto& [id, nb] : adj)
    if (nb.size() == 1 && !seen[id]) walk(id);
  for (auto& [id, nb] : adj)
    if (!seen[id]) walk(id);
  return out;
}

enum class DomainLabel : uint8_t { D1 = 1, D2 = 2, D3 = 3, D4 = 4, Boundary = 5, Cut = 6 };

inline const char* to_string(DomainLabel l) {
  switch (l) {
    case DomainLabel::D1: return "D1";
    case DomainLabel::D2: return "D2";
    case DomainLabel::D3: return "D3";
    case DomainLabel::D4: return "D4";
    case DomainLabel::Boundary: return "boundary";
    case DomainLabel::Cut: return "cut";
  }
  return "?";
}

/// D1 = {Im k > 0, Im Omega > 0}, D2 = {Im k > 0, Im Omega < 0},
/// D3 = {Im k < 0, Im Omega > 0}, D4 = {Im k < 0, Im Omega < 0}.
inline DomainLabel label_of(double im_k, double im_omega) {
  if (im_k > 0) return im_omega > 0 ? DomainLabel::D1 : DomainLabel::D2;
  return im_omega > 0 ? DomainLabel::D3 : DomainLabel::D4;
}

struct DomainPartition {
  Grid grid;
  std::vector<DomainLabel> labels;
  std::vector<double> im_omega;
  /// Component id of each D1 cell, -1 elsewhere.
  std::vector<int> component;
  std::vector<std::size_t> component_sizes;

  std::size_t components() const { return component_sizes.size(); }
  bool d1_connected() const { return components() == 1; }
  std::size_t count(DomainLabel l) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l)); }
  DomainLabel label_at(int i, int j) const { return labels[grid.index(i, j)]; }
};

inline DomainPartition partition_domains(const BranchedOmega& bo, const Box& window, Resolution res = {}) {
  DomainPartition p;
  p.grid = Grid(window, res);
  const Grid& g = p.grid;
  const auto& cuts = bo.cuts();
  const double half_diag = 0.5 * g.cell_diagonal();
  p.labels.assign(g.size(), DomainLabel::Boundary);
  p.im_omega.assign(g.size(), 0.0);
  const auto& q = bo.quartic();

  parallel_for(static_cast<std::size_t>(g.ny), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int i = 0; i < g.nx; ++i) {
      const cplx k = g.center(i, j);
      const auto n = g.index(i, j);
      if (cuts.distance_to_cuts(k) <= half_diag) {
        p.labels[n] = DomainLabel::Cut;
        p.im_omega[n] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const cplx om = bo.eval_unchecked(k);
      p.im_omega[n] = om.imag();
      // The cell straddles a sign change when the linear estimate
      // |Omega'| * 0.75 diag reaches the centre value.
      const double slope = std::abs(q.derivative(1, k)) / (2.0 * std::max(std::abs(om), 1e-300));
      if (std::abs(k.imag()) <= 0.5 * g.dy() || std::abs(om.imag()) <= 0.75 * g.cell_diagonal() * slope) {
        p.labels[n] = DomainLabel::Boundary;
        continue;
      }
      p.labels[n] = label_of(k.imag(), om.imag());
    }
  });

  // 4-connected flood fill of D1 cells; adjacency is blocked when the segment
  // between the two centres crosses a cut.
  p.component.assign(g.size(), -1);
  std::vector<std::pair<int, int>> stack;
  for (int j0 = 0; j0 < g.ny; ++j0) {
    for (int i0 = 0; i0 < g.nx; ++i0) {
      if (p.labels[g.index(i0, j0)] != DomainLabel::D1 || p.component[g.index(i0, j0)] >= 0) continue;
      const int id = static_cast<int>(p.component_sizes.size());
      std::size_t size = 0;
      stack.push_back({i0, j0});
      p.component[g.index(i0, j0)] = id;
      while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        ++size;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int a = i + di[d], b = j + dj[d];
          if (a < 0 || b < 0 || a >= g.nx || b >= g.ny) continue;
          const auto m = g.index(a, b);
          if (p.labels[m] != DomainLabel::D1 || p.component[m] >= 0) continue;
          if (cuts.blocks(g.center(i, j), g.center(a, b))) continue;
          p.component[m] = id;
          stack.push_back({a, b});
        }
      }
      p.component_sizes.push_back(size);
    }
  }
  return p;
}

struct ResampleCheck {
  std::size_t tested = 0;
  std::size_t matched = 0;
  double rate() const { return tested ? static_cast<double>(matched) / tested : 1.0; }
};

/// Re-evaluates (sign Im k, sign Im Omega) at random off-grid points inside
/// cells carrying a D1..D4 label and compares with the cell label.
inline ResampleCheck resample_labels(const BranchedOmega& bo, const DomainPartition& p, std::size_t samples,
                                     uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(p.grid.window.x0, p.grid.window.x1), uy(p.grid.window.y0, p.grid.window.y1);
  ResampleCheck r;
  const double tol = bo.cuts().geometric_tolerance();
  for (std::size_t s = 0; s < samples; ++s) {
    const cplx k(ux(rng), uy(rng));
    const auto cell = p.grid.locate(k);
    if (!cell) continue;
    const DomainLabel l = p.label_at(cell->first, cell->second);
    if (l == DomainLabel::Boundary || l == DomainLabel::Cut) continue;
    if (bo.cuts().distance_to_cuts(k) < tol || bo.distance_to_singular(k) < tol) continue;
    ++r.tested;
    if (label_of(k.imag(), bo.eval_unchecked(k).imag()) == l) ++r.matched;
  }
  return r;
}

struct CutIntersection {
  cplx top_point;
  double top_value = 0.0;
  int top_point_sign = 0;
  bool intersects = false;
  /// c2/(2 alpha) lies left of the family's real double/triple zero K.
  std::optional<bool> left_of_K;
};

/// Sign of Im Omega^2 at the top endpoint (c2 + i|c1|)/(2 alpha) of the
/// vertical cut. A top point with Im Omega^2 <= 0 lies in the closure of D1
/// (the cut rises from the real axis into it), a positive sign keeps the
/// cut outside.
inline CutIntersection cut_intersects_D1_closure(const Triple& t, std::optional<Family> family = std::nullopt,
                                                 double degenerate_tol = 1e-12) {
  t.validate();
  if (std::abs(t.c1()) <= degenerate_tol * std::max(1.0, std::abs(t.c)))
    throw Error(ErrorCode::DegenerateCut, "c1 = 0: the vertical cut is absent");
  CutIntersection r;
  r.top_point = cplx(t.c2(), std::abs(t.c1())) / (2.0 * t.alpha);
  r.top_value = im_omega_squared(t, r.top_point.real(), r.top_point.imag());
  const auto q = build_omega_squared(t);
  r.top_point_sign = sign_with_band(r.top_value, omega_squared_band(q, r.top_point.real(), r.top_point.imag()));
  r.intersects = r.top_point_sign <= 0;
  if (family) {
    std::optional<double> K;
    if (*family == Family::A && t.omega < 0) K = std::sqrt(-t.omega / 12.0);
    if (*family == Family::B || *family == Family::E) K = classify(t).witness_K;
    if (K) r.left_of_K = t.c2() / (2.0 * t.alpha) < *K;
  }
  return r;
}

struct K2Window {
  std::optional<double> K1, K2, K3;
  bool c2_over_2alpha_in_K2_0 = false;
};

inline K2Window locate_K2_window(const Triple& t) {
  K2Window w;
  const auto roots = gamma_real_intersections(t.omega, t.lambda() * t.alpha * t.c2());
  if (roots.size() != 3) return w;
  w.K1 = roots[0];
  w.K2 = roots[1];
  w.K3 = roots[2];
  const double x = t.c2() / (2.0 * t.alpha);
  w.c2_over_2alpha_in_K2_0 = roots[1] < x && x < 0.0;
  return w;
}

}  // namespace nlsadm
