#pragma once

#include "nlsadm/roots.hpp"

#include <algorithm>
#include <vector>

namespace nlsadm {

// ---------------------------------------------------------------------------
// Planar segment utilities on complex numbers.

namespace planar {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

inline double distance_to_segment(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

/// Proper crossing of path segment [p, q] with cut segment [a, b]. Half-open
/// on the cut side (t in [0,1)) so a path through a shared polyline vertex
/// counts once.
inline bool crosses(cplx p, cplx q, cplx a, cplx b) {
  const cplx r = q - p, s = b - a;
  const double denom = cross(r, s);
  if (denom == 0.0) return false;
  const double u = cross(a - p, s) / denom;  // along path
  const double t = cross(a - p, r) / denom;  // along cut
  return u > 0.0 && u <= 1.0 && t >= 0.0 && t < 1.0;
}

/// Intersection parameter along [p, q] (u) if it properly crosses [a, b].
inline std::optional<double> crossing_param(cplx p, cplx q, cplx a, cplx b) {
  const cplx r = q - p, s = b - a;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const double u = cross(a - p, s) / denom;
  const double t = cross(a - p, r) / denom;
  if (u > 0.0 && u <= 1.0 && t >= 0.0 && t < 1.0) return u;
  return std::nullopt;
}

/// Overlap length of two collinear segments, 0 if not collinear.
inline double collinear_overlap(cplx a, cplx b, cplx c, cplx d, double tol) {
  const cplx ab = b - a;
  const double len = std::abs(ab);
  if (len == 0.0 || std::abs(d - c) == 0.0) return 0.0;
  const cplx u = ab / len;
  if (std::abs(cross(u, c - a)) > tol || std::abs(cross(u, d - a)) > tol) return 0.0;
  const double t0 = dot(c - a, u), t1 = dot(d - a, u);
  const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(len, std::max(t0, t1));
  return std::max(0.0, hi - lo);
}

}  // namespace planar

// ---------------------------------------------------------------------------

enum class CutKind { Quartic, Vertical };

/// A branch cut as a polyline; a single point when degenerate.
struct Cut {
  std::vector<cplx> points;
  CutKind kind = CutKind::Quartic;

  bool degenerate() const {
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i] != points[0]) return false;
    return true;
  }
  cplx front() const { return points.front(); }
  cplx back() const { return points.back(); }

  double length() const {
    double l = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) l += std::abs(points[i] - points[i - 1]);
    return l;
  }

  double distance(cplx p) const {
    if (points.size() == 1) return std::abs(p - points[0]);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < points.size(); ++i)
      d = std::min(d, planar::distance_to_segment(p, points[i - 1], points[i]));
    return d;
  }

  int crossings(cplx p, cplx q) const {
    int n = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i] != points[i - 1] && planar::crosses(p, q, points[i - 1], points[i])) ++n;
    return n;
  }
};

/// Union of the two quartic cuts and the cut between the c-points.
struct CutConfiguration {
  std::vector<Cut> quartic_cuts;
  Cut vertical_cut;
  std::vector<cplx> branch_points;
  double root_scale = 1.0;  // 1 + max|root|

  std::vector<const Cut*> all() const {
    std::vector<const Cut*> v;
    for (const auto& c : quartic_cuts) v.push_back(&c);
    v.push_back(&vertical_cut);
    return v;
  }

  double bbox_diameter() const {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const Cut* c : all())
      for (cplx p : c->points) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
      }
    if (x0 > x1) return 0.0;
    return std::hypot(x1 - x0, y1 - y0);
  }

  /// OnCut distance threshold: 1e-6 of the cut bounding-box diameter.
  double geometric_tolerance() const {
    const double d = bbox_diameter();
    return 1e-6 * (d > 0.0 ? d : root_scale);
  }

  double distance_to_cuts(cplx k) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Cut* c : all())
      if (!c->degenerate()) d = std::min(d, c->distance(k));
    return d;
  }

  /// Parity of crossings of [p, q] with the quartic cuts (Omega flips sign there).
  int quartic_crossings(cplx p, cplx q) const {
    int n = 0;
    for (const auto& c : quartic_cuts) n += c.crossings(p, q);
    return n;
  }

  /// True if [p, q] crosses any cut, including the vertical one.
  bool blocks(cplx p, cplx q) const {
    for (const Cut* c : all())
      if (!c->degenerate() && c->crossings(p, q) > 0) return true;
    return false;
  }
};

struct CutStrategy {
  enum class Kind { Default, Explicit, Loop, Custom };
  Kind kind = Kind::Default;
  /// Explicit: index pairs into RootSet::expanded().
  std::vector<std::pair<int, int>> pairs;
  /// Loop: closed cut through the double zero nearest to `loop_root`,
  /// a circle of radius `loop_radius` centred at loop_root + i*loop_radius.
  cplx loop_root{0.0, 0.0};
  double loop_radius = 0.0;
  int loop_vertices = 96;
  /// Custom: quartic cut chains as given.
  std::vector<std::vector<cplx>> chains;

  static CutStrategy loop_around(cplx root, double radius) {
    CutStrategy s;
    s.kind = Kind::Loop;
    s.loop_root = root;
    s.loop_radius = radius;
    return s;
  }
  static CutStrategy custom(std::vector<std::vector<cplx>> chains) {
    CutStrategy s;
    s.kind = Kind::Custom;
    s.chains = std::move(chains);
    return s;
  }
};

namespace detail {

/// Default pairing of the four roots (with multiplicity) into two cuts.
inline std::vector<Cut> default_pairing(const RootSet& rs) {
  std::vector<Cut> cuts;
  std::vector<cplx> odd;
  for (const auto& r : rs.roots) {
    for (int m = 0; m + 1 < r.multiplicity; m += 2) cuts.push_back(Cut{{r.location}, CutKind::Quartic});
    if (r.multiplicity % 2 == 1) odd.push_back(r.location);
  }
  const double tol = 10.0 * rs.cluster_tolerance;
  std::vector<bool> used(odd.size(), false);
  // conjugate pairs first
  for (std::size_t i = 0; i < odd.size(); ++i) {
    if (used[i] || odd[i].imag() <= tol) continue;
    for (std::size_t j = 0; j < odd.size(); ++j) {
      if (i == j || used[j]) continue;
      if (std::abs(odd[j] - std::conj(odd[i])) <= tol) {
        cuts.push_back(Cut{{odd[i], odd[j]}, CutKind::Quartic});
        used[i] = used[j] = true;
        break;
      }
    }
  }
  std::vector<cplx> rest;
  for (std::size_t i = 0; i < odd.size(); ++i)
    if (!used[i]) rest.push_back(odd[i]);
  std::sort(rest.begin(), rest.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i + 1 < rest.size(); i += 2) cuts.push_back(Cut{{rest[i], rest[i + 1]}, CutKind::Quartic});
  return cuts;
}

}  // namespace detail

/// Pairs the roots into quartic cuts and appends the vertical cut joining
/// -ic/(2 alpha) and i conj(c)/(2 alpha).
inline CutConfiguration build_cuts(const RootSet& rs, const Triple& t, const CutStrategy& strategy = {},
                                   double degenerate_tol = 1e-12) {
  CutConfiguration cfg;
  cfg.root_scale = 1.0 + rs.max_abs();
  const auto expanded = rs.expanded();

  switch (strategy.kind) {
    case CutStrategy::Kind::Default:
      cfg.quartic_cuts = detail::default_pairing(rs);
      break;
    case CutStrategy::Kind::Explicit: {
      std::vector<int> seen(expanded.size(), 0);
      for (auto [i, j] : strategy.pairs) {
        if (i < 0 || j < 0 || i >= int(expanded.size()) || j >= int(expanded.size()) || i == j)
          throw Error(ErrorCode::InvalidPairing, "pair indices must be distinct indices into the expanded root list");
        ++seen[i];
        ++seen[j];
        if (expanded[i] == expanded[j])
          cfg.quartic_cuts.push_back(Cut{{expanded[i]}, CutKind::Quartic});
        else
          cfg.quartic_cuts.push_back(Cut{{expanded[i], expanded[j]}, CutKind::Quartic});
      }
      for (int s : seen)
        if (s != 1) throw Error(ErrorCode::InvalidPairing, "every root copy must appear in exactly one pair");
      break;
    }
    case CutStrategy::Kind::Loop: {
      const auto idx = rs.nearest(strategy.loop_root, std::numeric_limits<double>::infinity());
      if (!idx || rs.roots[*idx].multiplicity % 2 != 0)
        throw Error(ErrorCode::InvalidPairing, "loop cut requires an even-order zero");
      if (!(strategy.loop_radius > 0.0)) throw Error(ErrorCode::InvalidPairing, "loop radius must be positive");
      RootSet others = rs;
      others.roots.erase(others.roots.begin() + static_cast<long>(*idx));
      cfg.quartic_cuts = detail::default_pairing(others);
      const cplx z = rs.roots[*idx].location;
      const cplx centre = z + I * strategy.loop_radius;
      Cut loop;
      const int n = std::max(8, strategy.loop_vertices);
      for (int v = 0; v <= n; ++v) {
        const double th = -kPi / 2.0 + 2.0 * kPi * v / n;
        loop.points.push_back(v == 0 || v == n ? z : centre + strategy.loop_radius * std::exp(I * th));
      }
      cfg.quartic_cuts.push_back(loop);
      for (int m = 2; m < rs.roots[*idx].multiplicity; m += 2) cfg.quartic_cuts.push_back(Cut{{z}, CutKind::Quartic});
      break;
    }
    case CutStrategy::Kind::Custom:
      for (const auto& chain : strategy.chains) {
        if (chain.empty()) throw Error(ErrorCode::InvalidPairing, "empty cut chain");
        for (cplx end : {chain.front(), chain.back()})
          if (!rs.nearest(end, 10.0 * rs.cluster_tolerance))
            throw Error(ErrorCode::InvalidPairing, "cut chain endpoint is not a root");
        cfg.quartic_cuts.push_back(Cut{chain, CutKind::Quartic});
      }
      break;
  }

  const cplx lo = t.c_point_lower(), hi = t.c_point_upper();
  const bool vdeg = std::abs(t.c1()) <= degenerate_tol * std::max(1.0, std::abs(t.c));
  cfg.vertical_cut = vdeg ? Cut{{cplx(t.c2() / (2.0 * t.alpha), 0.0)}, CutKind::Vertical}
                          : Cut{{lo, hi}, CutKind::Vertical};

  for (const auto& r : rs.roots) cfg.branch_points.push_back(r.location);
  for (cplx p : {lo, hi}) {
    bool dup = false;
    for (cplx b : cfg.branch_points) dup = dup || std::abs(b - p) <= 10.0 * rs.cluster_tolerance;
    if (!dup) cfg.branch_points.push_back(p);
  }

  // Reject non-transverse (collinear overlapping) cuts.
  const auto cuts = cfg.all();
  const double tol = cfg.geometric_tolerance();
  for (std::size_t a = 0; a < cuts.size(); ++a) {
    for (std::size_t b = a; b < cuts.size(); ++b) {
      const auto& pa = cuts[a]->points;
      const auto& pb = cuts[b]->points;
      for (std::size_t i = 1; i < pa.size(); ++i) {
        for (std::size_t j = 1; j < pb.size(); ++j) {
          if (a == b && j <= i + 1) continue;
          if (planar::collinear_overlap(pa[i - 1], pa[i], pb[j - 1], pb[j], tol) > tol)
            throw Error(ErrorCode::InvalidPairing, "cuts overlap along a common segment");
        }
      }
    }
  }
  return cfg;
}

/// Cut from a zero K in the upper half-plane that follows the curve
/// Im Omega^2 = 0 (the non-real component Gamma) down to the real axis and
/// then mirrors back to conj(K).
inline std::vector<cplx> gamma_cut(const Triple& t, cplx K, double step_rel = 2e-3) {
  if (!(K.imag() > 0.0)) throw Error(ErrorCode::InvalidPairing, "gamma cut needs a zero with Im K > 0");
  const double lam_ac2 = t.lambda() * t.alpha * t.c2();
  const double w = t.omega;
  const auto f = [&](double x, double y) { return 4.0 * x * (x * x - y * y) + w * x + lam_ac2; };
  const auto grad = [&](double x, double y) { return cplx(12.0 * x * x - 4.0 * y * y + w, -8.0 * x * y); };
  const double h = step_rel * std::max(std::abs(K), t.k_scale());
  std::vector<cplx> upper{K};
  cplx z = K;
  for (int it = 0; it < 200000; ++it) {
    cplx g = grad(z.real(), z.imag());
    if (std::abs(g) == 0.0) break;
    cplx tangent = cplx(-g.imag(), g.real()) / std::abs(g);
    if (tangent.imag() > 0.0) tangent = -tangent;
    cplx zn = z + h * tangent;
    for (int n = 0; n < 4; ++n) {
      const cplx gn = grad(zn.real(), zn.imag());
      const double g2 = std::norm(gn);
      if (g2 == 0.0) break;
      zn -= f(zn.real(), zn.imag()) * gn / g2;
    }
    if (zn.imag() <= 0.0) {
      const double s = z.imag() / (z.imag() - zn.imag());
      upper.push_back(cplx(z.real() + s * (zn.real() - z.real()), 0.0));
      std::vector<cplx> chain = upper;
      for (auto it2 = upper.rbegin() + 1; it2 != upper.rend(); ++it2) chain.push_back(std::conj(*it2));
      return chain;
    }
    upper.push_back(zn);
    z = zn;
  }
  throw Error(ErrorCode::NoConvergence, "curve tracing from the zero did not reach the real axis");
}

}  // namespace nlsadm
