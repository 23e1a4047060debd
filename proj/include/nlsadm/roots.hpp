#pragma once

#include "nlsadm/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace nlsadm {

struct Root {
  cplx location;
  int multiplicity = 1;
};

/// Roots of the quartic with multiplicities.
struct RootSet {
  std::vector<Root> roots;
  double residual = 0.0;
  double cluster_tolerance = 0.0;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
  }

  /// Multiplicities sorted descending, e.g. {3,1}.
  std::vector<int> pattern() const {
    std::vector<int> p;
    for (const auto& r : roots) p.push_back(r.multiplicity);
    std::sort(p.rbegin(), p.rend());
    return p;
  }

  std::string pattern_string() const {
    std::string s;
    for (int m : pattern()) {
      if (!s.empty()) s += "-";
      s += std::to_string(m);
    }
    return s;
  }

  /// Root locations repeated by multiplicity.
  std::vector<cplx> expanded() const {
    std::vector<cplx> out;
    for (const auto& r : roots)
      for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.location);
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& r : roots) m = std::max(m, std::abs(r.location));
    return m;
  }

  /// Coefficients of 4 prod (k - r)^m, degree-descending.
  std::array<cplx, 5> reconstruct() const {
    std::vector<cplx> poly{4.0};
    for (cplx r : expanded()) {
      std::vector<cplx> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i];
        next[i + 1] -= poly[i] * r;
      }
      poly = std::move(next);
    }
    std::array<cplx, 5> out{};
    for (std::size_t i = 0; i < 5 && i < poly.size(); ++i) out[i] = poly[i];
    return out;
  }

  /// Index of the root nearest to k.
  std::optional<std::size_t> nearest(cplx k, double within) const {
    std::optional<std::size_t> best;
    double d = within;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const double di = std::abs(roots[i].location - k);
      if (di <= d) {
        d = di;
        best = i;
      }
    }
    return best;
  }
};

class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, std::vector<RootSet> candidates)
      : Error(ErrorCode::IllConditioned, what), candidates_(std::move(candidates)) {}
  const std::vector<RootSet>& candidates() const { return candidates_; }

 private:
  std::vector<RootSet> candidates_;
};

namespace detail {

inline cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (cplx a : c) acc = acc * z + a;
  return acc;
}

inline std::vector<cplx> differentiate(const std::vector<cplx>& c) {
  std::vector<cplx> d;
  const int n = static_cast<int>(c.size()) - 1;
  for (int i = 0; i < n; ++i) d.push_back(c[i] * static_cast<double>(n - i));
  return d;
}

/// Newton polishing; keeps the iterate only while the residual decreases.
inline cplx newton_polish(const std::vector<cplx>& c, cplx z, int iters = 8) {
  const auto d = differentiate(c);
  double best = std::abs(horner(c, z));
  for (int it = 0; it < iters && best > 0.0; ++it) {
    const cplx dp = horner(d, z);
    if (dp == 0.0) break;
    const cplx zn = z - horner(c, z) / dp;
    const double rn = std::abs(horner(c, zn));
    if (!(rn < best)) break;
    z = zn;
    best = rn;
  }
  return z;
}

}  // namespace detail

/// All complex roots of a polynomial (degree-descending coefficients, leading
/// coefficient nonzero) via companion-matrix eigenvalues and Newton polishing.
inline std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n <= 0) return {};
  if (n == 1) return {-coeffs[1] / coeffs[0]};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[n - i] / coeffs[0];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) out.push_back(detail::newton_polish(coeffs, solver.eigenvalues()(i)));
  return out;
}

/// Sorted distinct real roots of 4k^3 + omega k + alpha c2 (the real
/// intersections of the curve Gamma with the real axis).
inline std::vector<double> gamma_real_intersections(double omega, double alpha_c2) {
  const std::vector<cplx> cubic{4.0, 0.0, omega, alpha_c2};
  const double scale = std::max({std::sqrt(std::abs(omega)), std::cbrt(std::abs(alpha_c2)), 1e-300});
  std::vector<double> real;
  for (cplx z : polynomial_roots(cubic)) {
    // near-double real roots come out as conjugate pairs split by ~sqrt(eps)
    if (std::abs(z.imag()) <= 1e-7 * scale) real.push_back(z.real());
  }
  std::sort(real.begin(), real.end());
  std::vector<double> distinct;
  for (double x : real) {
    if (!distinct.empty() && std::abs(x - distinct.back()) <= 1e-6 * scale) {
      distinct.back() = 0.5 * (distinct.back() + x);
    } else {
      distinct.push_back(x);
    }
  }
  return distinct;
}

struct RootOptions {
  double cluster_rel = 1e-6;   // cluster tolerance = cluster_rel * (1 + max|root|)
  double multiplicity_tol = 1e-12;  // derivative cascade threshold, relative to derivative scale
};

/// Roots of the quartic with multiplicities.
///
/// Multiple roots are found from the derivative chain: a root of P''' that
/// annihilates P'' , P', P is a fourth-order zero; a root of P'' annihilating
/// P', P is a triple zero; a root of P' annihilating P is a double zero. The
/// quartic is then deflated by the multiple factors and the remaining simple
/// roots are taken from the companion matrix of the quotient and polished on P.
inline RootSet solve_quartic(const OmegaSquared& q, const RootOptions& opt = {}) {
  const auto small = [&](int j, cplx z) {
    return std::abs(q.derivative(j, z)) <= opt.multiplicity_tol * q.derivative_scale(j, z);
  };
  const double kscale = q.source.k_scale();
  const double merge_tol = opt.cluster_rel * (1.0 + kscale);

  std::vector<Root> multiples;
  const auto near_known = [&](cplx z) {
    for (const auto& r : multiples)
      if (std::abs(r.location - z) <= merge_tol) return true;
    return false;
  };

  if (small(0, 0.0) && small(1, 0.0) && small(2, 0.0)) {
    multiples.push_back({0.0, 4});
  } else {
    const cplx s = std::sqrt(cplx(-q.coeffs[2] / 24.0));  // roots of P'' = 48k^2 + 4 omega
    for (cplx z : {s, -s}) {
      if (near_known(z)) continue;
      if (small(1, z) && small(0, z)) {
        // a triple zero of a real quartic is real
        multiples.push_back({cplx(z.real(), 0.0), 3});
      }
    }
    if (multiples.empty() || multiples.front().multiplicity < 3) {
      const std::vector<cplx> dcub{16.0, 0.0, 2.0 * q.coeffs[2], q.coeffs[3]};
      for (cplx z : polynomial_roots(dcub)) {
        if (near_known(z)) continue;
        if (small(0, z)) {
          if (std::abs(z.imag()) <= merge_tol) z = cplx(z.real(), 0.0);
          multiples.push_back({z, 2});
        }
      }
    }
  }

  int used = 0;
  for (const auto& r : multiples) used += r.multiplicity;
  while (used > 4) {
    // spurious extra doubles near a degenerate configuration: keep the best ones
    std::sort(multiples.begin(), multiples.end(), [&](const Root& a, const Root& b) {
      return std::abs(q(a.location)) < std::abs(q(b.location));
    });
    used -= multiples.back().multiplicity;
    multiples.pop_back();
  }

  // Deflate.
  std::vector<cplx> poly(q.coeffs.begin(), q.coeffs.end());
  for (const auto& r : multiples) {
    for (int m = 0; m < r.multiplicity; ++m) {
      std::vector<cplx> quot(poly.size() - 1);
      cplx carry = 0.0;
      for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        carry = carry * r.location + poly[i];
        quot[i] = carry;
      }
      poly = std::move(quot);
    }
  }
  const std::vector<cplx> full(q.coeffs.begin(), q.coeffs.end());
  RootSet rs;
  rs.roots = multiples;
  for (cplx z : polynomial_roots(poly)) {
    z = detail::newton_polish(full, z);
    rs.roots.push_back({z, 1});
  }

  // Real coefficients: snap near-real simple roots and symmetrize conjugate pairs.
  for (auto& r : rs.roots) {
    if (r.multiplicity == 1 && std::abs(r.location.imag()) <= 1e-14 * (1.0 + std::abs(r.location)))
      r.location = cplx(r.location.real(), 0.0);
  }

  std::sort(rs.roots.begin(), rs.roots.end(), [](const Root& a, const Root& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });

  rs.cluster_tolerance = opt.cluster_rel * (1.0 + rs.max_abs());
  for (const auto& r : rs.roots) rs.residual = std::max(rs.residual, std::abs(q(r.location)));

  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.roots.size(); ++j) {
      const double d = std::abs(rs.roots[i].location - rs.roots[j].location);
      if (d < 10.0 * rs.cluster_tolerance) {
        RootSet merged = rs;
        merged.roots.clear();
        for (std::size_t m = 0; m < rs.roots.size(); ++m) {
          if (m == j) continue;
          Root r = rs.roots[m];
          if (m == i) {
            const int mi = rs.roots[i].multiplicity, mj = rs.roots[j].multiplicity;
            r.location = (rs.roots[i].location * double(mi) + rs.roots[j].location * double(mj)) / double(mi + mj);
            r.multiplicity = mi + mj;
          }
          merged.roots.push_back(r);
        }
        throw IllConditionedError("roots separated by " + std::to_string(d) + " (cluster tolerance " +
                                      std::to_string(rs.cluster_tolerance) + ")",
                                  {rs, merged});
      }
    }
  }
  return rs;
}

struct MultipleZeroCheck {
  bool is_stationary = false;
  bool is_multiple = false;
  double stationary_residual = 0.0;
  double multiple_residual = 0.0;
};

/// Closed-form test for a zero of order >= 2 at K (defocusing).
inline MultipleZeroCheck check_multiple_zero_conditions(const Triple& t, cplx K, double tol = 1e-9) {
  const double a = t.alpha, w = t.omega, c1 = t.c1(), c2 = t.c2();
  const double s = t.k_scale();
  MultipleZeroCheck r;
  const cplx stat = 4.0 * K * K * K + w * K + a * c2;
  const double stat_scale = 4.0 * std::pow(std::max(std::abs(K), s), 3) + std::abs(w) * std::max(std::abs(K), s) +
                            a * std::abs(c2);
  r.stationary_residual = std::abs(stat) / std::max(stat_scale, 1e-300);
  r.is_stationary = r.stationary_residual <= tol;
  const double shift = a * a + w / 2.0;
  const cplx mult = c1 * c1 + c2 * c2 + 2.0 * K * K * (6.0 * K * K + w) - shift * shift;
  const double ks = std::max(std::abs(K), s);
  const double mult_scale = c1 * c1 + c2 * c2 + 12.0 * std::pow(ks, 4) + 2.0 * ks * ks * std::abs(w) +
                            std::pow(a * a + std::abs(w) / 2.0, 2);
  r.multiple_residual = std::abs(mult) / std::max(mult_scale, 1e-300);
  r.is_multiple = r.is_stationary && r.multiple_residual <= tol;
  return r;
}

enum class DoubleZeroCase { Case31, Case32, Case33, None };

inline const char* to_string(DoubleZeroCase c) {
  switch (c) {
    case DoubleZeroCase::Case31: return "case31";
    case DoubleZeroCase::Case32: return "case32";
    case DoubleZeroCase::Case33: return "case33";
    case DoubleZeroCase::None: return "none";
  }
  return "none";
}

struct RealDoubleZeroFeasibility {
  bool feasible = false;
  DoubleZeroCase case_label = DoubleZeroCase::None;
  std::optional<double> alpha;
  std::optional<double> c1_squared;
};

/// Whether a real K > 0 can be a double zero for some c1 >= 0, given omega and c2.
inline RealDoubleZeroFeasibility check_real_double_zero_feasibility(double K, double omega, double c2,
                                                                    double tol = 1e-9) {
  if (!(K > 0.0)) throw Error(ErrorCode::OutOfWindow, "K must be positive");
  if (c2 == 0.0) throw Error(ErrorCode::DivisionByZero, "c2 = 0 has no alpha = -(4K^3 + omega K)/c2");
  RealDoubleZeroFeasibility r;
  const double K2 = K * K;
  const double alpha = -(4.0 * K2 * K + omega * K) / c2;
  r.alpha = alpha;
  const double shift = alpha * alpha + omega / 2.0;
  r.c1_squared = shift * shift - c2 * c2 - 2.0 * K2 * (6.0 * K2 + omega);
  const double scale = std::max({1.0, K2, std::abs(omega), std::abs(c2)});
  const double upper = -(4.0 * K2 + omega) / 2.0;
  const bool mid_window = -12.0 * K2 < omega && omega < -4.0 * K2;
  const double c33 = -8.0 * K2 * K2 - 2.0 * K2 * omega;
  if (c2 > 0.0) {
    if (mid_window && c33 > 0.0 && std::abs(c2 - std::sqrt(c33)) <= tol * scale) {
      r.case_label = DoubleZeroCase::Case33;
    } else if (mid_window && c2 <= upper + tol * scale) {
      r.case_label = DoubleZeroCase::Case32;
    } else if (omega < -12.0 * K2 && c2 <= upper + tol * scale) {
      r.case_label = DoubleZeroCase::Case31;
    }
  }
  const double c1sq_scale = std::pow(std::abs(alpha * alpha) + std::abs(omega) / 2.0, 2) + c2 * c2 +
                            12.0 * K2 * K2 + 2.0 * K2 * std::abs(omega);
  r.feasible = alpha > 0.0 && *r.c1_squared >= -tol * c1sq_scale;
  return r;
}

}  // namespace nlsadm
