#pragma once

#include "nlsadm/cuts.hpp"

#include <vector>

namespace nlsadm {

/// Branch of Omega(k) = sqrt(Omega^2(k)) on the plane cut along `cuts`,
/// normalised by Omega(k) ~ 2k^2 + omega/2 at a far anchor.
///
/// The value at k is the analytic product 2 prod (k - r)^{m/2} continued
/// along the straight segment from the anchor, with one sign flip per
/// crossing of a quartic cut. The odd-order factors use square roots whose
/// principal cuts are parallel rays pointing away from the anchor; crossing
/// one of those rays also flips the sign. The crossing rule makes Omega jump
/// by a sign across every quartic cut (including closed loop cuts) and
/// nowhere else.
class BranchedOmega {
 public:
  BranchedOmega(OmegaSquared quartic, RootSet roots, CutConfiguration cuts)
      : quartic_(std::move(quartic)), roots_(std::move(roots)), cuts_(std::move(cuts)) {
    double extent = roots_.max_abs();
    for (const Cut* c : cuts_.all())
      for (cplx p : c->points) extent = std::max(extent, std::abs(p));
    const double R = 1e3 * (1.0 + extent);
    anchor_ = R * std::exp(I * (kPi / 8.0));
    ray_dir_ = -anchor_ / std::abs(anchor_);
    ray_len_ = 4.0 * R;
    for (const auto& r : roots_.roots) {
      for (int m = 0; m + 1 < r.multiplicity; m += 2) even_.push_back(r.location);
      if (r.multiplicity % 2 == 1) odd_.push_back(r.location);
    }
    singular_ = cuts_.branch_points;
    const cplx target = 2.0 * anchor_ * anchor_ + quartic_.source.omega / 2.0;
    const cplx g = analytic(anchor_);
    anchor_sign_ = std::abs(g - target) <= std::abs(g + target) ? 1.0 : -1.0;
    root_tol_ = roots_.cluster_tolerance;
  }

  static BranchedOmega from_triple(const Triple& t, const CutStrategy& strategy = {}) {
    auto q = build_omega_squared(t);
    auto rs = solve_quartic(q);
    auto cuts = build_cuts(rs, t, strategy);
    return BranchedOmega(std::move(q), std::move(rs), std::move(cuts));
  }

  const OmegaSquared& quartic() const { return quartic_; }
  const Triple& triple() const { return quartic_.source; }
  const RootSet& roots() const { return roots_; }
  const CutConfiguration& cuts() const { return cuts_; }
  cplx anchor() const { return anchor_; }
  double root_tolerance() const { return root_tol_; }

  /// Throws OnCut / BranchPoint when k is not a regular point of the cut plane.
  void check_regular(cplx k) const {
    for (const auto& r : roots_.roots)
      if (std::abs(k - r.location) <= root_tol_) throw Error(ErrorCode::BranchPoint, "k coincides with a zero of Omega^2");
    if (cuts_.distance_to_cuts(k) < cuts_.geometric_tolerance()) throw Error(ErrorCode::OnCut, "k lies on a branch cut");
  }

  cplx operator()(cplx k) const {
    check_regular(k);
    return eval_unchecked(k);
  }

  /// Branch value without regularity checks; used for one-sided limits onto cuts.
  cplx eval_unchecked(cplx k) const {
    int flips = cuts_.quartic_crossings(anchor_, k);
    for (cplx r : odd_)
      if (planar::crosses(anchor_, k, r, r + ray_len_ * ray_dir_)) ++flips;
    const cplx g = ((flips % 2) ? -anchor_sign_ : anchor_sign_) * analytic(k);
    const cplx w = std::sqrt(quartic_(k));
    return std::abs(w - g) <= std::abs(w + g) ? w : -w;
  }

  /// Distance from k to the nearest branch point (zeros of Omega^2 and c-points).
  double distance_to_singular(cplx k) const {
    double d = std::numeric_limits<double>::infinity();
    for (cplx s : singular_) d = std::min(d, std::abs(k - s));
    return d;
  }

 private:
  cplx analytic(cplx k) const {
    cplx v = 2.0;
    for (cplx r : even_) v *= (k - r);
    const cplx rot = -ray_dir_;  // sqrt((k - r)/rot) has its cut along r + t ray_dir
    const cplx srot = std::sqrt(rot);
    for (cplx r : odd_) v *= srot * std::sqrt((k - r) / rot);
    return v;
  }

  OmegaSquared quartic_;
  RootSet roots_;
  CutConfiguration cuts_;
  cplx anchor_;
  cplx ray_dir_;
  double ray_len_ = 0.0;
  double anchor_sign_ = 1.0;
  double root_tol_ = 0.0;
  std::vector<cplx> even_, odd_, singular_;
};

inline cplx eval_branched_omega(const BranchedOmega& bo, cplx k) { return bo(k); }

namespace detail {

/// H = Omega - S with S = 2k^2 + lambda alpha^2 + omega/2. Near a zero of H
/// the difference cancels, so there H = -lambda (2 alpha k - i conj c)(2 alpha k + i c) / (Omega + S),
/// using Omega^2 - S^2 = -lambda (2 alpha k - i conj c)(2 alpha k + i c).
inline cplx H_from_omega(const Triple& t, cplx k, cplx omega_k) {
  const cplx S = 2.0 * k * k + t.lambda() * t.alpha * t.alpha + t.omega / 2.0;
  const cplx sum = omega_k + S, diff = omega_k - S;
  if (std::abs(sum) <= std::abs(diff)) return diff;
  const cplx p = t.lambda() * (2.0 * t.alpha * k - I * std::conj(t.c)) * (2.0 * t.alpha * k + I * t.c);
  return -p / sum;
}

}  // namespace detail

inline cplx eval_H(const BranchedOmega& bo, const Triple& t, cplx k) { return detail::H_from_omega(t, k, bo(k)); }

namespace detail {

inline cplx rho(const BranchedOmega& bo, const Triple& t, cplx z) {
  const cplx om = bo.eval_unchecked(z);
  const cplx h = H_from_omega(t, z, om);
  return (2.0 * om - h) / (2.0 * om);
}

}  // namespace detail

/// sqrt((2 Omega - H)/(2 Omega)) continued from the value ~1 at the anchor
/// along the straight segment to k. Where that segment crosses a cut the
/// continuation takes the root nearest to the previous value.
inline cplx eval_E_prefactor(const BranchedOmega& bo, const Triple& t, cplx k) {
  const cplx k0 = bo.anchor();
  const cplx path = k - k0;
  const double len = std::abs(path);
  cplx w = std::sqrt(detail::rho(bo, t, k0));
  if (std::abs(w - 1.0) > std::abs(w + 1.0)) w = -w;
  double u = 0.0;
  for (int steps = 0; u < 1.0 && steps < 20000; ++steps) {
    const cplx z = k0 + u * path;
    double du = 0.25 * bo.distance_to_singular(z) / len;
    du = std::clamp(du, 1e-12, 1.0 - u);
    for (int halvings = 0;; ++halvings) {
      const cplx zn = k0 + (u + du) * path;
      const cplx wn = std::sqrt(detail::rho(bo, t, zn));
      const cplx pick = std::abs(wn - w) <= std::abs(wn + w) ? wn : -wn;
      const bool jump_inside = bo.cuts().blocks(z, zn);
      if (jump_inside || std::abs(pick - w) <= 0.25 * std::abs(w) || halvings > 30) {
        w = pick;
        u += du;
        break;
      }
      du *= 0.5;
    }
  }
  return w;
}

inline Mat2 E_from_parts(const Triple& t, cplx k, cplx h, cplx prefactor) {
  const double lam = t.lambda();
  const double a = t.alpha;
  Mat2 m;
  m(0, 0) = 1.0;
  m(0, 1) = lam * I * h / (2.0 * a * k - I * std::conj(t.c));
  m(1, 0) = -I * h / (2.0 * a * k + I * t.c);
  m(1, 1) = 1.0;
  return prefactor * m;
}

inline void check_E_regular(const BranchedOmega& bo, const Triple& t, cplx k) {
  const double tol = bo.root_tolerance();
  if (std::abs(k - t.c_point_lower()) <= tol || std::abs(k - t.c_point_upper()) <= tol)
    throw Error(ErrorCode::SingularPoint, "k coincides with -ic/(2 alpha) or i conj(c)/(2 alpha)");
  for (const auto& r : bo.roots().roots)
    if (std::abs(k - r.location) <= tol) throw Error(ErrorCode::SingularPoint, "k coincides with a zero of Omega");
  if (bo.cuts().distance_to_cuts(k) < bo.cuts().geometric_tolerance())
    throw Error(ErrorCode::OnCut, "k lies on a branch cut");
}

inline Mat2 eval_E(const BranchedOmega& bo, const Triple& t, cplx k) {
  check_E_regular(bo, t, k);
  const cplx om = bo.eval_unchecked(k);
  return E_from_parts(t, k, detail::H_from_omega(t, k, om), eval_E_prefactor(bo, t, k));
}

inline Mat2 eval_psi_b(const BranchedOmega& bo, const Triple& t, double time, cplx k) {
  if (time < 0.0) throw Error(ErrorCode::OutOfWindow, "t must be nonnegative");
  check_E_regular(bo, t, k);
  const cplx om = bo.eval_unchecked(k);
  if (std::abs(om.imag()) * time > 700.0) throw Error(ErrorCode::Overflow, "t |Im Omega| exceeds 700");
  const Mat2 e = E_from_parts(t, k, detail::H_from_omega(t, k, om), eval_E_prefactor(bo, t, k));
  return diag_exp(I * (t.omega / 2.0) * time) * e * diag_exp(-I * om * time);
}

/// d/dt of the closed form: (i omega/2) sigma3 psi - i Omega psi sigma3.
inline Mat2 eval_psi_b_dt(const BranchedOmega& bo, const Triple& t, double time, cplx k) {
  const Mat2 psi = eval_psi_b(bo, t, time, k);
  const cplx om = bo.eval_unchecked(k);
  return (I * t.omega / 2.0) * sigma3() * psi - I * om * psi * sigma3();
}

}  // namespace nlsadm
