#pragma once

#include "nlsadm/cli/config.hpp"
#include "nlsadm/cli/json_out.hpp"
#include "nlsadm/scattering.hpp"

#include <deque>
#include <random>

namespace nlsadm::cli {

struct InvariantResult {
  std::string id;
  std::size_t samples = 0;
  double worst = 0.0;
  double threshold = 0.0;
  bool passed() const { return worst <= threshold; }
  void observe(double v) {
    ++samples;
    if (!(v <= worst)) worst = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
};

namespace detail {

inline Triple sample_triple(std::mt19937_64& rng, Mode mode) {
  std::uniform_real_distribution<double> ua(0.2, 3.0), uw(-8.0, 8.0), uc(-4.0, 4.0);
  const double a = ua(rng), w = uw(rng), c1 = uc(rng), c2 = uc(rng);
  return Triple(a, w, cplx(c1, c2), mode);
}

inline cplx sample_regular_k(std::mt19937_64& rng, const BranchedOmega& bo, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Triple& t = bo.triple();
  for (;;) {
    const cplx k(r * u(rng), r * u(rng));
    if (std::abs(k) > r) continue;
    if (bo.distance_to_singular(k) < 1e-3 || bo.cuts().distance_to_cuts(k) < 1e-3) continue;
    if (std::abs(k - t.c_point_lower()) < 1e-3 || std::abs(k - t.c_point_upper()) < 1e-3) continue;
    return k;
  }
}

inline FamilyParams sample_family_params(std::mt19937_64& rng, Family f) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  FamilyParams p;
  p.alpha = in(0.2, 3.0);
  p.K = in(0.3, 2.0);
  const double a2 = p.alpha * p.alpha, K2 = p.K * p.K;
  switch (f) {
    case Family::A: p.omega = -3.0 * a2 * in(1e-3, 1.0); break;
    case Family::C: p.omega = -3.0 * a2 - in(1e-3, 10.0); break;
    case Family::D: p.omega = in(-a2, 8.0); break;
    case Family::B:
      p.omega = -K2 * in(4.0 + 1e-3, 12.0 - 1e-3);
      p.c2 = -(4.0 * K2 + p.omega) / 2.0 * in(0.05, 1.0);
      break;
    case Family::E:
      p.omega = -K2 * in(3.0, 4.0 - 1e-3);
      p.c2 = -(4.0 * K2 + p.omega) / 2.0 * in(0.05, 1.0);
      break;
  }
  return p;
}

/// BranchedOmega for t; the "flip-coefficient" fault negates the k^2
/// coefficient of the quartic it is built from (the constant term if that
/// coefficient is zero).
inline BranchedOmega build_for_verify(const Triple& t, const std::string& fault) {
  auto q = build_omega_squared(t);
  if (fault == "flip-coefficient") {
    if (q.coeffs[2] != 0.0)
      q.coeffs[2] = -q.coeffs[2];
    else
      q.coeffs[4] = -q.coeffs[4] - 1.0;
  }
  auto rs = solve_quartic(q);
  auto cuts = build_cuts(rs, t);
  return BranchedOmega(std::move(q), std::move(rs), std::move(cuts));
}

}  // namespace detail

/// Runs the invariant suite on `samples` random triples per check.
inline std::vector<InvariantResult> run_invariants(const RunConfig& cfg) {
  if (!cfg.inject_fault.empty() && cfg.inject_fault != "flip-coefficient")
    config_error("unknown fault '" + cfg.inject_fault + "'");
  std::mt19937_64 rng(cfg.seed);
  const int N = cfg.samples;
  std::deque<InvariantResult> out;  // stable references while growing
  const auto make = [&](const char* id, double thr) -> InvariantResult& {
    out.push_back({id, 0, 0.0, thr});
    return out.back();
  };

  auto& squares = make("spectral.omega_squares_to_quartic", 1e-10);
  auto& ident = make("spectral.identity_2OmegaHH", 1e-10);
  auto& detE = make("spectral.det_E", 1e-10);
  auto& asym = make("spectral.omega_asymptotics", 1.0);
  auto& psib = make("spectral.psi_b_t_part", 1e-8);
  auto& recon = make("roots.reconstruction", 1e-8);
  auto& conj = make("roots.conjugate_symmetry", 0.0);
  std::size_t ill = 0;
  for (int i = 0; i < N; ++i) {
    const Mode mode = i % 4 == 3 ? Mode::Focusing : Mode::Defocusing;
    const Triple t = detail::sample_triple(rng, mode);
    const auto q_true = build_omega_squared(t);
    BranchedOmega bo = [&]() -> BranchedOmega {
      for (;;) {
        try {
          return detail::build_for_verify(t, cfg.inject_fault);
        } catch (const IllConditionedError&) {
          // Perturb the constant term slightly off the degenerate set.
          ++ill;
          auto q = build_omega_squared(t);
          q.coeffs[4] += 1e-3;
          auto rs = solve_quartic(q);
          return BranchedOmega(q, rs, build_cuts(rs, t));
        }
      }
    }();
    const auto& rs = bo.roots();
    {
      const auto rec = rs.reconstruct();
      double cmax = 0.0;
      for (double c : bo.quartic().coeffs) cmax = std::max(cmax, std::abs(c));
      double e = 0.0;
      for (int j = 0; j < 5; ++j) e = std::max(e, std::abs(rec[j] - bo.quartic().coeffs[j]) / cmax);
      recon.observe(e);
      double bad = 0.0;
      for (const auto& r : rs.roots) {
        const auto p = rs.nearest(std::conj(r.location), 10.0 * rs.cluster_tolerance);
        if (!p || rs.roots[*p].multiplicity != r.multiplicity) bad = 1.0;
      }
      conj.observe(bad);
    }
    for (int j = 0; j < 10; ++j) {
      const cplx k = detail::sample_regular_k(rng, bo, 10.0);
      const cplx om = bo(k), p = q_true(k);
      squares.observe(std::abs(om * om - p) / std::max(std::abs(p), 1e-300));
      const cplx h = eval_H(bo, t, k);
      const cplx lhs = (h - 2.0 * om) * h;
      const cplx rhs = t.lambda() * (2.0 * t.alpha * k - I * std::conj(t.c)) * (2.0 * t.alpha * k + I * t.c);
      ident.observe(std::abs(lhs - rhs) / (std::abs(h - 2.0 * om) * std::abs(h) + std::abs(rhs)));
      const Mat2 e = eval_E(bo, t, k);
      detE.observe(std::abs(e.determinant() - 1.0) / std::max(1.0, max_abs(e) * max_abs(e)));
    }
    {
      const double C = t.alpha * std::abs(t.c2()) + 0.02 * (std::abs(q_true.coeffs[4]) + t.omega * t.omega + 1.0) + 1e-3;
      const cplx dir = std::exp(I * (kPi / 8.0));
      for (double r : {1e2, 1e3, 1e4}) {
        const cplx k = r * dir;
        asym.observe(std::abs(bo(k) - 2.0 * k * k - t.omega / 2.0) * r / C);
      }
    }
    for (int j = 0; j < 3; ++j) {
      const cplx k = detail::sample_regular_k(rng, bo, 3.0);
      for (double time : {0.0, 0.7}) {
        const Mat2 psi = eval_psi_b(bo, t, time, k);
        const Mat2 qt = build_Qtilde_b(t, time, k);
        const Mat2 res = eval_psi_b_dt(bo, t, time, k) + 2.0 * I * k * k * sigma3() * psi - qt * psi;
        const double scale =
            max_abs(psi) * (1.0 + 2.0 * std::norm(k) + max_abs(qt) + std::abs(t.omega) + std::abs(bo(k)));
        psib.observe(max_abs(res) / scale);
      }
    }
  }
  (void)ill;

  auto& round = make("classify.round_trip", 0.0);
  auto& pattern = make("classify.root_pattern", 0.0);
  auto& cross = make("classify.exclusion_cross_check", 0.0);
  for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::E}) {
    for (int i = 0; i < N; ++i) {
      const Triple t = generate_family(f, detail::sample_family_params(rng, f), i % 2 ? 1 : -1);
      const auto c = classify(t, {cfg.tol_membership, false});
      round.observe(c.verdict == verdict_of(f) ? 0.0 : 1.0);
      cross.observe(c.cross_check_consistent ? 0.0 : 1.0);
      try {
        pattern.observe(solve_quartic(build_omega_squared(t)).pattern() == expected_pattern(f, t) ? 0.0 : 1.0);
      } catch (const IllConditionedError&) {
        pattern.observe(1.0);
      }
    }
  }
  auto& off = make("classify.off_manifold_inadmissible", 0.0);
  for (int i = 0; i < N; ++i) {
    const auto c = classify(detail::sample_triple(rng, Mode::Defocusing), {cfg.tol_membership, false});
    off.observe(c.verdict == Verdict::Inadmissible ? 0.0 : 1.0);
    cross.observe(c.cross_check_consistent ? 0.0 : 1.0);
  }
  auto& foc = make("classify.focusing_membership", 0.0);
  for (int i = 0; i < N; ++i) {
    std::uniform_real_distribution<double> ua(0.2, 3.0), us(0.0, 8.0);
    const double a = ua(rng), s = us(rng);
    const bool A = i % 2 == 0;
    const double w = A ? a * a + s : -6.0 * a * a - s;
    const cplx c = A ? cplx((i % 4 ? 1.0 : -1.0) * a * std::sqrt(w - a * a), 0.0)
                     : cplx(0.0, a * std::sqrt(std::abs(w) + 2.0 * a * a));
    const auto v = classify(Triple(a, w, c, Mode::Focusing), {cfg.tol_membership, false}).verdict;
    foc.observe(v == (A ? Verdict::FocusingA : Verdict::FocusingB) ? 0.0 : 1.0);
  }

  auto& mirror = make("geometry.sign_field_mirror", 0.0);
  auto& resample = make("geometry.label_resample_mismatch", 1e-3);
  auto& jump = make("eigen.jump_closed_form", 1e-9);
  auto& hdiff = make("eigen.H_difference", 1e-10);
  const int Ng = std::max(1, std::min(N, 5));
  for (int i = 0; i < Ng; ++i) {
    const Triple t = detail::sample_triple(rng, Mode::Defocusing);
    const Box w{-3.0, 3.0, -3.0, 3.0};
    const auto f = compute_sign_field(t, w, {64, 64});
    const auto fm = compute_sign_field(Triple(t.alpha, t.omega, std::conj(t.c), t.mode), w, {64, 64});
    double bad = 0.0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        // c2 -> -c2 mirrors k1; conjugation of k mirrors k2. Both negate Im Omega^2.
        const auto a = f.grid.index(x, y), b = f.grid.index(63 - x, y), cj = f.grid.index(x, 63 - y);
        if (f.re_sign[a] != fm.re_sign[b] || f.im_sign[a] != -fm.im_sign[b]) bad = 1.0;
        if (f.re_sign[a] != f.re_sign[cj] || f.im_sign[a] != -f.im_sign[cj]) bad = 1.0;
      }
    mirror.observe(bad);
    try {
      const auto bo = BranchedOmega::from_triple(t);
      const auto part = partition_domains(bo, default_window(bo.cuts()), {128, 128});
      resample.observe(1.0 - resample_labels(bo, part, 1000, cfg.seed + i).rate());
      for (const auto& probe : background_jumps(bo, 10))
        for (const auto& s : probe.samples) {
          jump.observe(s.closed_form_error);
          hdiff.observe(s.H_difference_error);
        }
    } catch (const IllConditionedError&) {
    }
  }

  auto& sdet = make("eigen.scattering_det_s", 1e-8);
  auto& strace = make("eigen.scattering_trace", 1e-6);
  auto& shalf = make("eigen.step_halving", 0.0);
  const auto g = InitialProfile::gaussian(1.0, 1.0);
  std::uniform_real_distribution<double> uk(-4.0, 4.0);
  ScatteringOptions so;
  so.tol = cfg.tol_integrator;
  for (int i = 0; i < std::max(1, std::min(N, 10)); ++i) {
    const auto d = compute_scattering(g, uk(rng), so);
    sdet.observe(std::abs(d.s.determinant() - 1.0));
    strace.observe(std::abs(std::norm(*d.a) - std::norm(*d.b) - 1.0));
    shalf.observe(step_halving_check(g, d, so).consistent() ? 0.0 : 1.0);
  }
  return {out.begin(), out.end()};
}

}  // namespace nlsadm::cli
