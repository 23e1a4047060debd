#pragma once

#include "nlsadm/classify.hpp"
#include "nlsadm/geometry.hpp"

#include <functional>
#include <optional>
#include <string>

namespace nlsadm {

/// Initial datum q0 on x >= 0 with a truncation point L past which |q0| < 1e-12.
struct InitialProfile {
  std::string name;
  std::function<cplx(double)> q0;
  double L = 1.0;

  /// Samples 100 points of [L, 2L]; throws ConfigError if the datum has not decayed.
  void check_decay() const {
    for (int i = 0; i < 100; ++i) {
      const double x = L * (1.0 + i / 99.0);
      if (std::abs(q0(x)) > 1e-12) throw Error(ErrorCode::ConfigError, "profile " + name + " does not decay past L");
    }
  }

  static InitialProfile zero() { return {"zero", [](double) { return cplx(0.0); }, 1.0}; }

  static InitialProfile gaussian(cplx amp = 1.0, double width = 1.0) {
    const double L = width * std::sqrt(std::log(std::max(std::abs(amp), 1e-300) / 1e-13) + 1.0);
    return {"gaussian", [=](double x) { return amp * std::exp(-(x / width) * (x / width)); }, std::max(L, width)};
  }

  static InitialProfile sech(cplx amp = 1.0, double width = 1.0) {
    const double L = width * (std::log(2.0 * std::max(std::abs(amp), 1e-300) / 1e-13) + 1.0);
    return {"sech", [=](double x) { return amp / std::cosh(x / width); }, std::max(L, width)};
  }

  /// amp exp(-1 / (1 - (x/R)^2)) on [0, R), zero beyond.
  static InitialProfile bump(cplx amp = 1.0, double R = 2.0) {
    return {"bump",
            [=](double x) {
              const double s = x / R;
              return s < 1.0 ? amp * std::exp(-1.0 / (1.0 - s * s)) : cplx(0.0);
            },
            R};
  }
};

enum class Columns { Auto, First, Second, Both };

struct ScatteringOptions {
  double tol = 1e-10;
  double lambda = 1.0;
  Columns columns = Columns::Auto;
  /// Also integrate from 2L and report the change of s.
  bool check_truncation = false;
  std::size_t max_steps = 1000000;
};

struct ScatteringData {
  cplx k;
  Mat2 s = Mat2::Identity();
  bool first_column = false, second_column = false;
  std::optional<cplx> a, b;
  /// Sum of the embedded local error estimates over the accepted steps.
  double error_estimate = 0.0;
  std::size_t steps = 0;
  std::vector<double> mesh;
  double L = 0.0;
  std::optional<double> truncation_change;
};

namespace detail {

/// mu' = Q mu - i k [sigma3, mu], the x-part for mu = phi e^{ikx sigma3}.
inline Mat2 mu_rhs(const InitialProfile& p, double lam, cplx k, double x, const Mat2& mu) {
  const Mat2 Q = build_Q(lam, p.q0(x));
  const Mat2 s3 = sigma3();
  return Q * mu - I * k * (s3 * mu - mu * s3);
}

struct DPResult {
  Mat2 y;
  double error = 0.0;
  std::size_t steps = 0;
  std::vector<double> mesh;
};

/// Dormand-Prince 5(4) from x = L down to 0. With `fixed` given, steps exactly
/// through that mesh (no error control).
inline DPResult dormand_prince(const InitialProfile& p, double lam, cplx k, double L, Mat2 y, double tol,
                               std::size_t max_steps, const std::vector<double>* fixed = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  const auto f = [&](double x, const Mat2& m) { return mu_rhs(p, lam, k, x, m); };

  DPResult r;
  double x = L;
  r.mesh.push_back(x);
  double h = -std::min(L, 0.05 / std::max(1.0, std::abs(k)));
  Mat2 k1 = f(x, y);
  std::size_t fixed_i = 1;
  while (x > 0.0) {
    if (r.steps >= max_steps) throw Error(ErrorCode::NoConvergence, "step budget exhausted");
    if (fixed) {
      if (fixed_i >= fixed->size()) break;
      h = (*fixed)[fixed_i] - x;
    } else if (x + h < 0.0) {
      h = -x;
    }
    const Mat2 k2 = f(x + c2 * h, y + h * (a21 * k1));
    const Mat2 k3 = f(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Mat2 k4 = f(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Mat2 k5 = f(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Mat2 k6 = f(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Mat2 yn = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double xn = fixed ? (*fixed)[fixed_i] : (x + h == 0.0 || -h >= x ? 0.0 : x + h);
    const Mat2 k7 = f(xn, yn);
    const Mat2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = max_abs(err);
    const double scale = tol * (1.0 + std::max(max_abs(y), max_abs(yn)));
    if (fixed || en <= scale) {
      y = yn;
      x = xn;
      k1 = k7;
      r.error += en;
      ++r.steps;
      r.mesh.push_back(x);
      ++fixed_i;
    }
    if (!fixed) {
      const double ratio = en > 0.0 ? scale / en : 1e10;
      h *= std::clamp(0.9 * std::pow(ratio, 0.2), 0.2, 5.0);
      if (std::abs(h) < 1e-14 * std::max(1.0, L)) throw Error(ErrorCode::NoConvergence, "step size underflow");
    }
  }
  r.y = y;
  return r;
}

}  // namespace detail

/// s(k) = mu_3(0, 0, k), integrating the x-part from x = L (mu = I) down to 0.
inline ScatteringData compute_scattering(const InitialProfile& profile, cplx k, const ScatteringOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::ConfigError, "integrator tolerance must be positive");
  profile.check_decay();
  ScatteringData out;
  out.k = k;
  out.L = profile.L;
  bool c1 = false, c2 = false;
  switch (opt.columns) {
    case Columns::Auto:
      c1 = k.imag() <= 0.0;
      c2 = k.imag() >= 0.0;
      break;
    case Columns::First: c1 = true; break;
    case Columns::Second: c2 = true; break;
    case Columns::Both: c1 = c2 = true; break;
  }
  if (c1 && k.imag() > 0.0) throw Error(ErrorCode::StripViolation, "first column needs Im k <= 0");
  if (c2 && k.imag() < 0.0) throw Error(ErrorCode::StripViolation, "second column needs Im k >= 0");
  out.first_column = c1;
  out.second_column = c2;

  Mat2 y0 = Mat2::Zero();
  if (c1) y0(0, 0) = 1.0;
  if (c2) y0(1, 1) = 1.0;
  auto r = detail::dormand_prince(profile, opt.lambda, k, profile.L, y0, opt.tol, opt.max_steps);
  out.s = r.y;
  out.error_estimate = r.error;
  out.steps = r.steps;
  out.mesh = std::move(r.mesh);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!c1) out.s.col(0).setConstant(cplx(nan, nan));
  if (!c2) out.s.col(1).setConstant(cplx(nan, nan));
  if (c2) {
    out.a = out.s(1, 1);
    out.b = out.s(0, 1);
  }
  if (opt.check_truncation) {
    InitialProfile longer = profile;
    longer.L = 2.0 * profile.L;
    ScatteringOptions o2 = opt;
    o2.check_truncation = false;
    const auto r2 = compute_scattering(longer, k, o2);
    double d = 0.0;
    for (int j = 0; j < 2; ++j)
      if (j == 0 ? c1 : c2)
        for (int i = 0; i < 2; ++i) d = std::max(d, std::abs(r2.s(i, j) - out.s(i, j)));
    out.truncation_change = d;
  }
  return out;
}

struct StepHalving {
  double change_a = 0.0;
  double change_b = 0.0;
  double error_estimate = 0.0;
  bool consistent() const { return std::max(change_a, change_b) <= 10.0 * error_estimate + 1e-15; }
};

/// Reruns the accepted mesh with every step split in two and compares a, b.
inline StepHalving step_halving_check(const InitialProfile& profile, const ScatteringData& d,
                                      const ScatteringOptions& opt = {}) {
  if (!d.a || !d.b) throw Error(ErrorCode::StripViolation, "step halving needs the second column");
  std::vector<double> fine;
  for (std::size_t i = 0; i < d.mesh.size(); ++i) {
    if (i > 0) fine.push_back(0.5 * (d.mesh[i - 1] + d.mesh[i]));
    fine.push_back(d.mesh[i]);
  }
  Mat2 y0 = Mat2::Zero();
  y0(1, 1) = 1.0;
  if (d.first_column) y0(0, 0) = 1.0;
  const auto r = detail::dormand_prince(profile, opt.lambda, d.k, d.L, y0, opt.tol, opt.max_steps, &fine);
  return {std::abs(r.y(1, 1) - *d.a), std::abs(r.y(0, 1) - *d.b), d.error_estimate};
}

struct JumpSample {
  cplx k;
  cplx omega_plus, omega_minus;
  cplx H_plus, H_minus;
  cplx BA_plus, BA_minus;
  cplx jump;
  cplx closed_form;
  double closed_form_error = 0.0;  // relative
  double H_difference_error = 0.0; // |H+ - H- - 2 Omega+| / |Omega+|
};

struct JumpProbe {
  Triple triple;
  Cut cut;
  std::vector<JumpSample> samples;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
  /// False when the cut has zero length (nothing to probe).
  bool valid = false;
};

struct JumpOptions {
  double epsilon = 1e-7;
  /// |Omega+| below this (relative to 1 + |k|^2) counts as a zero of Omega.
  double degenerate_omega = 1e-8;
};

namespace detail {

inline std::pair<cplx, cplx> point_on_chain(const std::vector<cplx>& pts, double s) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += std::abs(pts[i] - pts[i - 1]);
  double target = s * total;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double len = std::abs(pts[i] - pts[i - 1]);
    if (len > 0.0 && (target <= len || i + 1 == pts.size())) {
      const cplx tangent = (pts[i] - pts[i - 1]) / len;
      return {pts[i - 1] + std::min(target, len) * tangent, tangent};
    }
    target -= len;
  }
  return {pts.front(), cplx(1.0, 0.0)};
}

}  // namespace detail

/// Probes the nu = I jump of B/A across `cut` (one of bo's quartic cuts) at
/// `n_samples` interior points. One-sided limits come from offsets
/// +-eps*len and +-2 eps*len along the normal ("+" is the right-hand side)
/// combined by Richardson extrapolation.
inline JumpProbe background_jump(const BranchedOmega& bo, const Cut& cut, int n_samples,
                                 const JumpOptions& opt = {}) {
  JumpProbe probe;
  probe.triple = bo.triple();
  probe.cut = cut;
  const Triple& t = probe.triple;
  if (cut.degenerate() || cut.length() == 0.0) {
    probe.notes.push_back("no valid cut: zero-length quartic cut");
    return probe;
  }
  probe.valid = true;
  const double len = cut.length();
  const double lam = t.lambda();
  for (int j = 0; j < n_samples; ++j) {
    const double s = (j + 0.5) / n_samples;
    const auto [k, tangent] = detail::point_on_chain(cut.points, s);
    const cplx normal = -I * tangent;
    const auto side = [&](double sign) {
      const cplx o1 = bo.eval_unchecked(k + sign * opt.epsilon * len * normal);
      const cplx o2 = bo.eval_unchecked(k + sign * 2.0 * opt.epsilon * len * normal);
      return 2.0 * o1 - o2;
    };
    JumpSample js;
    js.k = k;
    js.omega_plus = side(1.0);
    js.omega_minus = side(-1.0);
    if (std::abs(js.omega_plus) <= opt.degenerate_omega * (1.0 + std::norm(k))) {
      ++probe.skipped;
      probe.notes.push_back("DegenerateOmega: Omega+ vanishes near s = " + std::to_string(s));
      continue;
    }
    js.H_plus = detail::H_from_omega(t, k, js.omega_plus);
    js.H_minus = detail::H_from_omega(t, k, js.omega_minus);
    js.H_difference_error = std::abs(js.H_plus - js.H_minus - 2.0 * js.omega_plus) / std::abs(js.omega_plus);
    // (B, A)_+- = (E12, E22)_+-; the prefactor cancels in the ratio.
    const Mat2 Ep = E_from_parts(t, k, js.H_plus, 1.0);
    const Mat2 Em = E_from_parts(t, k, js.H_minus, 1.0);
    js.BA_plus = Ep(0, 1) / Ep(1, 1);
    js.BA_minus = Em(0, 1) / Em(1, 1);
    js.jump = js.BA_plus - js.BA_minus;
    const cplx d = 2.0 * I * t.alpha * k + std::conj(t.c);
    js.closed_form = -2.0 * lam * d * js.omega_plus / ((-d) * (-d));
    js.closed_form_error = std::abs(js.jump - js.closed_form) / std::abs(js.closed_form);
    probe.samples.push_back(js);
  }
  return probe;
}

/// Background jump across every non-degenerate quartic cut of bo.
inline std::vector<JumpProbe> background_jumps(const BranchedOmega& bo, int n_samples, const JumpOptions& opt = {}) {
  std::vector<JumpProbe> v;
  for (const auto& c : bo.cuts().quartic_cuts)
    if (!c.degenerate()) v.push_back(background_jump(bo, c, n_samples, opt));
  return v;
}

struct GlobalRelationVerdict {
  bool d1_minus_C_connected = false;
  /// Connected D1 \ C and a sampled stretch of the cut with Im k > 0 and Im Omega = 0 (inside cl D1).
  bool lemma_applies = false;
  std::optional<bool> jump_obstruction;
  bool verdict_consistent_with_classify = true;
  std::string note;
};

inline GlobalRelationVerdict global_relation_verdict(const Triple& t, const DomainPartition& partition,
                                                     const std::optional<JumpProbe>& probe,
                                                     double im_tol = 1e-6) {
  GlobalRelationVerdict v;
  v.d1_minus_C_connected = partition.d1_connected();
  bool in_closure = false;
  if (probe && probe->valid && !probe->samples.empty()) {
    bool nonzero = true;
    for (const auto& s : probe->samples) {
      nonzero = nonzero && std::abs(s.jump) > 1e-12 * (1.0 + std::abs(s.closed_form));
      if (s.k.imag() > 0.0 && std::abs(s.omega_plus.imag()) <= im_tol * (1.0 + std::abs(s.omega_plus))) in_closure = true;
    }
    v.jump_obstruction = nonzero;
  }
  v.lemma_applies = v.d1_minus_C_connected && in_closure;
  const Verdict c = classify(t).verdict;
  if (v.lemma_applies && v.jump_obstruction.value_or(false)) {
    v.verdict_consistent_with_classify = c == Verdict::Inadmissible;
    v.note = "jump of B/A across a cut in cl(D1) contradicts the global relation";
  } else {
    v.verdict_consistent_with_classify = true;
    v.note = v.d1_minus_C_connected ? "no quartic cut inside cl(D1): route silent" : "D1 minus C not connected: lemma does not apply";
  }
  return v;
}

}  // namespace nlsadm
