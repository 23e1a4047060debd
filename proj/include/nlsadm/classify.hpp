#pragma once

#include "nlsadm/roots.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nlsadm {

enum class Verdict { FamilyA, FamilyB, FamilyC, FamilyD, FamilyE, FocusingA, FocusingB, Inadmissible };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::FamilyA: return "FamilyA";
    case Verdict::FamilyB: return "FamilyB";
    case Verdict::FamilyC: return "FamilyC";
    case Verdict::FamilyD: return "FamilyD";
    case Verdict::FamilyE: return "FamilyE";
    case Verdict::FocusingA: return "FocusingA";
    case Verdict::FocusingB: return "FocusingB";
    case Verdict::Inadmissible: return "Inadmissible";
  }
  return "Inadmissible";
}

enum class Family { A, B, C, D, E };

inline const char* to_string(Family f) {
  static const char* names[] = {"A", "B", "C", "D", "E"};
  return names[static_cast<int>(f)];
}

inline Verdict verdict_of(Family f) { return static_cast<Verdict>(static_cast<int>(f)); }

inline std::optional<Family> parse_family(const std::string& s) {
  if (s == "A") return Family::A;
  if (s == "B") return Family::B;
  if (s == "C") return Family::C;
  if (s == "D") return Family::D;
  if (s == "E") return Family::E;
  return std::nullopt;
}

/// One tested condition. `margin` is the normalised slack: >= 0 when the
/// condition holds (for equalities, tol minus residual).
struct RuleRecord {
  std::string id;
  bool passed = false;
  double margin = 0.0;
  std::vector<std::pair<std::string, double>> quantities;
};

struct Classification {
  Verdict verdict = Verdict::Inadmissible;
  std::vector<RuleRecord> reasons;
  std::set<std::string> boundary_flags;
  bool tolerance_ambiguous = false;
  std::optional<double> witness_K;
  /// Exclusion rules agree with the verdict (only evaluated in defocusing mode).
  bool cross_check_consistent = true;
};

struct ClassifyOptions {
  double tol = 1e-9;
  /// Throw InternalInconsistency when the exclusion rules contradict a family verdict.
  bool verify = false;
};

namespace detail {

/// Accumulates the tests of one family.
class MembershipTest {
 public:
  MembershipTest(std::string prefix, double tol) : prefix_(std::move(prefix)), tol_(tol) {}

  void equal(const std::string& id, double value, double target, double scale) {
    const double res = std::abs(value - target) / scale;
    RuleRecord r{prefix_ + id, res <= tol_, tol_ - res, {{"value", value}, {"target", target}}};
    residual_ = std::max(residual_, res);
    ok_ = ok_ && r.passed;
    records_.push_back(std::move(r));
  }

  // x <= b (closed) passes within tol; x < b (open) needs slack beyond tol, so
  // a triple in the tolerance band of an open edge belongs to the neighbour.
  void less(const std::string& id, double x, double b, double scale, bool closed, const std::string& flag = {}) {
    const double slack = (b - x) / scale;
    const bool pass = closed ? slack >= -tol_ : slack > tol_;
    RuleRecord r{prefix_ + id, pass, slack, {{"lhs", x}, {"rhs", b}}};
    ok_ = ok_ && pass;
    if (std::abs(slack) <= tol_) {
      if (!flag.empty()) flags_.insert(flag);
      if (std::abs(slack) > 0.1 * tol_) ambiguous_ = true;
    }
    records_.push_back(std::move(r));
  }

  void require(const std::string& id, bool pass) {
    records_.push_back(RuleRecord{prefix_ + id, pass, pass ? 1.0 : -1.0, {}});
    ok_ = ok_ && pass;
  }

  bool ok() const { return ok_; }
  double residual() const { return residual_; }
  std::vector<RuleRecord>& records() { return records_; }
  std::set<std::string>& flags() { return flags_; }
  bool ambiguous() const { return ambiguous_; }
  std::optional<double> K;

 private:
  std::string prefix_;
  double tol_;
  bool ok_ = true;
  double residual_ = 0.0;
  bool ambiguous_ = false;
  std::vector<RuleRecord> records_;
  std::set<std::string> flags_;
};

struct Scales {
  double n;      // max(1, alpha^2, |omega|, |c|^2): for squared c quantities
  double c;      // sqrt(n): for c quantities
  double omega;  // max(1, alpha^2, |omega|)
};

inline Scales scales_of(const Triple& t) {
  const double n = std::max({1.0, t.alpha * t.alpha, std::abs(t.omega), std::norm(t.c)});
  return {n, std::sqrt(n), std::max({1.0, t.alpha * t.alpha, std::abs(t.omega)})};
}

inline MembershipTest test_family_A(const Triple& t, double tol) {
  const auto s = scales_of(t);
  const double a = t.alpha, w = t.omega;
  MembershipTest m("A.", tol);
  m.less("omega>=-3alpha^2", -3.0 * a * a, w, s.omega, true, "A_C_joint");
  m.less("omega<0", w, 0.0, s.omega, false, "A_omega_zero_edge");
  const double c2t = std::pow(std::abs(w), 1.5) / (3.0 * std::sqrt(3.0) * a);
  const double c1sq_t = std::pow(std::max(0.0, w + 3.0 * a * a), 3) / (27.0 * a * a);
  m.equal("c2=|omega|^{3/2}/(3sqrt3 alpha)", t.c2(), c2t, s.c);
  m.equal("c1^2=(omega+3alpha^2)^3/(27alpha^2)", t.c1() * t.c1(), c1sq_t, s.n);
  return m;
}

inline MembershipTest test_family_C(const Triple& t, double tol) {
  const auto s = scales_of(t);
  const double a = t.alpha, w = t.omega;
  MembershipTest m("C.", tol);
  m.less("omega<-3alpha^2", w, -3.0 * a * a, s.omega, false, "A_C_joint");
  m.equal("c1=0", t.c1(), 0.0, s.c);
  m.equal("c2=alpha sqrt(-2alpha^2-omega)", t.c2(), a * std::sqrt(std::max(0.0, -2.0 * a * a - w)), s.c);
  return m;
}

inline MembershipTest test_family_D(const Triple& t, double tol) {
  const auto s = scales_of(t);
  const double a = t.alpha, w = t.omega;
  MembershipTest m("D.", tol);
  m.less("omega+alpha^2>=0", -a * a, w, s.omega, true, "D_c_zero_edge");
  m.equal("c2=0", t.c2(), 0.0, s.c);
  m.equal("c1^2=alpha^2(omega+alpha^2)", t.c1() * t.c1(), a * a * (w + a * a), s.n);
  if (std::abs(w) <= tol * s.omega) m.flags().insert("D_omega_zero");
  return m;
}

/// Families B and E share the parametrisation through the witness K > 0,
/// a real root of 4K^3 + omega K + alpha c2.
inline MembershipTest test_family_BE(const Triple& t, double tol, bool family_B) {
  const auto s = scales_of(t);
  const double a = t.alpha, w = t.omega, c2 = t.c2();
  const std::string prefix = family_B ? "B." : "E.";
  std::optional<MembershipTest> best;
  for (double K : gamma_real_intersections(w, a * c2)) {
    if (!(K > 0.0)) continue;
    // A double root of the cubic sits at 12K^2 + omega = 0; eigenvalues only
    // resolve it to sqrt(eps), so snap onto it when the cubic vanishes there.
    if (w < 0.0) {
      const double Ks = std::sqrt(-w / 12.0);
      const double val = 4.0 * Ks * Ks * Ks + w * Ks + a * c2;
      const double scale = 4.0 * Ks * Ks * Ks + std::abs(w) * Ks + a * std::abs(c2);
      if (std::abs(K - Ks) <= 1e-6 * (1.0 + Ks) && std::abs(val) <= tol * scale) K = Ks;
    }
    const double K2 = K * K;
    MembershipTest m(prefix, tol);
    m.K = K;
    m.records().push_back(RuleRecord{prefix + "witness_K", true, 0.0, {{"K", K}}});
    if (family_B) {
      m.less("c2>0", 0.0, c2, s.c, false);
      m.less("omega>-12K^2", -12.0 * K2, w, s.omega, false);
      m.less("omega<-4K^2", w, -4.0 * K2, s.omega, false);
      m.less("c2<=-(4K^2+omega)/2", c2, -(4.0 * K2 + w) / 2.0, s.c, true, "B_c1_zero_edge");
    } else {
      m.less("c2<0", c2, 0.0, s.c, false);
      m.less("omega>-4K^2", -4.0 * K2, w, s.omega, false);
      m.less("omega<=-3K^2", w, -3.0 * K2, s.omega, true, "E_omega_edge");
      m.less("c2>=-(4K^2+omega)/2", -(4.0 * K2 + w) / 2.0, c2, s.c, true, "E_c1_zero_edge");
    }
    const double shift = a * a + w / 2.0;
    const double c1sq = shift * shift - c2 * c2 - 2.0 * K2 * (6.0 * K2 + w);
    m.equal("c1^2=(alpha^2+omega/2)^2-c2^2-2K^2(6K^2+omega)", t.c1() * t.c1(), c1sq, s.n);
    if (!best || (m.ok() && !best->ok()) || (m.ok() == best->ok() && m.residual() < best->residual()))
      best = std::move(m);
  }
  if (!best) {
    MembershipTest m(prefix, tol);
    m.require("positive_witness_K", false);
    return m;
  }
  return std::move(*best);
}

inline void absorb(Classification& c, MembershipTest& m, bool take_flags) {
  for (auto& r : m.records()) c.reasons.push_back(std::move(r));
  if (take_flags) {
    c.boundary_flags.insert(m.flags().begin(), m.flags().end());
    c.tolerance_ambiguous = c.tolerance_ambiguous || m.ambiguous();
  }
}

}  // namespace detail

struct ExclusionRules {
  bool complex_pair_first_quadrant = false;
  bool odd_order_real_zero = false;
  bool evaluated = false;
};

/// Direct exclusion rules of the case analysis: a zero with Re K > 0 and
/// Im K > 0, or a real zero of odd order beyond the middle real intersection
/// of Gamma (mirrored for c2 < 0).
inline ExclusionRules exclusion_rules(const Triple& t) {
  ExclusionRules ex;
  RootSet rs;
  try {
    rs = solve_quartic(build_omega_squared(t));
  } catch (const IllConditionedError&) {
    return ex;
  }
  ex.evaluated = true;
  const double eps = 10.0 * rs.cluster_tolerance;
  for (const auto& r : rs.roots)
    if (r.location.real() > eps && r.location.imag() > eps) ex.complex_pair_first_quadrant = true;
  if (t.c2() != 0.0) {
    const auto kj = gamma_real_intersections(t.omega, t.alpha * t.c2());
    if (kj.size() == 3) {
      for (const auto& r : rs.roots) {
        if (r.multiplicity % 2 == 0 || std::abs(r.location.imag()) > eps) continue;
        const double x = r.location.real();
        if ((t.c2() > 0.0 && x > kj[1] + eps) || (t.c2() < 0.0 && x < kj[1] - eps)) ex.odd_order_real_zero = true;
      }
    }
  }
  return ex;
}

inline Classification classify_defocusing(const Triple& t, const ClassifyOptions& opt = {}) {
  if (t.mode != Mode::Defocusing) throw Error(ErrorCode::InvalidTriple, "classify_defocusing needs lambda = +1");
  Classification out;
  const double tol = opt.tol;
  std::vector<std::pair<Family, detail::MembershipTest>> tests;
  tests.emplace_back(Family::A, detail::test_family_A(t, tol));
  tests.emplace_back(Family::B, detail::test_family_BE(t, tol, true));
  tests.emplace_back(Family::C, detail::test_family_C(t, tol));
  tests.emplace_back(Family::D, detail::test_family_D(t, tol));
  tests.emplace_back(Family::E, detail::test_family_BE(t, tol, false));

  int best = -1;
  std::vector<std::string> matched;
  for (int i = 0; i < int(tests.size()); ++i) {
    if (!tests[i].second.ok()) continue;
    matched.push_back(to_string(tests[i].first));
    if (best < 0 || tests[i].second.residual() < tests[best].second.residual()) best = i;
  }
  for (int i = 0; i < int(tests.size()); ++i) detail::absorb(out, tests[i].second, i == best);
  if (matched.size() > 1) {
    std::string s = "multiple_match";
    for (const auto& m : matched) s += ":" + m;
    out.boundary_flags.insert(s);
  }

  // Case-analysis records for c2 = 0: these restate D by the sign of omega.
  const auto sc = detail::scales_of(t);
  if (std::abs(t.c2()) <= tol * sc.c) {
    const double a2 = t.alpha * t.alpha, w = t.omega;
    const double c1sq = t.c1() * t.c1();
    std::string id;
    double target;
    if (std::abs(w) <= tol * sc.omega) {
      id = "fourth_order_zero";
      target = a2 * a2;
    } else if (w > 0) {
      id = "double_zeros_at_pm_i_sqrt_omega_over_2";
      target = a2 * (w + a2);
    } else {
      id = "double_zeros_at_pm_sqrt_abs_omega_over_2";
      target = a2 * (w + a2);
    }
    const double res = std::abs(c1sq - target) / sc.n;
    const bool pass = res <= tol && (w >= 0 || w + a2 >= -tol * sc.omega);
    out.reasons.push_back(RuleRecord{id, pass, tol - res, {{"c1^2", c1sq}, {"target", target}}});
  }

  const auto ex = exclusion_rules(t);
  out.reasons.push_back(RuleRecord{"exclusion.complex_pair_first_quadrant", !ex.complex_pair_first_quadrant, 0.0, {}});
  out.reasons.push_back(RuleRecord{"exclusion.odd_order_real_zero", !ex.odd_order_real_zero, 0.0, {}});

  if (best >= 0) {
    out.verdict = verdict_of(tests[best].first);
    out.witness_K = tests[best].second.K;
    if (ex.complex_pair_first_quadrant || ex.odd_order_real_zero) {
      out.cross_check_consistent = false;
      if (opt.verify)
        throw Error(ErrorCode::InternalInconsistency,
                    std::string("exclusion rule fired on a ") + to_string(out.verdict) + " triple");
    }
  } else {
    out.verdict = Verdict::Inadmissible;
  }
  return out;
}

inline Classification classify_focusing(const Triple& t, const ClassifyOptions& opt = {}) {
  if (t.mode != Mode::Focusing) throw Error(ErrorCode::InvalidTriple, "classify_focusing needs lambda = -1");
  Classification out;
  const auto s = detail::scales_of(t);
  const double a = t.alpha, w = t.omega;

  detail::MembershipTest fa("FocusingA.", opt.tol);
  fa.less("omega>=alpha^2", a * a, w, s.omega, true, "FocusingA_c_zero_edge");
  fa.equal("c2=0", t.c2(), 0.0, s.c);
  fa.equal("c1^2=alpha^2(omega-alpha^2)", t.c1() * t.c1(), a * a * (w - a * a), s.n);

  detail::MembershipTest fb("FocusingB.", opt.tol);
  fb.less("omega<=-6alpha^2", w, -6.0 * a * a, s.omega, true, "FocusingB_omega_edge");
  fb.equal("c1=0", t.c1(), 0.0, s.c);
  fb.equal("c2=alpha sqrt(|omega|+2alpha^2)", t.c2(), a * std::sqrt(std::abs(w) + 2.0 * a * a), s.c);

  const bool a_ok = fa.ok(), b_ok = fb.ok();
  detail::absorb(out, fa, a_ok);
  detail::absorb(out, fb, b_ok && !a_ok);
  out.verdict = a_ok ? Verdict::FocusingA : (b_ok ? Verdict::FocusingB : Verdict::Inadmissible);
  return out;
}

inline Classification classify(const Triple& t, const ClassifyOptions& opt = {}) {
  return t.mode == Mode::Defocusing ? classify_defocusing(t, opt) : classify_focusing(t, opt);
}

/// Family parameters: A, C, D use (alpha, omega); B, E use (K, omega, c2).
struct FamilyParams {
  double alpha = 1.0;
  double omega = 0.0;
  double K = 1.0;
  double c2 = 0.0;
};

/// A triple on the given family; `sign` selects the sign of c1.
inline Triple generate_family(Family f, const FamilyParams& p, int sign = 1) {
  const double sg = sign >= 0 ? 1.0 : -1.0;
  const auto window = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::OutOfWindow, what);
  };
  const double w = p.omega;
  switch (f) {
    case Family::A: {
      const double a = p.alpha;
      window(a > 0.0, "alpha > 0");
      window(w >= -3.0 * a * a, "omega >= -3 alpha^2");
      window(w < 0.0, "omega < 0");
      const double c1 = sg * std::sqrt(std::pow(w + 3.0 * a * a, 3) / (27.0 * a * a));
      const double c2 = std::pow(std::abs(w), 1.5) / (3.0 * std::sqrt(3.0) * a);
      return Triple(a, w, cplx(c1, c2));
    }
    case Family::C: {
      const double a = p.alpha;
      window(a > 0.0, "alpha > 0");
      window(w < -3.0 * a * a, "omega < -3 alpha^2");
      return Triple(a, w, cplx(0.0, a * std::sqrt(-2.0 * a * a - w)));
    }
    case Family::D: {
      const double a = p.alpha;
      window(a > 0.0, "alpha > 0");
      window(w + a * a >= 0.0, "omega + alpha^2 >= 0");
      return Triple(a, w, cplx(sg * a * std::sqrt(w + a * a), 0.0));
    }
    case Family::B:
    case Family::E: {
      const double K = p.K, K2 = K * K, c2 = p.c2;
      window(K > 0.0, "K > 0");
      if (f == Family::B) {
        window(w > -12.0 * K2, "omega > -12 K^2");
        window(w < -4.0 * K2, "omega < -4 K^2");
        window(c2 > 0.0, "c2 > 0");
        window(c2 <= -(4.0 * K2 + w) / 2.0, "c2 <= -(4K^2 + omega)/2");
      } else {
        window(w > -4.0 * K2, "omega > -4 K^2");
        window(w <= -3.0 * K2, "omega <= -3 K^2");
        window(c2 < 0.0, "c2 < 0");
        window(c2 >= -(4.0 * K2 + w) / 2.0, "c2 >= -(4K^2 + omega)/2");
      }
      const double a = -(4.0 * K2 * K + w * K) / c2;
      const double shift = a * a + w / 2.0;
      const double c1sq = shift * shift - c2 * c2 - 2.0 * K2 * (6.0 * K2 + w);
      return Triple(a, w, cplx(sg * std::sqrt(std::max(0.0, c1sq)), c2));
    }
  }
  throw Error(ErrorCode::OutOfWindow, "unknown family");
}

/// Multiplicity pattern implied by the family (sorted descending).
inline std::vector<int> expected_pattern(Family f, const Triple& t) {
  switch (f) {
    case Family::A: return {3, 1};
    case Family::B:
    case Family::C:
    case Family::E: return {2, 1, 1};
    case Family::D: return t.omega == 0.0 ? std::vector<int>{4} : std::vector<int>{2, 2};
  }
  return {};
}

}  // namespace nlsadm
