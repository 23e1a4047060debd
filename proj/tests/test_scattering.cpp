#include "nlsadm/scattering.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace nlsadm;

namespace {

/// Zeros of 4k^4 + 1 joined to their conjugates along Gamma (the diagonals).
BranchedOmega first_quadrant_cut_omega() {
  const Triple t(1.0, 0.0, 0.0);
  const cplx K = cplx(1.0, 1.0) / 2.0;
  const cplx L = cplx(-1.0, 1.0) / 2.0;
  return BranchedOmega::from_triple(t, CutStrategy::custom({gamma_cut(t, K), gamma_cut(t, L)}));
}

}  // namespace

TEST(Scattering, ZeroProfileGivesIdentity) {
  for (cplx k : {cplx(0.3, 0.0), cplx(-2.0, 0.0), cplx(0.0, 1.0), cplx(1.0, -0.5)}) {
    const auto d = compute_scattering(InitialProfile::zero(), k);
    if (d.second_column) {
      EXPECT_EQ(*d.a, cplx(1.0, 0.0));
      EXPECT_EQ(*d.b, cplx(0.0, 0.0));
      EXPECT_EQ(d.s(0, 1), cplx(0.0));
    }
    if (d.first_column) {
      EXPECT_EQ(d.s(0, 0), cplx(1.0));
      EXPECT_EQ(d.s(1, 0), cplx(0.0));
    }
  }
  const auto d = compute_scattering(InitialProfile::zero(), 0.7);
  EXPECT_EQ(d.s, Mat2::Identity());
}

TEST(Scattering, GaussianUnimodular) {
  const auto p = InitialProfile::gaussian(1.0, 1.0);
  for (double k : {-3.0, -1.0, -0.2, 0.0, 0.5, 1.5, 4.0}) {
    const auto d = compute_scattering(p, k);
    EXPECT_LE(std::abs(d.s.determinant() - 1.0), 1e-8);
    EXPECT_LE(std::abs(std::norm(*d.a) - std::norm(*d.b) - 1.0), 1e-6);
    // s = [[conj a, b], [conj b, a]] at real k.
    EXPECT_LE(std::abs(d.s(0, 0) - std::conj(*d.a)), 1e-8);
    EXPECT_LE(std::abs(d.s(1, 0) - std::conj(*d.b)), 1e-8);
    const auto h = step_halving_check(p, d);
    EXPECT_TRUE(h.consistent()) << h.change_a << " " << h.change_b << " " << h.error_estimate;
  }
}

TEST(Scattering, FocusingTraceIdentity) {
  ScatteringOptions opt;
  opt.lambda = -1.0;
  const auto d = compute_scattering(InitialProfile::sech(0.8, 1.0), 0.4, opt);
  EXPECT_LE(std::abs(std::norm(*d.a) + std::norm(*d.b) - 1.0), 1e-6);
}

TEST(Scattering, TruncationCheck) {
  ScatteringOptions opt;
  opt.check_truncation = true;
  const auto d = compute_scattering(InitialProfile::gaussian(1.0, 1.0), 0.8, opt);
  ASSERT_TRUE(d.truncation_change.has_value());
  EXPECT_LT(*d.truncation_change, 1e-8);
}

TEST(Scattering, BumpUpperHalfPlane) {
  const auto d = compute_scattering(InitialProfile::bump(1.0, 2.0), cplx(0.0, 1.0));
  EXPECT_TRUE(d.second_column);
  EXPECT_FALSE(d.first_column);
  ASSERT_TRUE(d.b.has_value());
  EXPECT_TRUE(std::isfinite(std::abs(*d.b)));
  EXPECT_GT(d.error_estimate, 0.0);
  EXPECT_LT(d.error_estimate, 1e-6);
}

TEST(Scattering, StripViolation) {
  ScatteringOptions opt;
  opt.columns = Columns::First;
  try {
    compute_scattering(InitialProfile::gaussian(), cplx(0.0, 1.0), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StripViolation);
  }
  opt.columns = Columns::Both;
  EXPECT_THROW(compute_scattering(InitialProfile::gaussian(), cplx(0.0, -1.0), opt), Error);
}

TEST(Scattering, ProfileDecay) {
  for (const auto& p : {InitialProfile::gaussian(2.0, 1.5), InitialProfile::sech(1.0, 0.5), InitialProfile::bump()})
    EXPECT_NO_THROW(p.check_decay());
  InitialProfile bad = InitialProfile::sech(1.0, 1.0);
  bad.L = 3.0;
  EXPECT_THROW(bad.check_decay(), Error);
}

TEST(Jump, InadmissibleFirstQuadrantCut) {
  const auto bo = first_quadrant_cut_omega();
  const auto probe = background_jump(bo, bo.cuts().quartic_cuts[0], 40);
  ASSERT_TRUE(probe.valid);
  EXPECT_GE(probe.samples.size(), 38u);
  for (const auto& s : probe.samples) {
    EXPECT_GT(std::abs(s.jump), 1e-6);
    EXPECT_LE(s.closed_form_error, 1e-9);
    EXPECT_LE(s.H_difference_error, 1e-10);
    // Omega is real on this cut: it lies in cl(D1).
    EXPECT_LE(std::abs(s.omega_plus.imag()), 1e-6);
  }
}

TEST(Jump, HDifferenceOnDefaultCuts) {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 20; ++n) {
    const auto t = nlsadm::testing::random_triple(rng);
    const auto bo = BranchedOmega::from_triple(t);
    for (const auto& probe : background_jumps(bo, 10))
      for (const auto& s : probe.samples) {
        EXPECT_LE(s.H_difference_error, 1e-10);
        EXPECT_LE(s.closed_form_error, 1e-9);
      }
  }
}

TEST(Jump, FamilyDHasNoValidCut) {
  const auto bo = BranchedOmega::from_triple(Triple(1.0, 1.0, std::sqrt(2.0)));
  for (const auto& c : bo.cuts().quartic_cuts) {
    const auto probe = background_jump(bo, c, 10);
    EXPECT_FALSE(probe.valid);
    EXPECT_FALSE(probe.notes.empty());
  }
}

TEST(GlobalRelation, Examples) {
  {
    const auto bo = first_quadrant_cut_omega();
    const auto part = partition_domains(bo, default_window(bo.cuts()), {200, 200});
    const auto probe = background_jump(bo, bo.cuts().quartic_cuts[0], 20);
    const auto v = global_relation_verdict(bo.triple(), part, probe);
    EXPECT_TRUE(v.d1_minus_C_connected);
    EXPECT_TRUE(v.lemma_applies);
    ASSERT_TRUE(v.jump_obstruction.has_value());
    EXPECT_TRUE(*v.jump_obstruction);
    EXPECT_TRUE(v.verdict_consistent_with_classify);
  }
  {
    const Triple t(1.0, 1.0, std::sqrt(2.0));
    const auto bo = BranchedOmega::from_triple(t, CutStrategy::loop_around(cplx(0, 0.5), 0.6));
    const auto part = partition_domains(bo, default_window(bo.cuts()), {200, 200});
    const auto v = global_relation_verdict(t, part, background_jump(bo, bo.cuts().quartic_cuts[0], 20));
    EXPECT_FALSE(v.d1_minus_C_connected);
    EXPECT_FALSE(v.lemma_applies);
    EXPECT_TRUE(v.verdict_consistent_with_classify);
  }
  {
    const Triple t(2.0, -12.0, cplx(0, 4.0));
    const auto bo = BranchedOmega::from_triple(t);
    const auto part = partition_domains(bo, default_window(bo.cuts()), {200, 200});
    const auto probes = background_jumps(bo, 20);
    ASSERT_FALSE(probes.empty());
    const auto v = global_relation_verdict(t, part, probes[0]);
    EXPECT_FALSE(v.lemma_applies);
    EXPECT_TRUE(v.verdict_consistent_with_classify);
    EXPECT_EQ(classify(t).verdict, Verdict::FamilyA);
  }
}
