#include "nlsadm/classify.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace nlsadm;

namespace {

bool has_reason(const Classification& c, const std::string& id, bool passed) {
  for (const auto& r : c.reasons)
    if (r.id == id && r.passed == passed) return true;
  return false;
}

}  // namespace

TEST(ClassifyDefocusing, Examples) {
  EXPECT_EQ(classify(Triple(1.0, 1.0, std::sqrt(2.0))).verdict, Verdict::FamilyD);
  EXPECT_EQ(classify(Triple(std::sqrt(2.0), -8.0, cplx(0, 2.0 * std::sqrt(2.0)))).verdict, Verdict::FamilyC);
  EXPECT_EQ(classify(Triple(2.0, -12.0, cplx(0, 4.0))).verdict, Verdict::FamilyA);

  const auto b = classify(Triple(4.0, -8.0, cplx(std::sqrt(147.0), 1.0)));
  EXPECT_EQ(b.verdict, Verdict::FamilyB);
  ASSERT_TRUE(b.witness_K.has_value());
  EXPECT_NEAR(*b.witness_K, 1.0, 1e-12);
}

TEST(ClassifyDefocusing, FourthOrderZeroFails) {
  const auto c = classify(Triple(1.0, 0.0, 0.5));
  EXPECT_EQ(c.verdict, Verdict::Inadmissible);
  EXPECT_TRUE(has_reason(c, "fourth_order_zero", false));
  EXPECT_TRUE(classify(Triple(1.0, 0.0, 1.0)).verdict == Verdict::FamilyD);
}

TEST(ClassifyDefocusing, InadmissibleHasViolatedCondition) {
  const auto c = classify(Triple(1.0, 0.0, 0.0));
  EXPECT_EQ(c.verdict, Verdict::Inadmissible);
  bool violated = false;
  for (const auto& r : c.reasons) violated = violated || !r.passed;
  EXPECT_TRUE(violated);
  EXPECT_TRUE(has_reason(c, "exclusion.complex_pair_first_quadrant", false));
}

TEST(ClassifyFocusing, Examples) {
  EXPECT_EQ(classify(Triple(1.0, 2.0, 1.0, Mode::Focusing)).verdict, Verdict::FocusingA);
  const auto b = classify(Triple(1.0, -6.0, cplx(0, std::sqrt(8.0)), Mode::Focusing));
  EXPECT_EQ(b.verdict, Verdict::FocusingB);
  EXPECT_TRUE(b.boundary_flags.count("FocusingB_omega_edge"));
  EXPECT_EQ(classify(Triple(1.0, 0.0, 0.0, Mode::Focusing)).verdict, Verdict::Inadmissible);
}

TEST(ClassifyMode, Respected) {
  EXPECT_THROW(classify_defocusing(Triple(1.0, 2.0, 1.0, Mode::Focusing)), Error);
  EXPECT_THROW(classify_focusing(Triple(1.0, 2.0, 1.0)), Error);
  // The focusing-A triple is not a defocusing family.
  EXPECT_EQ(classify(Triple(1.0, 2.0, 1.0)).verdict, Verdict::Inadmissible);
}

TEST(GenerateFamily, Examples) {
  const auto a = generate_family(Family::A, {2.0, -12.0});
  EXPECT_NEAR(std::abs(a.c - cplx(0, 4.0)), 0.0, 1e-14);

  FamilyParams pe;
  pe.K = 1.0;
  pe.omega = -3.0;
  pe.c2 = -0.5;
  const auto e = generate_family(Family::E, pe);
  EXPECT_NEAR(e.alpha, 2.0, 1e-14);
  EXPECT_NEAR(std::abs(e.c - cplx(0, -0.5)), 0.0, 1e-14);
  const auto ce = classify(e);
  EXPECT_EQ(ce.verdict, Verdict::FamilyE);
  EXPECT_TRUE(ce.boundary_flags.count("E_omega_edge"));
  EXPECT_TRUE(ce.boundary_flags.count("E_c1_zero_edge"));

  const auto d = generate_family(Family::D, {2.0, -4.0});
  EXPECT_EQ(d.c, cplx(0.0, 0.0));
  EXPECT_EQ(classify(d).verdict, Verdict::FamilyD);
}

TEST(GenerateFamily, OutOfWindow) {
  try {
    generate_family(Family::A, {1.0, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfWindow);
    EXPECT_NE(std::string(e.what()).find("omega < 0"), std::string::npos);
  }
  FamilyParams p;
  p.K = 1.0;
  p.omega = -5.0;
  p.c2 = 1.0;  // bound is 1/2
  EXPECT_THROW(generate_family(Family::B, p), Error);
}

TEST(GenerateFamily, ACJoint) {
  // At omega = -3 alpha^2 the A formula gives c = i alpha^2 = i alpha sqrt(-2 alpha^2 - omega).
  for (double a : {0.5, 1.0, 2.5}) {
    const auto t = generate_family(Family::A, {a, -3.0 * a * a});
    const cplx c_formula(0.0, a * std::sqrt(-2.0 * a * a + 3.0 * a * a));
    EXPECT_LE(std::abs(t.c - c_formula), 1e-12 * std::max(1.0, a * a));
    EXPECT_TRUE(classify(t).boundary_flags.count("A_C_joint"));
  }
}

TEST(GenerateFamily, BUpperEdgeFlag) {
  FamilyParams p;
  p.K = 1.0;
  p.omega = -8.0;
  p.c2 = 2.0;
  const auto t = generate_family(Family::B, p);
  const auto c = classify(t);
  EXPECT_EQ(c.verdict, Verdict::FamilyB);
  EXPECT_TRUE(c.boundary_flags.count("B_c1_zero_edge"));
}

TEST(GenerateFamily, RoundTripAndPatterns) {
  std::mt19937_64 rng(11);
  for (Family f : {Family::A, Family::B, Family::C, Family::D, Family::E}) {
    for (int i = 0; i < 300; ++i) {
      const auto p = nlsadm::testing::random_family_params(rng, f);
      const auto t = generate_family(f, p, (i % 2) ? 1 : -1);
      const auto c = classify(t, {1e-9, true});
      ASSERT_EQ(c.verdict, verdict_of(f)) << to_string(f) << " alpha=" << t.alpha << " omega=" << t.omega
                                          << " c=" << t.c;
      EXPECT_TRUE(c.cross_check_consistent);
      const auto rs = solve_quartic(build_omega_squared(t));
      EXPECT_EQ(rs.pattern(), expected_pattern(f, t)) << to_string(f) << " " << rs.pattern_string();
    }
  }
}

TEST(ClassifyDefocusing, OffManifoldInadmissible) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto t = nlsadm::testing::random_triple(rng);
    EXPECT_EQ(classify(t).verdict, Verdict::Inadmissible) << t.alpha << " " << t.omega << " " << t.c;
  }
}

TEST(ClassifyFocusing, Membership) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ua(0.2, 3.0), u(0.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double a = ua(rng);
    const double wa = a * a + u(rng);
    EXPECT_EQ(classify(Triple(a, wa, a * std::sqrt(wa - a * a), Mode::Focusing)).verdict, Verdict::FocusingA);
    const double wb = -6.0 * a * a - u(rng);
    EXPECT_EQ(classify(Triple(a, wb, cplx(0, a * std::sqrt(-wb + 2 * a * a)), Mode::Focusing)).verdict,
              Verdict::FocusingB);
  }
}
