#include "nlsadm/geometry.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace nlsadm;

namespace {

const Box kUnitBox{-3.0, 3.0, -3.0, 3.0};

double nearest_traced(const GammaCurve& g, cplx p) {
  double d = 1e300;
  for (const auto& line : g.polylines)
    for (cplx z : line) d = std::min(d, std::abs(z - p));
  return d;
}

}  // namespace

TEST(SignField, ClosedFormMatchesPolynomial) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (Mode m : {Mode::Defocusing, Mode::Focusing}) {
    for (int n = 0; n < 200; ++n) {
      const auto t = nlsadm::testing::random_triple(rng, m);
      const auto q = build_omega_squared(t);
      const cplx k(u(rng), u(rng));
      const cplx v = q(k);
      const double scale = q.derivative_scale(0, k);
      EXPECT_LE(std::abs(im_omega_squared(t, k.real(), k.imag()) - v.imag()), 1e-10 * scale);
      EXPECT_LE(std::abs(re_omega_squared(q, k.real(), k.imag()) - v.real()), 1e-10 * scale);
    }
  }
}

TEST(SignField, VanishesOnImaginaryAxisWhenC2Zero) {
  const Triple t(1.0, 4.0, std::sqrt(5.0));
  const auto f = compute_sign_field(t, kUnitBox, {65, 64});
  const int mid = 32;
  EXPECT_EQ(f.grid.x(mid), 0.0);
  for (int j = 0; j < 64; ++j) EXPECT_EQ(f.im_sign[f.grid.index(mid, j)], 0);
}

TEST(SignField, FamilyCRealZero) {
  const Triple t(std::sqrt(2.0), -8.0, cplx(0, 2.0 * std::sqrt(2.0)));
  EXPECT_EQ(im_omega_squared(t, 1.0, 0.0), 0.0);
  EXPECT_NEAR(detail::gamma_f(t, 1.0, 0.0), 0.0, 1e-14);
}

TEST(SignField, MirrorSymmetry) {
  std::mt19937_64 rng(22);
  for (int n = 0; n < 5; ++n) {
    const auto t = nlsadm::testing::random_triple(rng);
    const Triple tm(t.alpha, t.omega, std::conj(t.c));
    const Box w{-2.5, 3.5, -3.0, 2.0};
    const auto f = compute_sign_field(t, w, {100, 90});
    const auto g = compute_sign_field(tm, w.mirrored_x(), {100, 90});
    for (int j = 0; j < 90; ++j)
      for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(f.re_sign[f.grid.index(i, j)], g.re_sign[g.grid.index(99 - i, j)]);
        ASSERT_EQ(f.im_sign[f.grid.index(i, j)], -g.im_sign[g.grid.index(99 - i, j)]);
      }
  }
}

TEST(TraceGamma, RealIntersections) {
  const auto g = trace_gamma(Triple(1.0, -3.0, cplx(0, 1.0)), kUnitBox);
  ASSERT_EQ(g.real_intersections.size(), 2u);
  EXPECT_NEAR(g.real_intersections[0], -1.0, 1e-7);
  EXPECT_NEAR(g.real_intersections[1], 0.5, 1e-7);

  const auto m = trace_gamma(Triple(1.0, -3.0, cplx(0, -1.0)), kUnitBox);
  ASSERT_EQ(m.real_intersections.size(), 2u);
  EXPECT_NEAR(m.real_intersections[0], -0.5, 1e-7);
  EXPECT_NEAR(m.real_intersections[1], 1.0, 1e-7);

  const auto d = trace_gamma(Triple(1.0, 4.0, std::sqrt(5.0)), kUnitBox);
  ASSERT_EQ(d.real_intersections.size(), 1u);
  EXPECT_NEAR(d.real_intersections[0], 0.0, 1e-12);
}

TEST(TraceGamma, ParabolasAndAxisForC2Zero) {
  const Triple t(1.0, 4.0, std::sqrt(5.0));
  const auto g = trace_gamma(t, {-2.9, 3.1, -3.05, 2.95}, {300, 300});
  EXPECT_LT(nearest_traced(g, cplx(0, 1.0)), 0.03);
  EXPECT_LT(nearest_traced(g, cplx(0, -1.0)), 0.03);
  EXPECT_LT(nearest_traced(g, cplx(0, 2.5)), 0.03);
  EXPECT_LT(nearest_traced(g, cplx(2.0, std::sqrt(5.0))), 0.03);
  for (const auto& line : g.polylines)
    for (cplx z : line) {
      const bool on_axis = std::abs(z.real()) < 1e-9;
      const bool on_parabola = std::abs(z.imag() * z.imag() - z.real() * z.real() - 1.0) < 1e-6;
      EXPECT_TRUE(on_axis || on_parabola) << z;
    }
}

TEST(TraceGamma, PointsOnCurveAndAsymptotes) {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 10; ++n) {
    const auto t = nlsadm::testing::random_triple(rng);
    const Box w{-40.3, 39.7, -40.1, 39.9};
    const auto g = trace_gamma(t, w, {200, 200});
    ASSERT_FALSE(g.polylines.empty());
    for (const auto& line : g.polylines)
      for (cplx z : line) {
        ASSERT_LE(std::abs(detail::gamma_f(t, z.real(), z.imag())),
                  g.curve_tolerance * detail::gamma_scale(t, z.real(), z.imag()));
        if (std::abs(z) > 35.0) {
          const double x = std::abs(z.real()), y = std::abs(z.imag());
          const bool diag = std::abs(y / x - 1.0) < 1e-2;
          const bool vertical = x / std::abs(z) < 1e-2;
          EXPECT_TRUE(diag || vertical) << z;
        }
      }
  }
}

TEST(TraceGamma, EmptyWindow) {
  const auto g = trace_gamma(Triple(1.0, 4.0, std::sqrt(5.0)), {5.0, 6.0, 0.0, 1.0});
  EXPECT_TRUE(g.polylines.empty());
}

TEST(PartitionDomains, FourLabelsForGenericTriple) {
  const auto bo = BranchedOmega::from_triple(Triple(1.0, 0.0, 0.0));
  const auto p = partition_domains(bo, default_window(bo.cuts()), {200, 200});
  for (auto l : {DomainLabel::D1, DomainLabel::D2, DomainLabel::D3, DomainLabel::D4}) EXPECT_GT(p.count(l), 1000u);
  // Far from the origin the labels follow the quadrants.
  const auto& g = p.grid;
  EXPECT_EQ(p.label_at(190, 190), DomainLabel::D1);
  EXPECT_EQ(p.label_at(10, 190), DomainLabel::D2);
  EXPECT_EQ(p.label_at(10, 10), DomainLabel::D3);
  EXPECT_EQ(p.label_at(190, 10), DomainLabel::D4);
  // D1 cells: Im k > 0 and Im Omega > 0 at the centre.
  for (std::size_t n = 0; n < g.size(); n += 97)
    if (p.labels[n] == DomainLabel::D1) {
      const cplx k = g.center(static_cast<int>(n % g.nx), static_cast<int>(n / g.nx));
      EXPECT_GT(k.imag(), 0.0);
      EXPECT_GT(bo(k).imag(), 0.0);
    }
  EXPECT_GE(resample_labels(bo, p, 20000, 5).rate(), 0.999);
}

TEST(PartitionDomains, FamilyDStraightCutConnected) {
  const Triple t(1.0, 1.0, std::sqrt(2.0));
  const auto bo = BranchedOmega::from_triple(t);
  const auto p = partition_domains(bo, default_window(bo.cuts()), {200, 200});
  EXPECT_EQ(p.components(), 1u);
}

TEST(PartitionDomains, FamilyDLoopCutDisconnected) {
  const Triple t(1.0, 1.0, std::sqrt(2.0));
  const cplx z(0.0, 0.5);
  const auto bo = BranchedOmega::from_triple(t, CutStrategy::loop_around(z, 0.6));
  const auto p = partition_domains(bo, default_window(bo.cuts()), {200, 200});
  EXPECT_GE(p.components(), 2u);
  // Inside the loop the branch is -2k^2 - omega/2.
  for (double r : {0.1, 0.3, 0.5}) {
    for (double th : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}) {
      const cplx k = z + cplx(0, 0.6) + r * std::exp(I * th);
      const cplx want = -2.0 * k * k - t.omega / 2.0;
      EXPECT_LE(std::abs(bo(k) - want), 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
  EXPECT_GE(resample_labels(bo, p, 20000, 6).rate(), 0.999);
}

TEST(CutIntersection, Examples) {
  const auto b = cut_intersects_D1_closure(Triple(4.0, -8.0, cplx(std::sqrt(147.0), 1.0)), Family::B);
  EXPECT_EQ(b.top_point_sign, 1);
  EXPECT_FALSE(b.intersects);
  ASSERT_TRUE(b.left_of_K.has_value());
  EXPECT_TRUE(*b.left_of_K);

  FamilyParams pe;
  pe.K = 1.0;
  pe.omega = -3.5;
  pe.c2 = -0.2;
  const auto e = cut_intersects_D1_closure(generate_family(Family::E, pe), Family::E);
  EXPECT_EQ(e.top_point_sign, -1);
  EXPECT_TRUE(e.intersects);

  try {
    cut_intersects_D1_closure(Triple(2.0, -12.0, cplx(0, 4.0)), Family::A);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::DegenerateCut);
  }
}

TEST(K2Window, Examples) {
  FamilyParams pe;
  pe.K = 1.0;
  pe.omega = -3.5;
  pe.c2 = -0.2;
  const auto w = locate_K2_window(generate_family(Family::E, pe));
  ASSERT_TRUE(w.K3.has_value());
  EXPECT_NEAR(*w.K3, 1.0, 1e-10);
  EXPECT_TRUE(w.c2_over_2alpha_in_K2_0);

  const auto three = locate_K2_window(Triple(1.0, -3.0, cplx(0, 0.1)));
  ASSERT_TRUE(three.K1 && three.K2 && three.K3);
  EXPECT_LT(*three.K1, *three.K2);
  EXPECT_LT(*three.K2, *three.K3);

  const auto one = locate_K2_window(Triple(1.0, 2.0, 1.0));
  EXPECT_FALSE(one.K1.has_value());
}
