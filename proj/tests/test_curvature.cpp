#include <gtest/gtest.h>

#include "hermlab/catalogue.hpp"
#include "hermlab/curvature.hpp"
#include "hermlab/sampling.hpp"

using namespace hermlab;

namespace {

std::vector<ChartPoint> pts(const GeometryCatalogueEntry& e, int k, std::uint64_t seed = 1) {
  return halton_points(e.sample_box, k, seed);
}

VecC dir(std::initializer_list<cplx> c) {
  VecC w(int(c.size()));
  int i = 0;
  for (auto x : c) w(i++) = x;
  return w;
}

}  // namespace

TEST(Curvature, FubiniStudyGoldenValues) {
  // Ric(omega_FS) = (n+1) omega_FS and HSC = 2
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    auto fs = fubini_study(n);
    for (auto& p : pts(fs, 8)) {
      auto b = curvature_bundle(fs.metric, p, DerivRoute::analytic);
      EXPECT_LT(max_abs(MatC(b.theta_ric1 - double(n + 1) * b.h)), 1e-12);
      for (auto& r : b.ric_sb) EXPECT_LT(max_abs(MatC(r - double(n + 1) * b.h)), 1e-12);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(hsc_sb(b, detail::random_direction(n, rng)), 2.0, 1e-12);
    }
  }
}

TEST(Curvature, FubiniStudyCurvatureTensor) {
  // Theta_{i jbar k lbar} = h_{i jbar} h_{k lbar} + h_{i lbar} h_{k jbar}
  auto fs = fubini_study(2);
  auto b = curvature_bundle(fs.metric, ChartPoint{cplx(0.4, -0.1), cplx(0.2, 0.3)});
  double worst = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          worst = std::max(worst, std::abs(b.theta(i, j, k, l) - (b.h(i, j) * b.h(k, l) + b.h(i, l) * b.h(k, j))));
  EXPECT_LT(worst, 1e-13);
  EXPECT_LT(max_abs(b.r_sb - b.theta), 1e-13);
}

TEST(Curvature, FlatToriVanish) {
  for (int n = 1; n <= 3; ++n) {
    auto t = flat_torus(n);
    for (auto& p : pts(t, 5)) {
      auto b = curvature_bundle(t.metric, p);
      EXPECT_LE(max_abs(b.theta), 1e-10);
      EXPECT_LE(max_abs(b.r_sb), 1e-10);
      for (auto& r : b.ric_sb) EXPECT_LE(max_abs(r), 1e-10);
      EXPECT_LE(max_abs(b.t_circ_tbar), 1e-10);
    }
  }
}

TEST(Curvature, ChernRicciRoutesAgree) {
  // i ddbar log det h against the trace of the Chern curvature
  for (auto e : {fubini_study(2), iwasawa(), nonbalanced_example()})
    for (auto& p : pts(e, 6)) {
      auto b = curvature_bundle(e.metric, p);
      EXPECT_LT(max_abs(MatC(b.theta_ric1 - b.theta_ric1_trace)), 1e-12) << e.name;
    }
}

TEST(Curvature, IwasawaSbRoutesAndRicciRelations) {
  auto iw = iwasawa();
  for (auto& p : pts(iw, 20, 4)) {
    auto b = curvature_bundle(iw.metric, p);
    EXPECT_LT(max_abs(b.r_sb - b.r_sb_relation), 1e-12);
    MatC L = b.lambda_ddbar_omega;
    EXPECT_LT(max_abs(MatC(b.ric_sb[1] - (b.theta_ric1 + L - b.t_circ_tbar))), 1e-12);
    EXPECT_LT(max_abs(MatC(b.ric_sb[2] - (b.theta_ric1 - L))), 1e-12);
    EXPECT_LT(max_abs(MatC(b.ric_sb[3] - (b.theta_ric1 - L))), 1e-12);
  }
}

TEST(Curvature, IwasawaRiccisDifferFromKahlerCase) {
  auto iw = iwasawa();
  auto b = curvature_bundle(iw.metric, ChartPoint::origin(3));
  // torsion makes the four traces distinct, unlike the Kahler case
  EXPECT_GT(max_abs(MatC(b.ric_sb[0] - b.ric_sb[1])), 0.1);
  EXPECT_GT(max_abs(b.t_circ_tbar), 0.1);
}

TEST(Curvature, HolomorphicRicciTorsionIdentity) {
  auto iw = iwasawa();
  std::mt19937_64 rng(8);
  for (auto& p : pts(iw, 10, 2)) {
    auto b = curvature_bundle(iw.metric, p);
    for (int k = 0; k < 3; ++k) EXPECT_LT(hol_ricci_torsion_identity(b, detail::random_direction(3, rng)), 1e-12);
  }
}

TEST(Curvature, RealAndComplexHscAgree) {
  auto iw = iwasawa();
  auto g = local_metric(iw.metric, ChartPoint{cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.1, 0.7)}, 2);
  auto w = dir({cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.2, 0.9)});
  auto br = hsc_bridge(g, w);
  EXPECT_LT(br.residual, 1e-12);
  EXPECT_LT(br.metric_residual, 1e-12);
  EXPECT_NEAR(br.real_hsc, br.complex_hsc, 1e-12);
  EXPECT_NEAR(br.complex_hsc, hsc_sb(curvature_bundle(g), w), 1e-12);
}

TEST(Curvature, ScalingBehaviour) {
  // Ricci forms are scale invariant; HSC and holomorphic Ricci scale by 1/c
  auto fs = fubini_study(1);
  auto s4 = scaled(fs, 4.0);
  ChartPoint p{cplx(0.3, 0.6)};
  auto b = curvature_bundle(fs.metric, p), b4 = curvature_bundle(s4.metric, p);
  EXPECT_LT(max_abs(MatC(b.theta_ric1 - b4.theta_ric1)), 1e-13);
  VecC w = dir({cplx(1, 0)});
  EXPECT_NEAR(hsc_sb(b4, w), 0.5, 1e-13);
  double hw = h_norm2(b4.h, w);
  EXPECT_NEAR(holomorphic_ricci(b4, w) / hw, 0.5, 1e-13);
  EXPECT_THROW(scaled(fs, 0), ConfigError);
}

TEST(Curvature, ExtremaOnFubiniStudy) {
  auto fs = fubini_study(2);
  auto x = curvature_extrema(fs.metric, pts(fs, 6), 5);
  EXPECT_NEAR(x.min_hol_ricci, 3.0, 1e-10);
  EXPECT_NEAR(x.min_hsc, 2.0, 1e-10);
  EXPECT_GE(x.min_hol_ricci_sampled, x.min_hol_ricci - 1e-12);
  EXPECT_EQ(x.sample_count, 6);
  EXPECT_THROW(curvature_extrema(fs.metric, {}, 1), ConfigError);
}

TEST(Curvature, ZeroDirectionIsRejected) {
  auto b = curvature_bundle(fubini_study(1).metric, ChartPoint{cplx(0, 0)});
  VecC z = VecC::Zero(1);
  EXPECT_THROW(hsc_sb(b, z), ConfigError);
  EXPECT_THROW(holomorphic_ricci(b, z), ConfigError);
}

TEST(Curvature, FiniteDifferenceRouteAgrees) {
  auto iw = iwasawa();
  ChartPoint p{cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.1, 0.7)};
  auto a = curvature_bundle(iw.metric, p, DerivRoute::analytic);
  auto f = curvature_bundle(iw.metric, p, DerivRoute::finite_difference);
  EXPECT_LT(max_abs(a.r_sb - f.r_sb), 1e-6);
  EXPECT_LT(max_abs(MatC(a.theta_ric1 - f.theta_ric1)), 1e-6);
}
