#include <gtest/gtest.h>

#include "hermlab/catalogue.hpp"
#include "hermlab/connections.hpp"

using namespace hermlab;

namespace {

ChartPoint iw_point() { return ChartPoint{cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.1, 0.7)}; }

}  // namespace

TEST(Connections, FubiniStudyChernSymbol) {
  // Gamma = d log h = -2 zbar / (1 + |z|^2)
  auto fs = fubini_study(1);
  for (cplx z : {cplx(0, 0), cplx(0.5, -0.2), cplx(-1.3, 2.0)}) {
    auto c = chern_connection(fs.metric, ChartPoint{z});
    cplx want = -2.0 * std::conj(z) / (1 + std::norm(z));
    EXPECT_NEAR(std::abs(c.gamma_hol(0, 0, 0) - want), 0, 1e-14);
    EXPECT_EQ(c.gamma_mixed(0, 0, 0), cplx(0));
  }
}

TEST(Connections, KahlerMetricsHaveNoTorsionAndSbEqualsChern) {
  auto fs = fubini_study(3);
  ChartPoint p{cplx(0.2, 0.1), cplx(-0.4, 0.3), cplx(0.6, -0.5)};
  auto g = local_metric(fs.metric, p, 1);
  auto ch = chern_connection(g), sb = sb_connection(g);
  EXPECT_LT(max_abs(torsion(ch, g).t), 1e-14);
  EXPECT_LT(max_abs(sb.gamma_hol - ch.gamma_hol), 1e-14);
  EXPECT_LT(max_abs(sb.gamma_mixed), 1e-14);
}

TEST(Connections, IwasawaTorsionIsNonzeroAndSkew) {
  auto iw = iwasawa();
  auto g = local_metric(iw.metric, iw_point(), 1);
  auto T = torsion(chern_connection(g), g);
  EXPECT_GT(max_abs(T.t), 0.1);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(T.t(k, i, j) + T.t(k, j, i)), 0, 1e-14);
  // the SB connection differs from Chern exactly when there is torsion
  auto sb = sb_connection(g);
  EXPECT_GT(max_abs(sb.gamma_mixed), 0.1);
}

TEST(Connections, SbConnectionIsMetric) {
  // d h_{i jbar} = Gamma^k_{ai} h_{k jbar} + conj(Gamma^l_{abar j}) h_{i lbar} for a metric connection
  auto iw = iwasawa();
  auto g = local_metric(iw.metric, iw_point(), 1);
  auto sb = sb_connection(g);
  int n = 3;
  MatC H = g.value();
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx dh = g.h(i, j).d(a).val();
        cplx rhs = 0;
        for (int k = 0; k < n; ++k)
          rhs += sb.gamma_hol(k, a, i) * H(k, j) + std::conj(sb.gamma_mixed(k, a, j)) * H(i, k);
        worst = std::max(worst, std::abs(dh - rhs));
      }
  EXPECT_LT(worst, 1e-13);
}

TEST(Connections, FiniteDifferenceRouteAgrees) {
  auto iw = iwasawa();
  auto a = sb_connection(iw.metric, iw_point(), DerivRoute::analytic);
  auto f = sb_connection(iw.metric, iw_point(), DerivRoute::finite_difference);
  EXPECT_LT(max_abs(a.gamma_hol - f.gamma_hol), 1e-8);
  EXPECT_LT(max_abs(a.gamma_mixed - f.gamma_mixed), 1e-8);
}

TEST(Connections, FlatHessianIsCoordinateHessian) {
  // u = cos x1 with x1 = (z + zbar)/2:  u_{zz} = u_{z zbar} = -cos(x1)/4
  auto t = flat_torus(2);
  double x = 0.7;
  ChartPoint p{cplx(x, 0.3), cplx(1.1, -0.2)};
  auto hp = hessians(t.metric, *t.eigenfunction, p);
  EXPECT_NEAR(std::abs(hp.t(0, 0) + std::cos(x) / 4), 0, 1e-14);
  EXPECT_NEAR(std::abs(hp.s(0, 0) + std::cos(x) / 4), 0, 1e-14);
  EXPECT_NEAR(std::abs(hp.t(1, 1)), 0, 1e-14);
  EXPECT_NEAR(std::abs(hp.s(0, 1)), 0, 1e-14);
}

TEST(Connections, InverseMetricJetIsInverse) {
  auto fs = fubini_study(2);
  auto g = local_metric(fs.metric, ChartPoint{cplx(0.3, 0.2), cplx(-0.1, 0.5)}, 2);
  JetMat prod = g.hu * detail::transpose(g.h);
  // sum_j hu(i,j) h(k,j) = delta_ik to all orders
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(std::abs(prod(i, k).val() - cplx(i == k)), 0, 1e-14);
      EXPECT_NEAR(std::abs(prod(i, k).d(0).val()), 0, 1e-14);
      EXPECT_NEAR(std::abs(prod(i, k).d(0).d(2).val()), 0, 1e-13);
    }
}
