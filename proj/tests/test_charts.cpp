#include <gtest/gtest.h>

#include "hermlab/catalogue.hpp"
#include "hermlab/quadrature.hpp"
#include "hermlab/sampling.hpp"

using namespace hermlab;

namespace {

double max_diff(const MatC& a, const MatC& b) { return max_abs(MatC(a - b)); }

struct Radial {
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::exp;
    return exp(T(-1.0) * z[0] * zb[0]) * (z[1] + zb[1]);
  }
};

}  // namespace

TEST(Charts, PointRealCoordinatesRoundTrip) {
  ChartPoint p{cplx(0.1, -0.2), cplx(3, 4)};
  auto x = p.real_coords();
  ASSERT_EQ(x.size(), 4u);
  EXPECT_EQ(x[1], -0.2);
  EXPECT_EQ(ChartPoint::from_real(x).z, p.z);
}

TEST(Charts, DomainContainsAndShrinks) {
  Domain d = Domain::cube(2, -1, 1);
  EXPECT_TRUE(d.contains(ChartPoint{cplx(0.9, 0), cplx(0, -0.9)}));
  EXPECT_FALSE(d.contains(ChartPoint{cplx(1.1, 0), cplx(0, 0)}));
  EXPECT_FALSE(d.contains(ChartPoint{cplx(0, 0)}));  // wrong dimension
  EXPECT_FALSE(d.contains(ChartPoint{cplx(NAN, 0), cplx(0, 0)}));
  Domain s = d.shrunk(0.1);
  EXPECT_DOUBLE_EQ(s.box[0][0], -0.8);
  EXPECT_FALSE(s.contains(ChartPoint{cplx(0.9, 0), cplx(0, 0)}));
}

TEST(Charts, FiniteDifferenceMatchesAnalyticMetricDerivatives) {
  auto fs = fubini_study(2);
  ChartPoint p{cplx(0.3, -0.2), cplx(0.1, 0.4)};
  for (int order = 1; order <= 3; ++order) {
    auto a = metric_derivatives(fs.metric, p, order, DerivRoute::analytic);
    auto f = metric_derivatives(fs.metric, p, order, DerivRoute::finite_difference, 0.01);
    std::vector<int> vars(order);
    double worst = 0;
    for (int c = 0; c < (1 << (2 * order)); ++c) {
      for (int k = 0; k < order; ++k) vars[k] = (c >> (2 * k)) & 3;
      worst = std::max(worst, max_diff(a.get(vars), f.get(vars)));
    }
    EXPECT_LT(worst, order == 3 ? 1e-5 : 1e-6) << "order " << order;
  }
}

TEST(Charts, WirtingerDerivativeOfFubiniStudyEntry) {
  // h = (1+|z|^2)^{-2}: dh/dz = -2 zbar (1+|z|^2)^{-3}
  auto fs = fubini_study(1);
  cplx z(0.4, 0.3);
  double r = 1 + std::norm(z);
  auto d = metric_derivatives(fs.metric, ChartPoint{z}, 1);
  EXPECT_NEAR(std::abs(d.get({0})(0, 0) - (-2.0 * std::conj(z) / (r * r * r))), 0, 1e-15);
  EXPECT_NEAR(std::abs(d.get({1})(0, 0) - (-2.0 * z / (r * r * r))), 0, 1e-15);
  // the stacked tensor puts derivative slots first
  auto t = d.stack(1);
  EXPECT_EQ(t.rank(), 3);
  EXPECT_EQ(t(1, 0, 0), d.get({1})(0, 0));
}

TEST(Charts, StencilLeavingTheChartIsADomainError) {
  auto nb = nonbalanced_example();
  ChartPoint edge{cplx(2.9999, 0), cplx(0, 0)};
  EXPECT_THROW(nb.metric.jet(edge, 2, DerivRoute::finite_difference), DomainError);
  // periodic charts wrap
  auto t = flat_torus(1);
  EXPECT_NO_THROW(t.metric.jet(ChartPoint{cplx(0, 0)}, 2, DerivRoute::finite_difference));
  EXPECT_THROW(nb.metric.jet(ChartPoint{cplx(0, 0)}, 1), DomainError);  // wrong dimension
  EXPECT_THROW(metric_derivatives(nb.metric, edge, 4), ConfigError);
}

TEST(Charts, ScalarFieldRoutesAgree) {
  auto u = make_scalar(2, "radial", Radial{});
  ChartPoint p{cplx(0.2, 0.1), cplx(-0.3, 0.5)};
  Jet a = u.jet(p, 2);
  Jet f = u.jet(p, 2, DerivRoute::finite_difference, 0.01);
  for (auto e : std::vector<std::vector<int>>{{1, 0, 0, 0}, {0, 0, 1, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 1, 0, 0}})
    EXPECT_NEAR(std::abs(a.deriv(e) - f.deriv(e)), 0, 1e-7);
  ScalarField plain;
  plain.n = 1;
  plain.eval = [](const ChartPoint& q) { return q.z[0]; };
  EXPECT_THROW(plain.jet(ChartPoint{cplx(0.1, 0)}, 1, DerivRoute::analytic), UnsupportedError);
}

TEST(Charts, HaltonPointsAreDeterministicAndInside) {
  Domain box = Domain::cube(2, -1.5, 1.5);
  auto a = halton_points(box, 64, 5), b = halton_points(box, 64, 5), c = halton_points(box, 64, 6);
  ASSERT_EQ(a.size(), 64u);
  for (size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].z, b[k].z);
    EXPECT_TRUE(box.contains(a[k]));
  }
  EXPECT_NE(a[0].z, c[0].z);
}

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  std::vector<double> x, w;
  gauss_legendre(6, x, w);
  ASSERT_EQ(x.size(), 6u);
  for (int k = 0; k <= 11; ++k) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
    double want = k % 2 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, want, 1e-14) << k;
  }
}

TEST(Quadrature, CatalogueVolumes) {
  // omega^n/n! volume: CP^1 of curvature 2 has area 2 pi
  auto fs = fubini_study(1);
  EXPECT_NEAR(fs.quadrature(64).volume(), 2 * M_PI, 1e-12);
  // h = delta/2 is the Euclidean metric on the (2 pi)-periodic box
  auto t1 = flat_torus(1);
  EXPECT_NEAR(t1.quadrature(8).volume(), std::pow(2 * M_PI, 2), 1e-10);
  auto t3 = flat_torus(3);
  EXPECT_NEAR(t3.quadrature(4).volume() / std::pow(2 * M_PI, 6), 1.0, 1e-13);
  EXPECT_NEAR(iwasawa().quadrature(4).volume(), 8.0, 1e-13);
}

TEST(Quadrature, FirstEigenfunctionHasMeanZero) {
  auto fs = fubini_study(1);
  auto q = fs.quadrature(64);
  double s = 0, s2 = 0;
  for (size_t k = 0; k < q.nodes.size(); ++k) {
    double u = (*fs.eigenfunction)(q.nodes[k]).real();
    s += q.weights[k] * u;
    s2 += q.weights[k] * u * u;
  }
  EXPECT_NEAR(s, 0, 1e-12);
  // u = cos(theta) on the sphere of area 2 pi: int u^2 = 2 pi / 3
  EXPECT_NEAR(s2, 2 * M_PI / 3, 1e-12);
}
