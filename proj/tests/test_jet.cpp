#include <gtest/gtest.h>

#include "hermlab/jet.hpp"

using namespace hermlab;

namespace {

// one real variable at x0, order K
Jet x_at(double x0, int K) { return Jet::variable(JetSpace::get(1, K), 0, x0); }

cplx d1(const Jet& f, int k) { return f.deriv({k}); }

}  // namespace

TEST(Jet, VariableAndConstantCoefficients) {
  Jet x = x_at(0.7, 3);
  EXPECT_EQ(x.val(), cplx(0.7));
  EXPECT_EQ(d1(x, 1), cplx(1));
  EXPECT_EQ(d1(x, 2), cplx(0));
  Jet c(2.5);
  EXPECT_TRUE(c.is_constant_type());
  EXPECT_EQ((c * x).deriv({1}), cplx(2.5));
}

TEST(Jet, ProductAndQuotientRules) {
  double x0 = 0.4;
  Jet x = x_at(x0, 4);
  Jet f = x * x * x;  // x^3
  EXPECT_NEAR(std::abs(d1(f, 1) - 3 * x0 * x0), 0, 1e-14);
  EXPECT_NEAR(std::abs(d1(f, 2) - 6 * x0), 0, 1e-14);
  EXPECT_NEAR(std::abs(d1(f, 3) - 6.0), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(f, 4)), 0, 1e-13);
  Jet q = Jet(1.0) / (Jet(1.0) + x);  // 1/(1+x): k-th derivative (-1)^k k! / (1+x)^{k+1}
  double fact = 1;
  for (int k = 0; k <= 4; ++k) {
    if (k) fact *= k;
    double want = (k % 2 ? -1 : 1) * fact / std::pow(1 + x0, k + 1);
    EXPECT_NEAR(std::abs(d1(q, k) - want), 0, 1e-12) << k;
  }
}

TEST(Jet, ElementaryFunctionsMatchClosedForms) {
  double x0 = 0.3;
  Jet x = x_at(x0, 3);
  Jet e = exp(x), l = log(Jet(2.0) + x), s = sin(x), c = cos(x), r = sqrt(Jet(1.0) + x), a = asin(x);
  EXPECT_NEAR(std::abs(d1(e, 3) - std::exp(x0)), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(l, 2) + 1 / ((2 + x0) * (2 + x0))), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(s, 3) + std::cos(x0)), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(c, 2) + std::cos(x0)), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(r, 2) + 0.25 * std::pow(1 + x0, -1.5)), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(a, 1) - 1 / std::sqrt(1 - x0 * x0)), 0, 1e-13);
  EXPECT_NEAR(std::abs(d1(a, 2) - x0 * std::pow(1 - x0 * x0, -1.5)), 0, 1e-13);
  Jet p = pow(Jet(1.0) + x, 2.5);
  EXPECT_NEAR(std::abs(d1(p, 2) - 2.5 * 1.5 * std::pow(1 + x0, 0.5)), 0, 1e-12);
}

TEST(Jet, ExpOfLogIsIdentity) {
  Jet x = x_at(1.3, 5);
  Jet y = exp(log(x));
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(std::abs(d1(y, k) - d1(x, k)), 0, 1e-12) << k;
}

TEST(Jet, MixedPartials) {
  // f = x^2 y^3 at (x0, y0)
  const JetSpace& s = JetSpace::get(2, 3);
  double x0 = 0.5, y0 = -1.2;
  Jet x = Jet::variable(s, 0, x0), y = Jet::variable(s, 1, y0);
  Jet f = x * x * y * y * y;
  EXPECT_NEAR(std::abs(f.deriv({1, 1}) - 6 * x0 * y0 * y0), 0, 1e-13);
  EXPECT_NEAR(std::abs(f.deriv({2, 1}) - 6 * y0 * y0), 0, 1e-13);
  EXPECT_NEAR(std::abs(f.deriv({1, 2}) - 12 * x0 * y0), 0, 1e-13);
  // d() lowers the order and commutes
  EXPECT_NEAR(std::abs(f.d(0).d(1).val() - f.d(1).d(0).val()), 0, 1e-14);
  EXPECT_EQ(f.d(0).order(), 2);
}

TEST(Jet, WirtingerConjugationSwapsVariables) {
  // n = 1: variables z, zbar.  f = z^2 zbar  ->  conj(f) = zbar^2 z
  const JetSpace& s = JetSpace::get(2, 3);
  cplx z0(0.3, 0.4);
  Jet z = Jet::variable(s, 0, z0), zb = Jet::variable(s, 1, std::conj(z0));
  Jet f = z * z * zb;
  Jet g = conj_fn(f);
  Jet want = zb * zb * z;
  for (size_t m = 0; m < g.coeffs().size(); ++m) EXPECT_NEAR(std::abs(g.coeffs()[m] - want.coeffs()[m]), 0, 1e-14);
}

TEST(Jet, TruncationKeepsLowOrders) {
  Jet x = x_at(0.2, 4);
  Jet f = exp(x);
  Jet t = f.truncated(2);
  EXPECT_EQ(t.order(), 2);
  EXPECT_NEAR(std::abs(t.deriv({2}) - f.deriv({2})), 0, 0);
  EXPECT_EQ(t.coef({3}), cplx(0));
}
