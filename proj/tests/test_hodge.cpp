#include <gtest/gtest.h>

#include "hermlab/catalogue.hpp"
#include "hermlab/hodge.hpp"
#include "hermlab/sampling.hpp"
#include "hermlab/verify.hpp"

using namespace hermlab;

namespace {

struct Bump {
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::exp;
    T r2 = z[0] * zb[0];
    return exp(T(-1.0) * r2) * (z[0] * T(cplx(0.3, 0.1)) + T(1.0));
  }
};

struct Decaying {
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    T r2 = z[0] * zb[0];
    return T(1.0) / (T(1.0) + r2) + (z[0] + zb[0]) * T(0.2) / (T(1.0) + r2 * r2);
  }
};

// lattice-periodic test functions on the Iwasawa chart (period 1, no z3)
struct IwF {
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::cos;
    using std::sin;
    T x2 = (z[1] + zb[1]) * T(0.5);
    T y1 = (z[0] - zb[0]) * T(cplx(0, -0.5));
    return T(1.0) + sin(x2 * T(2 * M_PI)) * T(0.3) + cos(y1 * T(2 * M_PI)) * T(0.2);
  }
};

struct IwPhi {
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::cos;
    using std::sin;
    T x1 = (z[0] + zb[0]) * T(0.5);
    T y2 = (z[1] - zb[1]) * T(cplx(0, -0.5));
    return sin(x1 * T(2 * M_PI)) * T(cplx(0.5, 0.2)) + cos(y2 * T(2 * M_PI)) + T(0.7);
  }
};

}  // namespace

TEST(Forms, WedgeSignsAndNilpotency) {
  int n = 2;
  Form a = Form::dz(n, 0), b = Form::dzbar(n, 1);
  EXPECT_TRUE(wedge(a, a).c.empty() || wedge(a, a).max_abs_value() == 0);
  Form ab = wedge(a, b), ba = wedge(b, a);
  EXPECT_EQ(ab.value(1u, 2u), -ba.value(1u, 2u));
  EXPECT_EQ(std::abs(ab.value(1u, 2u)), 1.0);
}

TEST(Forms, DifferentialsSquareToZero) {
  // f = z1^2 zbar2 + z1 zbar1 z2 at order 3
  const JetSpace& s = JetSpace::get(4, 3);
  cplx z1(0.3, 0.1), z2(-0.2, 0.5);
  Jet Z1 = Jet::variable(s, 0, z1), Z2 = Jet::variable(s, 1, z2);
  Jet B1 = Jet::variable(s, 2, std::conj(z1)), B2 = Jet::variable(s, 3, std::conj(z2));
  Form f = Form::scalar(2, Z1 * Z1 * B2 + Z1 * B1 * Z2);
  EXPECT_EQ(del(del(f)).max_abs_value(), 0.0);
  EXPECT_EQ(dbar(dbar(f)).max_abs_value(), 0.0);
  Form anti = del(dbar(f)) + dbar(del(f));
  EXPECT_LT(anti.max_abs_value(), 1e-15);
  EXPECT_EQ(del(dbar(f)).bidegree(), std::make_pair(1, 1));
}

TEST(Forms, TraceOfOmegaIsDimension) {
  auto fs = fubini_study(3);
  auto g = local_metric(fs.metric, ChartPoint{cplx(0.1, 0.2), cplx(0.3, -0.4), cplx(0.5, 0)}, 0);
  Form l = lambda(omega_form(g), g.hu);
  EXPECT_NEAR(std::abs(l.value(0u, 0u) - cplx(3)), 0, 1e-13);
}

TEST(Hodge, EigenfunctionsSatisfyLaplacian) {
  for (auto e : {fubini_study(1), fubini_study(3), flat_torus(2), iwasawa()}) {
    double lam = *e.eigenvalue;
    for (auto& p : halton_points(e.sample_box, 10, 2)) {
      double u = (*e.eigenfunction)(p).real();
      EXPECT_NEAR(scalar_laplacian(e.metric, *e.eigenfunction, p), lam * u, 1e-11 * std::max(1.0, lam)) << e.name;
    }
  }
}

TEST(Hodge, DbarStarOmegaRoutesAgree) {
  for (auto e : {iwasawa(), nonbalanced_example(), fubini_study(2)})
    for (auto& p : halton_points(e.sample_box, 5, 3)) {
      auto g = local_metric(e.metric, p, 1);
      EXPECT_LT((dbar_star_omega(g) - dbar_star_omega_forms(g)).cwiseAbs().maxCoeff(), 1e-13) << e.name;
    }
}

TEST(Hodge, BalancedResidualSeparatesExamples) {
  for (auto e : {fubini_study(2), fubini_study(3), iwasawa(), flat_torus(3)}) {
    auto r = balanced_residual(e.metric, halton_points(e.sample_box, 10, 4));
    EXPECT_LT(r.value, 1e-8) << e.name;
  }
  auto nb = nonbalanced_example();
  auto r = balanced_residual(nb.metric, halton_points(nb.sample_box, 10, 4));
  EXPECT_GT(r.dbar_star_omega, 0.1);
  EXPECT_GT(r.d_omega_power, 0.1);
  EXPECT_EQ(r.points, 10);
}

TEST(Hodge, WeakAdjointOnFubiniStudy) {
  auto fs = fubini_study(1);
  auto phi = component_field(1, 0u, 1u, Bump{});
  auto F = make_scalar(1, "F", Decaying{});
  auto q = fs.quadrature(64);
  auto r = weak_adjoint_check(q, fs.metric, phi, F);
  EXPECT_LT(r.residual, 1e-10);
  EXPECT_GT(std::abs(r.lhs), 1e-2);  // not vacuous
  auto r2 = weak_ddbar_pairing_check(q, fs.metric, *fs.eigenfunction, phi);
  EXPECT_LT(r2.residual, 1e-10);
  EXPECT_GT(std::abs(r2.lhs), 1e-2);
  EXPECT_THROW(weak_adjoint_check(q, fs.metric, component_field(1, 1u, 0u, Bump{}), F), ConfigError);
}

TEST(Hodge, TorsionAdjointOnIwasawa) {
  auto iw = iwasawa();
  auto q = iw.quadrature(8);
  std::mt19937_64 rng(12);
  double lhs = 0;
  for (int k = 0; k < 3; ++k) {
    auto f = detail::random_function(iw, rng);
    auto phi = detail::random_form(iw, rng, true), psi = detail::random_form(iw, rng, false);
    auto w = weak_torsion_adjoint_check(q, iw.metric, *iw.eigenfunction, f, phi, psi);
    for (auto& r : w) {
      EXPECT_LT(r.residual, 1e-10);
      lhs = std::max(lhs, std::abs(r.lhs));
    }
    EXPECT_LT(weak_adjoint_check(q, iw.metric, phi, f).residual, 1e-10);
  }
  EXPECT_GT(lhs, 1e-2);  // not vacuous
  // the hand-made periodic fields integrate exactly as well
  auto phi = component_field(3, 0u, 1u, IwPhi{}) + component_field(3, 0u, 2u, IwF{});
  EXPECT_LT(weak_adjoint_check(q, iw.metric, phi, make_scalar(3, "f", IwF{})).residual, 1e-10);
  EXPECT_THROW(component_field(3, 0u, 1u, IwF{}) + component_field(3, 1u, 0u, IwF{}), ConfigError);
}

TEST(Hodge, TorsionPairingPointwise) {
  // u depends on z3 so the torsion terms are exercised
  auto iw = iwasawa();
  auto u = make_scalar(3, "probe", [](const auto& z, const auto& zb) {
    using T = std::decay_t<decltype(z[0])>;
    using std::cos;
    using std::sin;
    T x1 = (z[0] + zb[0]) * T(0.5);
    T y3 = (z[2] - zb[2]) * T(cplx(0, -0.5));
    T x3 = (z[2] + zb[2]) * T(0.5);
    return cos(x1 * T(2 * M_PI)) + sin(y3 * T(2 * M_PI)) * T(0.5) + x3 * x1 * T(0.3);
  });
  double lhs = 0;
  for (auto& p : halton_points(iw.sample_box, 8, 6)) {
    auto r = torsion_pairing_at(local_metric(iw.metric, p, 1), u.jet(p, 2));
    for (auto& [l, rr] : r) {
      EXPECT_LT(std::abs(l - rr), 1e-12 * std::max(1.0, std::abs(l)));
      lhs = std::max(lhs, std::abs(l));
    }
  }
  EXPECT_GT(lhs, 1e-2);
}

TEST(Hodge, TauVanishesForKahler) {
  auto fs = fubini_study(2);
  auto phi = component_field(2, 0u, 1u, [](const auto& z, const auto&) {
    using T = std::decay_t<decltype(z[0])>;
    return T(1.0) + z[1];
  });
  Form t = tau_forms(fs.metric, ChartPoint{cplx(0.2, 0.1), cplx(0.3, -0.3)}, phi);
  EXPECT_LT(t.max_abs_value(), 1e-14);
  Form ti = tau_forms(iwasawa().metric, ChartPoint::origin(3), component_field(3, 0u, 1u, [](const auto& z, const auto&) {
                        using T = std::decay_t<decltype(z[0])>;
                        return T(1.0);
                      }));
  EXPECT_GT(ti.max_abs_value(), 0.1);
}
