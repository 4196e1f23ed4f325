#pragma once

// Form-level operators and integrated (weak) identities.  All adjoint claims
// are checked by pairing against test forms under a quadrature rule; no
// discrete codifferential is ever assembled.

#include <functional>
#include <numeric>

#include "hermlab/connections.hpp"
#include "hermlab/forms.hpp"
#include "hermlab/parallel.hpp"

namespace hermlab {

// A form on the chart; `at(p, k)` returns coefficients as jets of order k.
struct FormField {
  int n = 0;
  int p = 0, q = 0;
  std::string label;
  std::function<Form(const ChartPoint&, int)> at;

  Form operator()(const ChartPoint& x, int order = 0) const { return at(x, order); }
};

inline FormField form_from_scalar(const ScalarField& f) {
  return {f.n, 0, 0, f.label, [f](const ChartPoint& x, int k) { return Form::scalar(f.n, f.jet(x, k)); }};
}

// g(z, zbar) dz^I ^ dzbar^J
template <class G>
FormField component_field(int n, unsigned I, unsigned J, G g, std::string label = "component") {
  FormField f;
  f.n = n;
  f.p = std::popcount(I);
  f.q = std::popcount(J);
  f.label = std::move(label);
  f.at = [n, I, J, g](const ChartPoint& x, int k) {
    auto [z, zb] = coordinate_jets(x, k);
    Form r(n);
    r.add(I, J, g(z, zb));
    return r;
  };
  return f;
}

inline FormField operator+(const FormField& a, const FormField& b) {
  if (a.p != b.p || a.q != b.q) throw ConfigError("adding forms of different bidegree");
  return {a.n, a.p, a.q, a.label + "+" + b.label,
          [a, b](const ChartPoint& x, int k) { return a.at(x, k) + b.at(x, k); }};
}

inline FormField del(const FormField& a) {
  return {a.n, a.p + 1, a.q, "del(" + a.label + ")", [a](const ChartPoint& x, int k) { return del(a.at(x, k + 1)); }};
}

inline FormField dbar(const FormField& a) {
  return {a.n, a.p, a.q + 1, "dbar(" + a.label + ")",
          [a](const ChartPoint& x, int k) { return dbar(a.at(x, k + 1)); }};
}

inline FormField zero_form(int n, int p, int q) {
  return {n, p, q, "zero", [n](const ChartPoint&, int) { return Form(n); }};
}

// Lambda f at p (values)
inline Form lambda_trace(const MetricField& m, const ChartPoint& x, const FormField& f,
                         DerivRoute route = DerivRoute::automatic) {
  if (f.p < 1 || f.q < 1) throw ConfigError("lambda_trace needs bidegree at least (1,1)");
  LocalMetric g = local_metric(m, x, 0, route);
  return lambda(f.at(x, 0), g.hu);
}

// dbar^* omega = i Lambda(del omega), by the coefficient formula
// component_k = i h^{i jbar}(d_k h_{i jbar} - d_i h_{k jbar})
inline VecC dbar_star_omega(const LocalMetric& g) {
  int n = g.n;
  MatC hu = g.inverse_value();
  VecC r = VecC::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(k) += cplx(0, 1) * hu(i, j) * (g.h(i, j).d(k).val() - g.h(k, j).d(i).val());
  return r;
}

inline VecC dbar_star_omega(const MetricField& m, const ChartPoint& x, DerivRoute route = DerivRoute::automatic) {
  return dbar_star_omega(local_metric(m, x, 1, route));
}

// the same object through the form algebra: i Lambda(del omega)
inline VecC dbar_star_omega_forms(const LocalMetric& g) {
  Form f = lambda(del(omega_form(g)), g.hu);
  VecC r = VecC::Zero(g.n);
  for (auto& [k, v] : f.c) r(std::countr_zero(k.first)) += cplx(0, 1) * v.val();
  return r;
}

struct BalancedResidual {
  double dbar_star_omega = 0;  // max |dbar^* omega| coefficient
  double d_omega_power = 0;    // max |d(omega^{n-1})| coefficient
  double value = 0;            // the larger of the two
  int points = 0;
};

namespace detail {

// d(omega^{n-1}) at x by finite differences of its coefficient functions
inline double d_omega_power_fd(const MetricField& m, const ChartPoint& x) {
  int n = m.n;
  if (n == 1) return 0;
  std::vector<FormKey> keys;
  auto f = [&](const std::vector<double>& xr) {
    ChartPoint y = ChartPoint::from_real(xr);
    MatC h = m.eval_raw(y);
    Form w(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w.add(1u << i, 1u << j, Jet(cplx(0, 1) * h(i, j)));
    Form wp = power(w, n - 1);
    if (keys.empty())
      for (auto& [k, v] : wp.c) keys.push_back(k);
    std::vector<cplx> out;
    for (auto& k : keys) out.push_back(wp.value(k.first, k.second));
    return out;
  };
  auto h = fd_steps(x, m.fd_step);
  check_stencil(m.domain, x, h, 1);
  auto js = fd_wirtinger_jets(f, x.real_coords(), h, 1);
  Form wp(n);
  for (size_t a = 0; a < keys.size(); ++a) wp.add(keys[a].first, keys[a].second, js[a]);
  return (del(wp) + dbar(wp)).max_abs_value();
}

}  // namespace detail

// Both balanced obstructions, reported separately: the trace formula for
// dbar^* omega and a finite-difference d(omega^{n-1}).
inline BalancedResidual balanced_residual(const MetricField& m, const std::vector<ChartPoint>& pts,
                                          DerivRoute route = DerivRoute::automatic) {
  std::vector<std::array<double, 2>> v(pts.size());
  parallel_for(pts.size(), [&](size_t k) {
    VecC d = dbar_star_omega(m, pts[k], route);
    v[k] = {d.cwiseAbs().maxCoeff(), detail::d_omega_power_fd(m, pts[k])};
  });
  BalancedResidual r;
  for (auto& a : v) {
    r.dbar_star_omega = std::max(r.dbar_star_omega, a[0]);
    r.d_omega_power = std::max(r.d_omega_power, a[1]);
  }
  r.value = std::max(r.dbar_star_omega, r.d_omega_power);
  r.points = int(pts.size());
  return r;
}

inline BalancedResidual balanced_residual(const MetricField& m, const Quadrature& q,
                                          DerivRoute route = DerivRoute::automatic) {
  return balanced_residual(m, q.nodes, route);
}

// tr_omega(i ddbar u) = h^{i jbar} u_{i jbar}
inline double trace_ddbar(const LocalMetric& g, const Jet& u) {
  cplx s = 0;
  MatC hu = g.inverse_value();
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) s += hu(i, j) * u.d(i).d(g.bar(j)).val();
  return s.real();
}

// Delta_d u = -2 h^{i jbar} u_{i jbar} (balanced metrics)
inline double scalar_laplacian(const MetricField& m, const ScalarField& u, const ChartPoint& x,
                               DerivRoute route = DerivRoute::automatic) {
  LocalMetric g = local_metric(m, x, 0, route);
  return -2.0 * trace_ddbar(g, u.jet(x, 2, route));
}

// tau f = [Lambda, del omega] f at x (values)
inline Form tau_forms(const MetricField& m, const ChartPoint& x, const FormField& f,
                      DerivRoute route = DerivRoute::automatic) {
  LocalMetric g = local_metric(m, x, 1, route);
  Form dw = del(omega_form(g));
  return tau(f.at(x, 0), dw, g.hu);
}

// tau-bar f = [Lambda, dbar omega] f
inline Form tau_bar(const Form& f, const Form& dbar_omega, const JetMat& hu) {
  return lambda(wedge(dbar_omega, f), hu) - wedge(dbar_omega, lambda(f, hu));
}

// Pairwise (tree) sum; fixed association order for reproducibility.
inline cplx pairwise_sum(const std::vector<cplx>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    cplx s = 0;
    for (size_t k = lo; k < hi; ++k) s += v[k];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

// Integrates m integrands at once: fn(p) returns m values.
inline std::vector<cplx> integrate_many(const Quadrature& q, int m,
                                        const std::function<std::vector<cplx>(const ChartPoint&)>& fn) {
  size_t N = q.nodes.size();
  std::vector<std::vector<cplx>> vals(m, std::vector<cplx>(N));
  parallel_for(N, [&](size_t k) {
    auto v = fn(q.nodes[k]);
    if (int(v.size()) != m) throw Error("integrand returned the wrong number of values");
    for (int a = 0; a < m; ++a) vals[a][k] = v[a] * q.weights[k];
  });
  std::vector<cplx> out(m);
  for (int a = 0; a < m; ++a) out[a] = N ? pairwise_sum(vals[a], 0, N) : cplx(0);
  return out;
}

inline cplx integrate(const Quadrature& q, const std::function<cplx(const ChartPoint&)>& fn) {
  return integrate_many(q, 1, [&](const ChartPoint& p) { return std::vector<cplx>{fn(p)}; })[0];
}

// (a, b) = sum_nodes <a, b> w
inline cplx inner_product(const Quadrature& q, const MetricField& m, const FormField& a, const FormField& b) {
  if (a.p != b.p || a.q != b.q) throw ConfigError("inner product of forms with different bidegree");
  return integrate(q, [&](const ChartPoint& x) {
    LocalMetric g = local_metric(m, x, 0);
    return pointwise_inner(a.at(x, 0), b.at(x, 0), g.inverse_value());
  });
}

struct WeakResidual {
  cplx lhs = 0, rhs = 0;
  double residual = 0;  // |lhs - rhs| / (1 + |rhs|)
};

inline WeakResidual make_weak(cplx l, cplx r) { return {l, r, std::abs(l - r) / (1 + std::abs(r))}; }

// (-i Lambda del phi, F) = (phi, dbar F) for a (0,1) test form phi
inline WeakResidual weak_adjoint_check(const Quadrature& q, const MetricField& m, const FormField& phi,
                                       const ScalarField& F) {
  if (phi.p != 0 || phi.q != 1) throw ConfigError("weak_adjoint_check needs a (0,1) test form");
  auto v = integrate_many(q, 2, [&](const ChartPoint& x) {
    LocalMetric g = local_metric(m, x, 0);
    MatC hu = g.inverse_value();
    Form ph = phi.at(x, 1);
    Jet f = F.jet(x, 1);
    cplx l = cplx(0, -1) * lambda(del(ph), g.hu).value(0, 0) * std::conj(f.val());
    cplx r = pointwise_inner(ph, dbar(Form::scalar(m.n, f)), hu);
    return std::vector<cplx>{l, r};
  });
  return make_weak(v[0], v[1]);
}

// (del dbar u, del phi) = (del^* del u, -i Lambda del phi) with del^* del u = -h^{i jbar} u_{i jbar}
inline WeakResidual weak_ddbar_pairing_check(const Quadrature& q, const MetricField& m, const ScalarField& u,
                                       const FormField& phi) {
  if (phi.p != 0 || phi.q != 1) throw ConfigError("weak_ddbar_pairing_check needs a (0,1) test form");
  auto v = integrate_many(q, 2, [&](const ChartPoint& x) {
    LocalMetric g = local_metric(m, x, 0);
    MatC hu = g.inverse_value();
    Form ph = phi.at(x, 1);
    Jet uj = u.jet(x, 2);
    Form ddb = del(dbar(Form::scalar(m.n, uj)));
    Form dph = del(ph);
    cplx l = pointwise_inner(ddb, dph, hu);
    cplx dsd = -trace_ddbar(g, uj);
    cplx r = dsd * std::conj(cplx(0, -1) * lambda(dph, g.hu).value(0, 0));
    return std::vector<cplx>{l, r};
  });
  return make_weak(v[0], v[1]);
}

// First-order data of a real function u at a point, with respect to the
// Chern connection.
struct GradientData {
  int n = 0;
  VecC du, dbu;  // u_i, u_{ibar}
  VecC U;        // U^i = h^{i kbar} u_{kbar}
  VecC Ubar;     // Ubar^l = h^{b lbar} u_b
  MatC c;        // c_{ij} = u_{ij} - ^C Gamma^k_{ij} u_k
  MatC mixed;    // u_{i jbar}
  VecC nabla10;  // {^C nabla^{1,0} del u, del u}_i = c_{ij} U^j
  VecC nabla01;  // {^C nabla^{0,1} del u, del u}_{jbar} = u_{i jbar} U^i
  VecC ct;       // ^C T(U, ., Ubar)_j = U^i Ubar^l T_{ij lbar}
  double grad2 = 0;  // |del u|^2
  MatC h, hu;
};

inline GradientData gradient_data(const LocalMetric& g, const Jet& u) {
  int n = g.n;
  GradientData d;
  d.n = n;
  d.h = g.value();
  d.hu = g.inverse_value();
  d.du.resize(n);
  d.dbu.resize(n);
  for (int i = 0; i < n; ++i) {
    d.du(i) = u.d(i).val();
    d.dbu(i) = u.d(g.bar(i)).val();
  }
  d.U = VecC::Zero(n);
  d.Ubar = VecC::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      d.U(i) += d.hu(i, k) * d.dbu(k);
      d.Ubar(i) += d.hu(k, i) * d.du(k);
    }
  ConnectionCoefficients ch = chern_connection(g);
  d.c.resize(n, n);
  d.mixed.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx v = u.d(i).d(j).val();
      for (int k = 0; k < n; ++k) v -= ch.gamma_hol(k, i, j) * d.du(k);
      d.c(i, j) = v;
      d.mixed(i, j) = u.d(i).d(g.bar(j)).val();
    }
  d.nabla10 = d.c * d.U;
  d.nabla01 = d.mixed.transpose() * d.U;
  TorsionTensor T = torsion(ch, g);
  d.ct = VecC::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) d.ct(j) += d.U(i) * d.Ubar(l) * T.lowered(i, j, l);
  cplx s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += d.du(i) * std::conj(d.du(j)) * d.hu(i, j);
  d.grad2 = s.real();
  return d;
}

// <a, b> for (1,0)-forms: a_i conj(b_k) h^{i kbar}
inline cplx inner10(const VecC& a, const VecC& b, const MatC& hu) {
  cplx s = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int k = 0; k < b.size(); ++k) s += a(i) * std::conj(b(k)) * hu(i, k);
  return s;
}

// <a, b> for (0,1)-forms: a_jbar conj(b_lbar) h^{l jbar}
inline cplx inner01(const VecC& a, const VecC& b, const MatC& hu) {
  cplx s = 0;
  for (int j = 0; j < a.size(); ++j)
    for (int l = 0; l < b.size(); ++l) s += a(j) * std::conj(b(l)) * hu(l, j);
  return s;
}

inline Form form10(const VecC& a) {
  Form r(int(a.size()));
  for (int i = 0; i < a.size(); ++i) r.add(1u << i, 0u, Jet(a(i)));
  return r;
}
inline Form form01(const VecC& a) {
  Form r(int(a.size()));
  for (int i = 0; i < a.size(); ++i) r.add(0u, 1u << i, Jet(a(i)));
  return r;
}
inline VecC comps10(const Form& f, int n) {
  VecC r = VecC::Zero(n);
  for (auto& [k, v] : f.c) r(std::countr_zero(k.first)) += v.val();
  return r;
}
inline VecC comps01(const Form& f, int n) {
  VecC r = VecC::Zero(n);
  for (auto& [k, v] : f.c) r(std::countr_zero(k.second)) += v.val();
  return r;
}

// del u ^ dbar u
inline Form du_wedge_dbu(const GradientData& d) {
  return wedge(form10(d.du), form01(d.dbu));
}

struct TorsionPairing {
  double max_pointwise = 0;  // max |lhs - rhs| over nodes
  double max_lhs = 0;        // max |lhs|, so a vacuous check is visible
  WeakResidual integrated;
};

// Pairing identities for a (0,1) test form phi and a (1,0) test form psi:
//  (f du^dbu, tau phi + del phi)  = (f (Lap u) dbu - f conj{nabla10} - <du, df> dbu, phi)
//  (f du^dbu, taubar psi + dbar psi) = (-f (Lap u) du + f nabla10 + <df, du> du, psi)
// with Lap u = -h^{i jbar} u_{i jbar} (balanced metrics).  Returns both.
inline std::array<WeakResidual, 2> weak_torsion_adjoint_check(const Quadrature& q, const MetricField& m,
                                                              const ScalarField& u, const ScalarField& f,
                                                              const FormField& phi, const FormField& psi) {
  if (phi.p != 0 || phi.q != 1 || psi.p != 1 || psi.q != 0)
    throw ConfigError("need a (0,1) and a (1,0) test form");
  int n = m.n;
  auto v = integrate_many(q, 4, [&](const ChartPoint& x) {
    LocalMetric g = local_metric(m, x, 1);
    Jet uj = u.jet(x, 2);
    Jet fj = f.jet(x, 1);
    GradientData d = gradient_data(g, uj);
    cplx fv = fj.val();
    VecC df(n);
    for (int i = 0; i < n; ++i) df(i) = fj.d(i).val();
    cplx lap = -trace_ddbar(g, uj);
    Form A = Jet(fv) * du_wedge_dbu(d);
    Form w = omega_form(g);
    Form dw = del(w), dbw = dbar(w);
    Form ph = phi.at(x, 1), ps = psi.at(x, 1);
    Form ph0 = phi.at(x, 0), ps0 = psi.at(x, 0);
    cplx l1 = pointwise_inner(A, tau(ph0, dw, g.hu) + del(ph), d.hu);
    VecC r1 = fv * lap * d.dbu - fv * d.nabla10.conjugate() - inner10(d.du, df, d.hu) * d.dbu;
    cplx rr1 = inner01(r1, comps01(ph0, n), d.hu);
    cplx l2 = pointwise_inner(A, tau_bar(ps0, dbw, g.hu) + dbar(ps), d.hu);
    VecC r2 = -fv * lap * d.du + fv * d.nabla10 + inner10(df, d.du, d.hu) * d.du;
    cplx rr2 = inner10(r2, comps10(ps0, n), d.hu);
    return std::vector<cplx>{l1, rr1, l2, rr2};
  });
  return {make_weak(v[0], v[1]), make_weak(v[2], v[3])};
}

// Pointwise torsion pairings for u itself:
//  -<du^dbu, tau nabla01>    = <<du, i dbar^*omega> dbu + conj(CT), nabla01>
//  -<du^dbu, taubar nabla10> = <<dbu, i del^*omega> du - CT, nabla10>
// returned as (lhs, rhs) pairs at x
inline std::array<std::pair<cplx, cplx>, 2> torsion_pairing_at(const LocalMetric& g, const Jet& u) {
  int n = g.n;
  GradientData d = gradient_data(g, u);
  Form w = omega_form(g);
  Form dw = del(w), dbw = dbar(w);
  Form A = du_wedge_dbu(d);
  VecC dso = dbar_star_omega(g);
  Form psi1 = form01(d.nabla01), psi2 = form10(d.nabla10);
  cplx l1 = -pointwise_inner(A, tau(psi1, dw, g.hu), d.hu);
  cplx c1 = inner10(d.du, cplx(0, 1) * dso, d.hu);
  cplx r1 = inner01(c1 * d.dbu + d.ct.conjugate(), d.nabla01, d.hu);
  cplx l2 = -pointwise_inner(A, tau_bar(psi2, dbw, g.hu), d.hu);
  VecC dstar = dso.conjugate();  // del^* omega = conj(dbar^* omega), a (0,1)-form
  cplx c2 = inner01(d.dbu, cplx(0, 1) * dstar, d.hu);
  cplx r2 = inner10(c2 * d.du - d.ct, d.nabla10, d.hu);
  (void)n;
  return {std::pair{l1, r1}, std::pair{l2, r2}};
}

inline std::array<TorsionPairing, 2> torsion_pairing_check(const Quadrature& q, const MetricField& m,
                                                           const ScalarField& u) {
  size_t N = q.nodes.size();
  std::vector<std::array<cplx, 4>> vals(N);
  parallel_for(N, [&](size_t k) {
    const ChartPoint& x = q.nodes[k];
    auto r = torsion_pairing_at(local_metric(m, x, 1), u.jet(x, 2));
    vals[k] = {r[0].first, r[0].second, r[1].first, r[1].second};
  });
  std::array<TorsionPairing, 2> out;
  for (int s = 0; s < 2; ++s) {
    std::vector<cplx> L(N), R(N);
    for (size_t k = 0; k < N; ++k) {
      L[k] = vals[k][2 * s] * q.weights[k];
      R[k] = vals[k][2 * s + 1] * q.weights[k];
      out[s].max_pointwise = std::max(out[s].max_pointwise, std::abs(vals[k][2 * s] - vals[k][2 * s + 1]));
      out[s].max_lhs = std::max(out[s].max_lhs, std::abs(vals[k][2 * s]));
    }
    out[s].integrated = make_weak(N ? pairwise_sum(L, 0, N) : 0, N ? pairwise_sum(R, 0, N) : 0);
  }
  return out;
}

}  // namespace hermlab
