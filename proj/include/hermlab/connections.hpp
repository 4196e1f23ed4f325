#pragma once

// Chern and Strominger-Bismut connection coefficients, torsion, Hessians.
//
// Everything is computed on jets of h and h^{-1} at a point, so derivatives of
// the coefficients (needed by the curvature) come for free.  Variables of the
// jets are (dz^1..dz^n, dzbar^1..dzbar^n); `bar(i)` is the index of dzbar^i.

#include <vector>

#include "hermlab/charts.hpp"
#include "hermlab/tensorcore.hpp"

namespace hermlab {

// Jets of h_{i jbar} and h^{i jbar} at a point.
struct LocalMetric {
  int n = 0;
  int order = 0;
  ChartPoint p;
  JetMat h;   // h(i,j) = h_{i jbar}
  JetMat hu;  // hu(i,j) = h^{i jbar}, so sum_j hu(i,j) h(k,j) = delta_ik
  DerivRoute route = DerivRoute::automatic;

  int bar(int i) const { return n + i; }
  MatC value() const { return h.value(); }
  MatC inverse_value() const { return hu.value(); }
};

namespace detail {

// H^{-1} as a jet by the Neumann series around the base value; the series
// terminates because the perturbation has no constant term.
inline JetMat jet_inverse(const JetMat& H, int order) {
  int n = H.n;
  MatC R0 = hermitian_inverse(HermitianMatrix(H.value(), 1e-9)).entries();
  JetMat A = JetMat::constant(R0);
  JetMat dH(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dH(i, j) = H(i, j) - Jet(H(i, j).val());
  // -R0 dH
  JetMat M = JetMat::constant(MatC(-R0)) * dH;
  JetMat term = A, sum = A;
  for (int k = 1; k <= order; ++k) {
    term = M * term;
    sum = sum + term;
  }
  return sum;
}

inline JetMat transpose(const JetMat& a) {
  JetMat r(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) r(i, j) = a(j, i);
  return r;
}

}  // namespace detail

inline LocalMetric local_metric(const MetricField& m, const ChartPoint& p, int order,
                                DerivRoute route = DerivRoute::automatic, double step = 0) {
  if (p.n() != m.n) throw DomainError("point dimension does not match metric");
  if (!m.domain.contains(p) && !m.domain.periodic) throw DomainError("point outside the chart domain");
  LocalMetric g;
  g.n = m.n;
  g.order = order;
  g.p = p;
  g.route = route;
  g.h = m.jet(p, order, route, step);
  // validates Hermitian and positive definite at the base point
  HermitianMatrix H0(g.h.value(), route == DerivRoute::finite_difference ? 1e-8 : 1e-10);
  hermitian_inverse(H0);
  g.hu = detail::transpose(detail::jet_inverse(g.h, order));
  return g;
}

enum class ConnectionKind { chern, strominger_bismut };

// Coefficients at a point, plus their jets for later differentiation.
struct ConnectionCoefficients {
  ConnectionKind kind = ConnectionKind::chern;
  int n = 0;
  ComplexTensor gamma_hol;    // [k][i][j] = Gamma^k_{ij}
  ComplexTensor gamma_mixed;  // [k][i][j] = Gamma^k_{ibar j}
  std::vector<Jet> hol_jets;    // same layout, flattened
  std::vector<Jet> mixed_jets;

  const Jet& hol(int k, int i, int j) const { return hol_jets[(k * n + i) * n + j]; }
  const Jet& mixed(int k, int i, int j) const { return mixed_jets[(k * n + i) * n + j]; }
};

namespace detail {

inline ComplexTensor values3(int n, const std::vector<Jet>& js, std::vector<IndexKind> kinds) {
  ComplexTensor t({n, n, n}, std::move(kinds));
  for (size_t a = 0; a < js.size(); ++a) t.data()[a] = js[a].val();
  return t;
}

}  // namespace detail

// ^C Gamma^k_{ij} = h^{k lbar} d_i h_{j lbar}
inline ConnectionCoefficients chern_connection(const LocalMetric& g) {
  int n = g.n;
  ConnectionCoefficients c;
  c.kind = ConnectionKind::chern;
  c.n = n;
  c.hol_jets.resize(n * n * n);
  c.mixed_jets.assign(n * n * n, Jet(0.0));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet s(0.0);
        for (int l = 0; l < n; ++l) s += g.hu(k, l) * g.h(j, l).d(i);
        c.hol_jets[(k * n + i) * n + j] = s;
      }
  using K = IndexKind;
  c.gamma_hol = detail::values3(n, c.hol_jets, {K::hol_upper, K::hol_lower, K::hol_lower});
  c.gamma_mixed = detail::values3(n, c.mixed_jets, {K::hol_upper, K::antihol_lower, K::hol_lower});
  return c;
}

// ^SB Gamma^k_{ij} = ^C Gamma^k_{ji};
// ^SB Gamma^k_{ibar j} = h^{k lbar}(d_{ibar} h_{j lbar} - d_{lbar} h_{j ibar})
inline ConnectionCoefficients sb_connection(const LocalMetric& g) {
  int n = g.n;
  ConnectionCoefficients ch = chern_connection(g);
  ConnectionCoefficients c;
  c.kind = ConnectionKind::strominger_bismut;
  c.n = n;
  c.hol_jets.resize(n * n * n);
  c.mixed_jets.resize(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        c.hol_jets[(k * n + i) * n + j] = ch.hol(k, j, i);
        Jet s(0.0);
        for (int l = 0; l < n; ++l) s += g.hu(k, l) * (g.h(j, l).d(g.bar(i)) - g.h(j, i).d(g.bar(l)));
        c.mixed_jets[(k * n + i) * n + j] = s;
      }
  using K = IndexKind;
  c.gamma_hol = detail::values3(n, c.hol_jets, {K::hol_upper, K::hol_lower, K::hol_lower});
  c.gamma_mixed = detail::values3(n, c.mixed_jets, {K::hol_upper, K::antihol_lower, K::hol_lower});
  return c;
}

inline ConnectionCoefficients chern_connection(const MetricField& m, const ChartPoint& p,
                                               DerivRoute route = DerivRoute::automatic) {
  return chern_connection(local_metric(m, p, 1, route));
}
inline ConnectionCoefficients sb_connection(const MetricField& m, const ChartPoint& p,
                                            DerivRoute route = DerivRoute::automatic) {
  return sb_connection(local_metric(m, p, 1, route));
}

struct TorsionTensor {
  ComplexTensor t;        // T^k_{ij}
  ComplexTensor lowered;  // T_{ij lbar} = h_{k lbar} T^k_{ij}
};

inline TorsionTensor torsion(const ConnectionCoefficients& c, const LocalMetric& g) {
  int n = c.n;
  using K = IndexKind;
  TorsionTensor r;
  r.t = ComplexTensor({n, n, n}, {K::hol_upper, K::hol_lower, K::hol_lower});
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        cplx v = c.gamma_hol(k, i, j) - c.gamma_hol(k, j, i);
        r.t(k, i, j) = v;
        r.t(k, j, i) = -v;
      }
  auto H = ComplexTensor::from_matrix(g.value(), K::hol_lower, K::antihol_lower);
  // contract T^k_{ij} with h_{k lbar}: result order (i, j, lbar)
  r.lowered = contract(r.t, H, {{0, 0}});
  return r;
}

// Pointwise derivatives of a scalar field as a jet; u(v...) helpers.
struct ScalarJet {
  int n = 0;
  Jet u;
  cplx d(std::initializer_list<int> vars) const {
    std::vector<int> e(2 * n, 0);
    for (int v : vars) e[v] += 1;
    return u.deriv(e);
  }
};

struct HessianPair {
  ComplexTensor t;     // t_{ij}
  ComplexTensor s;     // s_{i jbar} = conj(s_{ibar j})
  ComplexTensor sbar;  // s_{jbar i}, stored [j][i]
};

// t_{ij} = u_{ij} - ^SB Gamma^k_{ij} u_k,  s_{jbar i} = u_{jbar i} - ^SB Gamma^k_{jbar i} u_k
inline HessianPair hessians(const ConnectionCoefficients& sb, const ScalarJet& u) {
  int n = sb.n;
  using K = IndexKind;
  HessianPair hp;
  hp.t = ComplexTensor({n, n}, {K::hol_lower, K::hol_lower});
  hp.sbar = ComplexTensor({n, n}, {K::antihol_lower, K::hol_lower});
  hp.s = ComplexTensor({n, n}, {K::hol_lower, K::antihol_lower});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx t = u.d({i, j}), s = u.d({n + i, j});
      for (int k = 0; k < n; ++k) {
        t -= sb.gamma_hol(k, i, j) * u.d({k});
        s -= sb.gamma_mixed(k, i, j) * u.d({k});
      }
      hp.t(i, j) = t;
      hp.sbar(i, j) = s;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hp.s(i, j) = std::conj(hp.sbar(i, j));
  return hp;
}

inline HessianPair hessians(const MetricField& m, const ScalarField& u, const ChartPoint& p,
                            DerivRoute route = DerivRoute::automatic) {
  auto g = local_metric(m, p, 1, route);
  return hessians(sb_connection(g), ScalarJet{m.n, u.jet(p, 2, route)});
}

}  // namespace hermlab
