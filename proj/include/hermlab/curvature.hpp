#pragma once

// Chern curvature, Strominger-Bismut curvature by two routes, the four SB
// Ricci traces, T o Tbar, holomorphic Ricci and holomorphic sectional
// curvature, and their extrema over sample points.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <future>
#include <random>

#include "hermlab/connections.hpp"
#include "hermlab/forms.hpp"
#include "hermlab/parallel.hpp"

namespace hermlab {

using Tensor4 = ComplexTensor;

inline Tensor4 make_r4(int n) {
  using K = IndexKind;
  return Tensor4({n, n, n, n}, {K::hol_lower, K::antihol_lower, K::hol_lower, K::antihol_lower});
}

// Theta_{i jbar k lbar} = -d_i d_jbar h_{k lbar} + h^{p qbar} d_jbar h_{p lbar} d_i h_{k qbar}
inline Tensor4 chern_curvature(const LocalMetric& g) {
  int n = g.n;
  Tensor4 t = make_r4(n);
  MatC hu = g.inverse_value();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx v = -g.h(k, l).d(i).d(g.bar(j)).val();
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              v += hu(p, q) * g.h(p, l).d(g.bar(j)).val() * g.h(k, q).d(i).val();
          t(i, j, k, l) = v;
        }
  return t;
}

inline Tensor4 chern_curvature(const MetricField& m, const ChartPoint& p,
                               DerivRoute route = DerivRoute::automatic) {
  return chern_curvature(local_metric(m, p, 2, route));
}

namespace detail {

// log det of a Hermitian positive jet matrix by Gaussian elimination
inline Jet log_det(const JetMat& H) {
  int n = H.n;
  std::vector<Jet> a = H.a;
  Jet ld(0.0);
  for (int k = 0; k < n; ++k) {
    Jet piv = a[k * n + k];
    ld += log(piv);
    Jet inv = reciprocal(piv);
    for (int i = k + 1; i < n; ++i) {
      Jet f = a[i * n + k] * inv;
      for (int j = k + 1; j < n; ++j) a[i * n + j] = a[i * n + j] - f * a[k * n + j];
    }
  }
  return ld;
}

}  // namespace detail

// Theta^(1)_{i jbar} = -d_i d_jbar log det h
inline MatC first_chern_ricci(const LocalMetric& g) {
  int n = g.n;
  Jet ld = detail::log_det(g.h);
  MatC r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = -ld.d(i).d(g.bar(j)).val();
  return r;
}

inline MatC first_chern_ricci(const MetricField& m, const ChartPoint& p,
                              DerivRoute route = DerivRoute::automatic) {
  return first_chern_ricci(local_metric(m, p, 2, route));
}

// h^{k lbar} X_{i jbar k lbar} and friends
inline MatC trace34(const Tensor4& t, const MatC& hu) {
  int n = int(hu.rows());
  MatC r = MatC::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r(i, j) += hu(k, l) * t(i, j, k, l);
  return r;
}

// SB curvature from its own coefficients:
// R_{i jbar k}^p = -d_jbar G^p_{ik} + d_i G^p_{jbar k} + G^p_{is} G^s_{jbar k} - G^p_{jbar s} G^s_{ik}
inline Tensor4 sb_curvature_direct(const LocalMetric& g) {
  int n = g.n;
  ConnectionCoefficients sb = sb_connection(g);
  MatC H = g.value();
  Tensor4 t = make_r4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::vector<cplx> up(n);
        for (int p = 0; p < n; ++p) {
          cplx v = -sb.hol(p, i, k).d(g.bar(j)).val() + sb.mixed(p, j, k).d(i).val();
          for (int s = 0; s < n; ++s)
            v += sb.gamma_hol(p, i, s) * sb.gamma_mixed(s, j, k) - sb.gamma_mixed(p, j, s) * sb.gamma_hol(s, i, k);
          up[p] = v;
        }
        for (int l = 0; l < n; ++l) {
          cplx v = 0;
          for (int p = 0; p < n; ++p) v += up[p] * H(p, l);
          t(i, j, k, l) = v;
        }
      }
  return t;
}

// The curvature relation for balanced metrics:
// R_{i jbar k lbar} = Th_{i lbar k jbar} + Th_{k jbar i lbar} - Th_{i jbar k lbar}
//   + h_{p qbar} T^p_{ik} conj(T^q_{jl}) - h^{p qbar} h_{m lbar} h_{k sbar} T^m_{ip} conj(T^s_{jq})
inline Tensor4 sb_curvature_from_relation(const LocalMetric& g) {
  int n = g.n;
  Tensor4 th = chern_curvature(g);
  TorsionTensor T = torsion(chern_connection(g), g);
  MatC H = g.value(), hu = g.inverse_value();
  Tensor4 r = make_r4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx v = th(i, l, k, j) + th(k, j, i, l) - th(i, j, k, l);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) v += H(p, q) * T.t(p, i, k) * std::conj(T.t(q, j, l));
          // h_{m lbar} T^m_{ip} = T_{ip lbar};  conj(h_{s kbar} T^s_{jq}) = h_{k sbar} conj(T^s_{jq})
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              v -= hu(p, q) * T.lowered(i, p, l) * std::conj(T.lowered(j, q, k));
          r(i, j, k, l) = v;
        }
  return r;
}

// (T o Tbar)_{i jbar} = h^{p qbar} h^{s tbar} h_{k jbar} h_{i lbar} T^k_{sp} conj(T^l_{tq})
inline MatC t_circ_tbar(const LocalMetric& g) {
  int n = g.n;
  TorsionTensor T = torsion(chern_connection(g), g);
  MatC hu = g.inverse_value();
  MatC r = MatC::Zero(n, n);
  // h_{k jbar} T^k_{sp} = T_{sp jbar};  h_{i lbar} conj(T^l_{tq}) = conj(T_{tq ibar})
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t)
              r(i, j) += hu(p, q) * hu(s, t) * T.lowered(s, p, j) * std::conj(T.lowered(t, q, i));
  return r;
}

// Lambda(d dbar omega) as a (1,1) coefficient matrix
inline MatC lambda_ddbar_omega(const LocalMetric& g) {
  Form w = omega_form(g);
  Form ddw = del(dbar(w));
  return coefficients11(lambda(ddw, g.hu));
}

struct CurvatureBundle {
  ChartPoint point;
  int n = 0;
  Tensor4 theta;
  MatC theta_ric1;        // from log det
  MatC theta_ric1_trace;  // h^{k lbar} Theta_{i jbar k lbar}
  Tensor4 r_sb;           // direct route (normative)
  Tensor4 r_sb_relation;  // balanced relation route
  std::array<MatC, 4> ric_sb;
  MatC t_circ_tbar;
  MatC lambda_ddbar_omega;
  MatC h, hu;
};

inline CurvatureBundle curvature_bundle(const LocalMetric& g) {
  CurvatureBundle b;
  b.point = g.p;
  b.n = g.n;
  b.h = g.value();
  b.hu = g.inverse_value();
  b.theta = chern_curvature(g);
  b.theta_ric1 = first_chern_ricci(g);
  b.theta_ric1_trace = trace34(b.theta, b.hu);
  b.r_sb = sb_curvature_direct(g);
  b.r_sb_relation = sb_curvature_from_relation(g);
  int n = g.n;
  for (auto& m : b.ric_sb) m = MatC::Zero(n, n);
  const auto& R = b.r_sb;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx w = b.hu(k, l);
          b.ric_sb[0](i, j) += w * R(i, j, k, l);
          b.ric_sb[1](i, j) += w * R(k, l, i, j);
          b.ric_sb[2](i, j) += w * R(i, l, k, j);
          b.ric_sb[3](i, j) += w * R(k, j, i, l);
        }
  b.t_circ_tbar = t_circ_tbar(g);
  b.lambda_ddbar_omega = lambda_ddbar_omega(g);
  return b;
}

inline CurvatureBundle curvature_bundle(const MetricField& m, const ChartPoint& p,
                                        DerivRoute route = DerivRoute::automatic, double step = 0) {
  return curvature_bundle(local_metric(m, p, 2, route, step));
}

namespace detail {

inline void require_nonzero(const VecC& w) {
  if (w.size() == 0 || w.norm() == 0) throw ConfigError("direction must be nonzero");
}

inline double check_real(cplx v, double leak) {
  if (std::abs(v.imag()) > leak * std::max(1.0, std::abs(v.real())))
    throw Error("imaginary part leaked into a real curvature quantity");
  return v.real();
}

// beta_{i jbar} W^i conj(W^j)
inline cplx eval11(const MatC& b, const VecC& w) {
  cplx s = 0;
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) s += b(i, j) * w(i) * std::conj(w(j));
  return s;
}

}  // namespace detail

// h(W, Wbar) = h_{i jbar} W^i conj(W^j)
inline double h_norm2(const MatC& h, const VecC& w) { return detail::eval11(h, w).real(); }

// Ric^{SB,C}(W, Wbar) = R^{(4)}_{i jbar} W^i conj(W^j)
inline double holomorphic_ricci(const CurvatureBundle& b, const VecC& w, double leak = 1e-8) {
  detail::require_nonzero(w);
  return detail::check_real(detail::eval11(b.ric_sb[3], w), leak);
}

inline cplx r4_eval(const Tensor4& R, const VecC& a, const VecC& b, const VecC& c, const VecC& d) {
  int n = int(a.size());
  cplx s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) s += R(i, j, k, l) * a(i) * std::conj(b(j)) * c(k) * std::conj(d(l));
  return s;
}

// R(W, Wbar, W, Wbar) / h(W, Wbar)^2
inline double hsc_sb(const CurvatureBundle& b, const VecC& w, double leak = 1e-8) {
  detail::require_nonzero(w);
  double hw = h_norm2(b.h, w);
  return detail::check_real(r4_eval(b.r_sb, w, w, w, w), leak) / (hw * hw);
}

// residual of  Ric(W,Wbar) = (2 R1 - R2 - T o Tbar)(W, Wbar)
inline double hol_ricci_torsion_identity(const CurvatureBundle& b, const VecC& w) {
  detail::require_nonzero(w);
  cplx lhs = detail::eval11(b.ric_sb[3], w);
  cplx rhs = detail::eval11(MatC(2.0 * b.ric_sb[0] - b.ric_sb[1] - b.t_circ_tbar), w);
  return std::abs(lhs - rhs);
}

// Full complexified SB curvature R(A, B, C, D) over the basis
// (d/dz^1..d/dz^n, d/dzbar^1..d/dzbar^n).
inline ComplexTensor sb_full_curvature(const LocalMetric& g) {
  int n = g.n, N = 2 * n;
  ConnectionCoefficients sb = sb_connection(g);
  // G(A, k, p): nabla_{e_A} d_k = G^p d_p (the connection preserves T^{1,0})
  auto G = [&](int A, int k, int p) -> const Jet& {
    return A < n ? sb.hol(p, A, k) : sb.mixed(p, A - n, k);
  };
  auto Gv = [&](int A, int k, int p) { return G(A, k, p).val(); };
  // Rc(A,B,k,p): R(e_A, e_B) d_k = Rc^p d_p
  std::vector<cplx> Rc(N * N * n * n);
  auto rc = [&](int A, int B, int k, int p) -> cplx& { return Rc[((A * N + B) * n + k) * n + p]; };
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B)
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < n; ++p) {
          cplx v = G(B, k, p).d(A).val() - G(A, k, p).d(B).val();
          for (int s = 0; s < n; ++s) v += Gv(B, k, s) * Gv(A, s, p) - Gv(A, k, s) * Gv(B, s, p);
          rc(A, B, k, p) = v;
        }
  MatC H = g.value();
  using K = IndexKind;
  ComplexTensor R({N, N, N, N}, {K::hol_lower, K::hol_lower, K::hol_lower, K::hol_lower});
  auto barA = [&](int A) { return A < n ? A + n : A - n; };
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          // R(A,B,d_k,d_lbar) = Rc^p h_{p lbar}
          cplx v = 0;
          for (int p = 0; p < n; ++p) v += rc(A, B, k, p) * H(p, l);
          R(A, B, k, n + l) = v;
          // R(A,B,d_kbar,d_l) = conj(Rc(Abar,Bbar,k,p)) h_{l pbar}
          cplx w = 0;
          for (int p = 0; p < n; ++p) w += std::conj(rc(barA(A), barA(B), k, p)) * H(l, p);
          R(A, B, n + k, l) = w;
        }
  return R;
}

// R(X, Y, Z, W) for complex vectors in the 2n basis
inline cplx full_eval(const ComplexTensor& R, const VecC& x, const VecC& y, const VecC& z, const VecC& w) {
  int N = int(x.size());
  cplx s = 0;
  for (int a = 0; a < N; ++a) {
    if (x(a) == cplx(0)) continue;
    for (int b = 0; b < N; ++b) {
      if (y(b) == cplx(0)) continue;
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) s += R(a, b, c, d) * x(a) * y(b) * z(c) * w(d);
    }
  }
  return s;
}

struct HscBridge {
  double real_hsc;       // R(JX,X,X,JX)/g(X,X)^2
  double complex_hsc;    // R(U,Ubar,U,Ubar)/h(U,Ubar)^2
  double residual;       // |R(JX,X,X,JX) - 4 R(U,Ubar,U,Ubar)|
  double metric_residual;  // |g(X,X) - 2 h(U,Ubar)|
};

// X = U + Ubar and JX = i(U - Ubar) expanded through the complexified tensor
inline HscBridge hsc_bridge(const LocalMetric& g, const VecC& u) {
  int n = g.n;
  ComplexTensor R = sb_full_curvature(g);
  VecC X(2 * n), JX(2 * n);
  for (int i = 0; i < n; ++i) {
    X(i) = u(i);
    X(n + i) = std::conj(u(i));
    JX(i) = cplx(0, 1) * u(i);
    JX(n + i) = cplx(0, -1) * std::conj(u(i));
  }
  MatC H = g.value();
  // g(Z, W) complex bilinear: g(d_i, d_jbar) = h_{i jbar}
  cplx gxx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gxx += H(i, j) * X(i) * X(n + j) + H(j, i) * X(n + i) * X(j);
  cplx rr = full_eval(R, JX, X, X, JX);
  Tensor4 r4 = make_r4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r4(i, j, k, l) = R(i, n + j, k, n + l);
  cplx rc = r4_eval(r4, u, u, u, u);
  double hu2 = h_norm2(H, u);
  HscBridge out;
  out.real_hsc = rr.real() / (gxx.real() * gxx.real());
  out.complex_hsc = rc.real() / (hu2 * hu2);
  out.residual = std::abs(rr - 4.0 * rc);
  out.metric_residual = std::abs(gxx - 2.0 * hu2);
  return out;
}

struct SamplePointExtrema {
  double ric = INFINITY, hsc = INFINITY;
  ChartPoint ric_point, hsc_point;
  VecC ric_dir, hsc_dir;
  double ric_sampled = INFINITY;  // best value from the random/gradient search
};

struct CurvatureExtrema {
  double min_hol_ricci = INFINITY;
  double min_hsc = INFINITY;
  double min_hol_ricci_sampled = INFINITY;  // cross-check value from direction sampling
  int sample_count = 0;
  ChartPoint ricci_point, hsc_point;
  VecC ricci_direction, hsc_direction;
};

struct ExtremaOptions {
  int directions = 64;
  int refine_best = 4;
  int refine_steps = 20;
  double refine_step = 0.1;
  DerivRoute route = DerivRoute::automatic;
};

namespace detail {

inline VecC unit_direction(const MatC& h, VecC w) { return w / std::sqrt(h_norm2(h, w)); }

inline VecC random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VecC w(n);
  for (int i = 0; i < n; ++i) w(i) = cplx(nd(rng), nd(rng));
  return w;
}

// Riemannian gradient ascent/descent of a real function on the unit h-sphere
template <class F>
VecC refine_direction(const MatC& h, VecC w, F f, int steps, double step) {
  int n = int(w.size());
  double fw = f(w);
  for (int it = 0; it < steps; ++it) {
    // numerical gradient along real and imaginary axes
    VecC grad(n);
    const double e = 1e-6;
    for (int i = 0; i < n; ++i) {
      VecC a = w, b = w;
      a(i) += e;
      b(i) += cplx(0, e);
      grad(i) = cplx((f(unit_direction(h, a)) - fw) / e, (f(unit_direction(h, b)) - fw) / e);
    }
    VecC cand = unit_direction(h, w - step * grad);
    double fc = f(cand);
    if (fc < fw) {
      w = cand;
      fw = fc;
    } else {
      step *= 0.5;
    }
  }
  return w;
}

inline SamplePointExtrema point_extrema(const MetricField& m, const ChartPoint& p, std::uint64_t seed,
                                        const ExtremaOptions& opt) {
  int n = m.n;
  double leak = opt.route == DerivRoute::finite_difference || !m.analytic ? 1e-5 : 1e-8;
  CurvatureBundle b = curvature_bundle(m, p, opt.route);
  SamplePointExtrema e;
  // with x = conj(W), R^{(4)}_{i jbar} W^i conj(W^j) = x^* R4 x and h(W,Wbar) = x^* h x,
  // so the minimum over unit W is the lowest generalized eigenvalue
  MatC A = 0.5 * (b.ric_sb[3] + b.ric_sb[3].adjoint());
  Eigen::GeneralizedSelfAdjointEigenSolver<MatC> es(A, b.h);
  VecC v = es.eigenvectors().col(0);
  VecC wmin = unit_direction(b.h, v.conjugate());
  e.ric = holomorphic_ricci(b, wmin, leak);
  e.ric_dir = wmin;
  e.ric_point = p;

  std::mt19937_64 rng(seed);
  std::vector<std::pair<double, VecC>> ric_s, hsc_s;
  for (int k = 0; k < opt.directions; ++k) {
    VecC w = unit_direction(b.h, random_direction(n, rng));
    ric_s.push_back({holomorphic_ricci(b, w, leak), w});
    hsc_s.push_back({hsc_sb(b, w, leak), w});
  }
  auto by_value = [](const auto& x, const auto& y) { return x.first < y.first; };
  std::stable_sort(ric_s.begin(), ric_s.end(), by_value);
  std::stable_sort(hsc_s.begin(), hsc_s.end(), by_value);
  auto fr = [&](const VecC& w) { return holomorphic_ricci(b, w, leak); };
  auto fh = [&](const VecC& w) { return hsc_sb(b, w, leak); };
  int kb = std::min<int>(opt.refine_best, int(ric_s.size()));
  for (int k = 0; k < kb; ++k) {
    VecC w = refine_direction(b.h, ric_s[k].second, fr, opt.refine_steps, opt.refine_step);
    e.ric_sampled = std::min(e.ric_sampled, fr(w));
    VecC u = refine_direction(b.h, hsc_s[k].second, fh, opt.refine_steps, opt.refine_step);
    double hv = fh(u);
    if (hv < e.hsc) {
      e.hsc = hv;
      e.hsc_dir = u;
      e.hsc_point = p;
    }
  }
  for (auto& s : ric_s) e.ric_sampled = std::min(e.ric_sampled, s.first);
  if (!hsc_s.empty() && hsc_s[0].first < e.hsc) {
    e.hsc = hsc_s[0].first;
    e.hsc_dir = hsc_s[0].second;
    e.hsc_point = p;
  }
  return e;
}

}  // namespace detail

// Minima over sample points; points are processed in parallel and reduced in
// input order.
inline CurvatureExtrema curvature_extrema(const MetricField& m, const std::vector<ChartPoint>& pts,
                                          std::uint64_t seed, const ExtremaOptions& opt = {}) {
  if (pts.empty()) throw ConfigError("curvature_extrema needs at least one sample point");
  std::vector<SamplePointExtrema> res(pts.size());
  parallel_for(pts.size(), [&](size_t k) {
    res[k] = detail::point_extrema(m, pts[k], seed + 0x9E3779B97F4A7C15ull * (k + 1), opt);
  });
  CurvatureExtrema r;
  for (auto& e : res) {
    r.sample_count++;
    if (e.ric < r.min_hol_ricci) {
      r.min_hol_ricci = e.ric;
      r.ricci_point = e.ric_point;
      r.ricci_direction = e.ric_dir;
    }
    r.min_hol_ricci_sampled = std::min(r.min_hol_ricci_sampled, e.ric_sampled);
    if (e.hsc < r.min_hsc) {
      r.min_hsc = e.hsc;
      r.hsc_point = e.hsc_point;
      r.hsc_direction = e.hsc_dir;
    }
  }
  return r;
}

}  // namespace hermlab
