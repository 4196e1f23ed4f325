#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hermlab/errors.hpp"
#include "hermlab/fd.hpp"
#include "hermlab/jet.hpp"
#include "hermlab/tensorcore.hpp"

namespace hermlab {

struct ChartPoint {
  std::vector<cplx> z;
  ChartPoint() = default;
  ChartPoint(std::vector<cplx> c) : z(std::move(c)) {}
  ChartPoint(std::initializer_list<cplx> c) : z(c) {}
  int n() const { return int(z.size()); }
  static ChartPoint origin(int n) { return ChartPoint(std::vector<cplx>(n, 0.0)); }
  std::vector<double> real_coords() const {
    std::vector<double> x;
    for (auto c : z) {
      x.push_back(c.real());
      x.push_back(c.imag());
    }
    return x;
  }
  static ChartPoint from_real(const std::vector<double>& x) {
    ChartPoint p;
    for (size_t i = 0; i + 1 < x.size(); i += 2) p.z.emplace_back(x[i], x[i + 1]);
    return p;
  }
};

// Box in C^n: per coordinate [x0,x1] x [y0,y1].  Periodic boxes are
// fundamental domains of a lattice, so stencils may leave them.
struct Domain {
  std::vector<std::array<double, 4>> box;
  bool periodic = false;

  static Domain cube(int n, double lo, double hi, bool periodic = false) {
    Domain d;
    d.box.assign(n, {lo, hi, lo, hi});
    d.periodic = periodic;
    return d;
  }
  bool contains(const ChartPoint& p, double margin = 0) const {
    if (p.n() != int(box.size())) return false;
    for (int i = 0; i < p.n(); ++i) {
      double x = p.z[i].real(), y = p.z[i].imag();
      if (!std::isfinite(x) || !std::isfinite(y)) return false;
      if (x < box[i][0] + margin || x > box[i][1] - margin) return false;
      if (y < box[i][2] + margin || y > box[i][3] - margin) return false;
    }
    return true;
  }
  // shrink every side by a fraction of its width
  Domain shrunk(double frac) const {
    Domain d = *this;
    for (auto& b : d.box) {
      double wx = (b[1] - b[0]) * frac, wy = (b[3] - b[2]) * frac;
      b = {b[0] + wx, b[1] - wx, b[2] + wy, b[3] - wy};
    }
    return d;
  }
};

enum class DerivRoute { automatic, analytic, finite_difference };

inline std::vector<double> fd_steps(const ChartPoint& p, double rel) {
  std::vector<double> h;
  for (auto c : p.z) {
    h.push_back(rel * (1 + std::abs(c.real())));
    h.push_back(rel * (1 + std::abs(c.imag())));
  }
  return h;
}

inline void check_stencil(const Domain& dom, const ChartPoint& p, const std::vector<double>& h,
                          int order) {
  if (dom.periodic) return;
  int r = stencil_radius(order);
  for (int i = 0; i < p.n(); ++i) {
    const auto& b = dom.box[i];
    double x = p.z[i].real(), y = p.z[i].imag();
    if (x - r * h[2 * i] < b[0] || x + r * h[2 * i] > b[1] || y - r * h[2 * i + 1] < b[2] ||
        y + r * h[2 * i + 1] > b[3])
      throw DomainError("finite-difference stencil leaves the chart domain");
  }
}

// Square matrix of jets (row-major).
struct JetMat {
  int n = 0;
  std::vector<Jet> a;
  JetMat() = default;
  explicit JetMat(int n_) : n(n_), a(n_ * n_) {}
  Jet& operator()(int i, int j) { return a[i * n + j]; }
  const Jet& operator()(int i, int j) const { return a[i * n + j]; }
  MatC value() const {
    MatC m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = (*this)(i, j).val();
    return m;
  }
  JetMat d(int v) const {
    JetMat r(n);
    for (size_t k = 0; k < a.size(); ++k) r.a[k] = a[k].d(v);
    return r;
  }
  friend JetMat operator*(const JetMat& x, const JetMat& y) {
    JetMat r(x.n);
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < x.n; ++j) {
        Jet s(0.0);
        for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
        r(i, j) = s;
      }
    return r;
  }
  friend JetMat operator+(const JetMat& x, const JetMat& y) {
    JetMat r(x.n);
    for (size_t k = 0; k < x.a.size(); ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
  }
  static JetMat constant(const MatC& m) {
    JetMat r(int(m.rows()));
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j) r(i, j) = Jet(m(i, j));
    return r;
  }
};

// Seed jets for (z, zbar) at p.
inline std::pair<std::vector<Jet>, std::vector<Jet>> coordinate_jets(const ChartPoint& p, int order) {
  int n = p.n();
  const JetSpace& s = JetSpace::get(2 * n, order);
  std::vector<Jet> z, zb;
  for (int i = 0; i < n; ++i) {
    z.push_back(Jet::variable(s, i, p.z[i]));
    zb.push_back(Jet::variable(s, n + i, std::conj(p.z[i])));
  }
  return {z, zb};
}

// A Hermitian metric h_{i jbar} on a chart.
struct MetricField {
  int n = 0;
  std::string label;
  Domain domain;
  std::function<MatC(const ChartPoint&)> eval_raw;
  // exact jets (analytic expressions or spline differentiation); may be empty
  std::function<JetMat(const ChartPoint&, int)> jet_source;
  bool analytic = false;  // jet_source is exact (autodiff of a closed form)
  double fd_step = 1e-3;

  bool has_analytic_derivs() const { return bool(jet_source); }

  HermitianMatrix eval(const ChartPoint& p) const { return HermitianMatrix(eval_raw(p)); }

  JetMat jet(const ChartPoint& p, int order, DerivRoute route = DerivRoute::automatic,
             double step = 0) const {
    if (p.n() != n) throw DomainError("point dimension does not match metric");
    if (route != DerivRoute::finite_difference && jet_source) return jet_source(p, order);
    if (route == DerivRoute::analytic) throw UnsupportedError("no analytic derivatives for " + label);
    auto h = fd_steps(p, step > 0 ? step : fd_step);
    check_stencil(domain, p, h, order);
    auto f = [&](const std::vector<double>& x) {
      MatC m = eval_raw(ChartPoint::from_real(x));
      return std::vector<cplx>(m.data(), m.data() + m.size());  // column-major
    };
    auto js = fd_wirtinger_jets(f, p.real_coords(), h, order);
    JetMat r(n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) r(i, j) = js[j * n + i];
    return r;
  }
};

// Scalar field u on a chart; usually real-valued.
struct ScalarField {
  int n = 0;
  std::string label;
  std::function<cplx(const ChartPoint&)> eval;
  std::function<Jet(const ChartPoint&, int)> jet_source;
  double fd_step = 1e-3;
  Domain domain;

  cplx operator()(const ChartPoint& p) const { return eval(p); }

  Jet jet(const ChartPoint& p, int order, DerivRoute route = DerivRoute::automatic,
          double step = 0) const {
    if (route != DerivRoute::finite_difference && jet_source) return jet_source(p, order);
    if (route == DerivRoute::analytic) throw UnsupportedError("no analytic derivatives for " + label);
    auto h = fd_steps(p, step > 0 ? step : fd_step);
    if (!domain.box.empty()) check_stencil(domain, p, h, order);
    auto f = [&](const std::vector<double>& x) { return std::vector<cplx>{eval(ChartPoint::from_real(x))}; };
    return fd_wirtinger_jets(f, p.real_coords(), h, order)[0];
  }
};

// F is a functor template<class T> std::vector<T> F(z, zbar) returning n*n
// row-major entries h_{i jbar}.
template <class F>
MetricField make_metric(int n, std::string label, Domain dom, F f) {
  MetricField m;
  m.n = n;
  m.label = std::move(label);
  m.domain = std::move(dom);
  m.analytic = true;
  m.eval_raw = [n, f](const ChartPoint& p) {
    std::vector<cplx> zb(n);
    for (int i = 0; i < n; ++i) zb[i] = std::conj(p.z[i]);
    auto v = f(p.z, zb);
    MatC M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = v[i * n + j];
    return M;
  };
  m.jet_source = [n, f](const ChartPoint& p, int order) {
    auto [z, zb] = coordinate_jets(p, order);
    auto v = f(z, zb);
    JetMat r(n);
    r.a = std::move(v);
    return r;
  };
  return m;
}

// G is a functor template<class T> T G(z, zbar)
template <class G>
ScalarField make_scalar(int n, std::string label, G g) {
  ScalarField s;
  s.n = n;
  s.label = std::move(label);
  s.eval = [n, g](const ChartPoint& p) {
    std::vector<cplx> zb(n);
    for (int i = 0; i < n; ++i) zb[i] = std::conj(p.z[i]);
    return g(p.z, zb);
  };
  s.jet_source = [g](const ChartPoint& p, int order) {
    auto [z, zb] = coordinate_jets(p, order);
    return g(z, zb);
  };
  return s;
}

inline ScalarField constant_field(int n, double c) {
  return make_scalar(n, "constant", [c](const auto& z, const auto&) {
    using T = std::decay_t<decltype(z[0])>;
    return T(c);
  });
}

// Quadrature rule over a compact geometry; weights include the volume density
// omega^n/n! = det(h) 2^n dx dy.
struct Quadrature {
  std::vector<ChartPoint> nodes;
  std::vector<double> weights;
  std::string label;
  double volume() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
};

struct GeometryCatalogueEntry {
  std::string name;
  MetricField metric;
  bool is_balanced_expected = false;
  bool is_kahler_expected = false;
  std::optional<double> diameter;
  std::optional<double> exact_lambda1;
  std::optional<ScalarField> eigenfunction;
  // eigenvalue of `eigenfunction`; equals exact_lambda1 unless the function is
  // only an eigenfunction used for identity checks
  std::optional<double> eigenvalue;
  double eigen_min = -1;  // minimum of `eigenfunction` (its maximum is 1)
  std::string family;  // fubini-study, flat-torus, iwasawa, nonbalanced, file
  double period = 2 * M_PI;
  double scale = 1;
  bool compact = false;
  Domain sample_box;
  // argument: nodes per real direction (or per angle)
  std::function<Quadrature(int)> quadrature;
  int quad_res = 0;  // default resolution passed to `quadrature`
  std::array<int, 2> quad_refine{0, 0};  // coarse/fine pair for refinement studies
};

// Derivatives of h at a point: dh(v1,...,vk) for variables v < n (d/dz^v) and
// v >= n (d/dzbar^{v-n}).
struct MetricDerivatives {
  int n = 0;
  int order = 0;
  JetMat jets;
  MatC get(const std::vector<int>& vars) const {
    std::vector<int> e(2 * n, 0);
    for (int v : vars) e[v] += 1;
    MatC m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = jets(i, j).deriv(e);
    return m;
  }
  // order-k stack: dims (2n)^k x n x n; derivative slots listed first
  ComplexTensor stack(int k) const {
    std::vector<int> dims(k, 2 * n);
    dims.push_back(n);
    dims.push_back(n);
    std::vector<IndexKind> kinds(k, IndexKind::hol_lower);
    kinds.push_back(IndexKind::hol_lower);
    kinds.push_back(IndexKind::antihol_lower);
    ComplexTensor t(dims, kinds);
    std::vector<int> vars(k, 0);
    size_t off = 0;
    while (true) {
      MatC m = get(vars);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.data()[off++] = m(i, j);
      int a = k - 1;
      for (; a >= 0; --a) {
        if (++vars[a] < 2 * n) break;
        vars[a] = 0;
      }
      if (a < 0) break;
    }
    return t;
  }
};

inline MetricDerivatives metric_derivatives(const MetricField& m, const ChartPoint& p, int order,
                                            DerivRoute route = DerivRoute::automatic, double step = 0) {
  if (order < 1 || order > 3) throw ConfigError("derivative order must be 1..3");
  MetricDerivatives d;
  d.n = m.n;
  d.order = order;
  d.jets = m.jet(p, order, route, step);
  return d;
}

namespace detail {

template <class T>
T sqnorm(const std::vector<T>& z, const std::vector<T>& zb) {
  T s(0.0);
  for (size_t i = 0; i < z.size(); ++i) s = s + z[i] * zb[i];
  return s;
}

}  // namespace detail
}  // namespace hermlab
