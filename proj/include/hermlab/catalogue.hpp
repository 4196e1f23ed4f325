#pragma once

#include <cmath>
#include <string>

#include "hermlab/charts.hpp"
#include "hermlab/quadrature.hpp"

namespace hermlab {

namespace detail {

struct FubiniStudyMetric {
  int n;
  template <class T>
  std::vector<T> operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    T r2 = sqnorm(z, zb);
    T a = T(1.0) / (T(1.0) + r2);
    T a2 = a * a;
    std::vector<T> h(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h[i * n + j] = (i == j ? a : T(0.0)) - zb[i] * z[j] * a2;
    return h;
  }
};

// first eigenfunction ((n+1)/(1+|z|^2) - 1)/n, maximum 1 at the origin
struct FubiniStudyEigen {
  int n;
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    T r2 = sqnorm(z, zb);
    return (T(double(n + 1)) / (T(1.0) + r2) - T(1.0)) * T(1.0 / n);
  }
};

struct FlatMetric {
  int n;
  double c;
  template <class T>
  std::vector<T> operator()(const std::vector<T>&, const std::vector<T>&) const {
    std::vector<T> h(n * n, T(0.0));
    for (int i = 0; i < n; ++i) h[i * n + i] = T(0.5 * c);
    return h;
  }
};

struct CosX1 {
  double k;
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::cos;
    return cos((z[0] + zb[0]) * T(0.5 * k));
  }
};

struct IwasawaMetric {
  template <class T>
  std::vector<T> operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    T o(0.0), one(1.0);
    return {one, o, o, o, one + z[0] * zb[0], -z[0], o, -zb[0], one};
  }
};

// (cos 2pi x1 + cos 2pi y2)/2
struct IwasawaEigen {
  template <class T>
  T operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::cos;
    T x1 = (z[0] + zb[0]) * T(0.5);
    T y2 = (z[1] - zb[1]) * T(cplx(0, -0.5));
    return (cos(x1 * T(2 * M_PI)) + cos(y2 * T(2 * M_PI))) * T(0.5);
  }
};

struct NonbalancedMetric {
  template <class T>
  std::vector<T> operator()(const std::vector<T>& z, const std::vector<T>& zb) const {
    using std::exp;
    T e = exp(z[0] * zb[0]) * T(0.5);
    return {e, T(0.0), T(0.0), e};
  }
};

}  // namespace detail

inline GeometryCatalogueEntry fubini_study(int n) {
  if (n < 1) throw ConfigError("fubini-study needs n >= 1");
  GeometryCatalogueEntry e;
  e.name = "fubini-study:" + std::to_string(n);
  e.family = "fubini-study";
  e.metric = make_metric(n, e.name, Domain::cube(n, -1e6, 1e6), detail::FubiniStudyMetric{n});
  e.is_balanced_expected = e.is_kahler_expected = true;
  e.compact = true;
  // CP^n: lambda_1 = 2(n+1); a projective line is totally geodesic with
  // curvature 2, so the diameter is pi/sqrt(2) in every dimension
  e.exact_lambda1 = 2.0 * (n + 1);
  e.eigenvalue = e.exact_lambda1;
  e.diameter = M_PI / std::sqrt(2.0);
  e.eigenfunction = make_scalar(n, "fs-first-eigenfunction", detail::FubiniStudyEigen{n});
  e.eigen_min = -1.0 / n;
  e.sample_box = Domain::cube(n, -1.5, 1.5);
  if (n == 1) {
    e.quadrature = [](int N) { return fs_sphere_quadrature(N, 2 * N); };
    e.quad_res = 128;
    e.quad_refine = {16, 32};
  }
  return e;
}

inline GeometryCatalogueEntry flat_torus(int n, double period = 2 * M_PI, double scale = 1) {
  if (n < 1) throw ConfigError("flat-torus needs n >= 1");
  GeometryCatalogueEntry e;
  e.name = "flat-torus:" + std::to_string(n);
  e.family = "flat-torus";
  e.period = period;
  e.scale = scale;
  e.metric = make_metric(n, e.name, Domain::cube(n, 0, period, true), detail::FlatMetric{n, scale});
  e.is_balanced_expected = e.is_kahler_expected = true;
  e.compact = true;
  double k = 2 * M_PI / period;
  e.exact_lambda1 = k * k / scale;
  e.eigenvalue = e.exact_lambda1;
  e.diameter = 0.5 * period * std::sqrt(2.0 * n * scale);
  e.eigenfunction = make_scalar(n, "cos-x1", detail::CosX1{k});
  e.sample_box = Domain::cube(n, 0, period);
  double density = std::pow(scale, n);
  // trapezoid is exact for the trigonometric integrands once N exceeds their
  // frequency, so the coarse level sits below that and the fine one above
  // for n = 3 only the first two coordinates are integrated, with the third
  // factor's volume as a constant; the eigenfunction and the weak-check test
  // functions never depend on z3
  if (n <= 3) {
    int m = std::min(n, 2);
    double extra = n == 3 ? period * period : 1.0;
    e.quadrature = [n, m, period, density, extra](int N) {
      return periodic_box_quadrature(n, m, N, period, density, extra);
    };
    e.quad_res = n == 1 ? 32 : 12;
    e.quad_refine = {4, 8};
  }
  return e;
}

inline GeometryCatalogueEntry iwasawa() {
  GeometryCatalogueEntry e;
  e.name = "iwasawa";
  e.family = "iwasawa";
  e.period = 1;
  e.metric = make_metric(3, e.name, Domain::cube(3, 0, 1, true), detail::IwasawaMetric{});
  e.is_balanced_expected = true;
  e.is_kahler_expected = false;
  e.compact = true;
  // eigenfunction for identity checks only; it is not claimed to be the first
  e.eigenfunction = make_scalar(3, "iwasawa-eigenfunction", detail::IwasawaEigen{});
  e.eigenvalue = 2 * M_PI * M_PI;
  e.sample_box = Domain::cube(3, 0, 1);
  // det h = 1; integrands here never depend on z3
  e.quadrature = [](int N) { return periodic_box_quadrature(3, 2, N, 1.0, 8.0, 1.0); };
  e.quad_res = 8;
  e.quad_refine = {4, 8};
  return e;
}

inline GeometryCatalogueEntry nonbalanced_example() {
  GeometryCatalogueEntry e;
  e.name = "nonbalanced";
  e.family = "nonbalanced";
  e.metric = make_metric(2, e.name, Domain::cube(2, -3, 3), detail::NonbalancedMetric{});
  e.is_balanced_expected = false;
  e.is_kahler_expected = false;
  e.sample_box = Domain::cube(2, -1.5, 1.5);
  return e;
}

// metric multiplied by c > 0
inline GeometryCatalogueEntry scaled(const GeometryCatalogueEntry& src, double c) {
  if (!(c > 0)) throw ConfigError("scale factor must be positive");
  GeometryCatalogueEntry e = src;
  e.name = src.name + "*" + std::to_string(c);
  e.scale = src.scale * c;
  MetricField m = src.metric;
  auto raw = src.metric.eval_raw;
  auto js = src.metric.jet_source;
  m.label = e.name;
  m.eval_raw = [raw, c](const ChartPoint& p) { return MatC(raw(p) * c); };
  if (js)
    m.jet_source = [js, c](const ChartPoint& p, int order) {
      JetMat r = js(p, order);
      for (auto& x : r.a) x = x * Jet(c);
      return r;
    };
  e.metric = m;
  if (src.exact_lambda1) e.exact_lambda1 = *src.exact_lambda1 / c;
  if (src.eigenvalue) e.eigenvalue = *src.eigenvalue / c;
  if (src.diameter) e.diameter = *src.diameter * std::sqrt(c);
  if (src.quadrature) {
    int n = src.metric.n;
    auto qf = src.quadrature;
    e.quadrature = [qf, c, n](int N) {
      Quadrature q = qf(N);
      for (auto& w : q.weights) w *= std::pow(c, n);
      return q;
    };
  }
  return e;
}

inline std::vector<std::string> catalogue_names() {
  return {"fubini-study:<n>", "flat-torus:<n>", "iwasawa", "nonbalanced"};
}

inline GeometryCatalogueEntry geometry_by_name(const std::string& name) {
  auto colon = name.find(':');
  std::string fam = name.substr(0, colon);
  int n = 1;
  if (colon != std::string::npos) {
    try {
      size_t used = 0;
      n = std::stoi(name.substr(colon + 1), &used);
      if (used != name.size() - colon - 1) throw ConfigError("bad dimension in '" + name + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad dimension in '" + name + "'");
    }
    if (n < 1 || n > 4) throw ConfigError("dimension must be 1..4 in '" + name + "'");
  }
  if (fam == "fubini-study") return fubini_study(n);
  if (fam == "flat-torus") return flat_torus(n);
  if (colon == std::string::npos && fam == "iwasawa") return iwasawa();
  if (colon == std::string::npos && fam == "nonbalanced") return nonbalanced_example();
  throw ConfigError("unknown geometry '" + name + "'");
}

}  // namespace hermlab
