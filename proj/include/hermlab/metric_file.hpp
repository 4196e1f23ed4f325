#pragma once

// Grid-sampled metrics read from text files and interpolated with
// tensor-product natural cubic splines.
//
//   herm-metric v1; n=<int>; domain=<x0,x1;y0,y1;...>; grid=<g1,...>
//   <one line per grid node: upper triangle of h, row-major, as re im pairs>
//
// Nodes run over the real axes (x1, y1, x2, y2, ...) with the last axis
// fastest.  Lines starting with '#' are ignored.

#include <fstream>
#include <regex>
#include <sstream>

#include "hermlab/charts.hpp"
#include "hermlab/tensorcore.hpp"

namespace hermlab {

namespace detail {

// Natural cubic spline on a uniform axis.  Value and derivatives at x are
// linear in the data: returns the weight vector for derivative order k.
//
// The spline's own second derivative is only O(h^2) accurate, while its
// slopes at the nodes are O(h^4).  Order k >= 2 is therefore taken as the
// slope of the spline through the nodal (k-1)-th derivatives.
struct SplineAxis {
  double x0 = 0, h = 1;
  int g = 0;
  Eigen::MatrixXd K;   // second derivatives at nodes = K * data
  Eigen::MatrixXd D1;  // slopes at nodes = D1 * data

  SplineAxis() = default;
  SplineAxis(double a, double b, int count) : x0(a), h((b - a) / (count - 1)), g(count) {
    // tridiagonal system for M_1..M_{g-2}, with M_0 = M_{g-1} = 0
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(g, g), R = Eigen::MatrixXd::Zero(g, g);
    A(0, 0) = A(g - 1, g - 1) = 1;
    for (int i = 1; i < g - 1; ++i) {
      A(i, i - 1) = 1;
      A(i, i) = 4;
      A(i, i + 1) = 1;
      R(i, i - 1) = 6 / (h * h);
      R(i, i) = -12 / (h * h);
      R(i, i + 1) = 6 / (h * h);
    }
    K = A.partialPivLu().solve(R);
    D1.resize(g, g);
    for (int i = 0; i < g; ++i) D1.row(i) = raw_weights(x0 + i * h, 1).transpose();
  }

  Eigen::VectorXd weights(double x, int k) const {
    if (k <= 1) return raw_weights(x, k);
    if (k > 3) return Eigen::VectorXd::Zero(g);
    Eigen::RowVectorXd w = raw_weights(x, 1).transpose();
    for (int j = 1; j < k; ++j) w = w * D1;
    return w.transpose();
  }

  Eigen::VectorXd raw_weights(double x, int k) const {
    int i = std::clamp(int(std::floor((x - x0) / h)), 0, g - 2);
    double t = (x - x0) / h - i;  // in [0,1] inside the domain
    // S = (1-t) f_i + t f_{i+1} + h^2/6 [((1-t)^3-(1-t)) M_i + (t^3-t) M_{i+1}]
    double a, b, c, d;
    double s = 1 - t;
    switch (k) {
      case 0:
        a = s, b = t, c = h * h / 6 * (s * s * s - s), d = h * h / 6 * (t * t * t - t);
        break;
      case 1:
        a = -1 / h, b = 1 / h, c = h / 6 * (-3 * s * s + 1), d = h / 6 * (3 * t * t - 1);
        break;
      case 2:
        a = 0, b = 0, c = s, d = t;
        break;
      case 3:
        a = 0, b = 0, c = -1 / h, d = 1 / h;
        break;
      default:
        return Eigen::VectorXd::Zero(g);
    }
    Eigen::VectorXd w = c * K.row(i).transpose() + d * K.row(i + 1).transpose();
    w(i) += a;
    w(i + 1) += b;
    return w;
  }
};

// all multi-indices over d axes with total degree <= order
inline std::vector<std::vector<int>> multi_indices(int d, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(d, 0);
  std::function<void(int, int)> rec = [&](int axis, int left) {
    if (axis == d) {
      out.push_back(a);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      a[axis] = k;
      rec(axis + 1, left - k);
    }
    a[axis] = 0;
  };
  rec(0, order);
  return out;
}

}  // namespace detail

struct MetricGrid {
  int n = 0;
  Domain domain;
  std::vector<int> grid;  // nodes per real axis, 2n entries
  // data[e][node]: component e of the upper triangle (i <= j, row-major)
  std::vector<std::vector<cplx>> data;

  int nodes() const {
    int t = 1;
    for (int g : grid) t *= g;
    return t;
  }
  static int entry_index(int n, int i, int j) {
    // row-major upper triangle
    return i * n - i * (i - 1) / 2 + (j - i);
  }
};

namespace detail {

inline std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline std::vector<double> parse_numbers(const std::string& s, char sep, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    tok = trim(tok);
    try {
      size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw ConfigError("malformed " + what + " value '" + tok + "'");
    }
  }
  return v;
}

}  // namespace detail

inline MetricGrid parse_metric_grid(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("metric file is empty");
  static const std::regex re(
      R"(^\s*herm-metric\s+v1\s*;\s*n\s*=\s*(\d+)\s*;\s*domain\s*=\s*([^=]*?)\s*;\s*grid\s*=\s*([0-9,\s]+?)\s*$)");
  std::smatch m;
  if (!std::regex_match(header, m, re)) throw ConfigError("malformed metric file header");
  MetricGrid g;
  g.n = std::stoi(m[1]);
  if (g.n < 1 || g.n > 4) throw ConfigError("metric file dimension must be 1..4");
  std::vector<std::string> pairs;
  {
    std::stringstream ss(m[2].str());
    std::string tok;
    while (std::getline(ss, tok, ';')) pairs.push_back(tok);
  }
  if (int(pairs.size()) != 2 * g.n) throw ConfigError("domain needs one x0,x1 pair per real axis");
  g.domain.box.resize(g.n);
  for (int a = 0; a < 2 * g.n; ++a) {
    auto v = detail::parse_numbers(pairs[a], ',', "domain");
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("domain interval must be lo,hi with lo < hi");
    g.domain.box[a / 2][2 * (a % 2)] = v[0];
    g.domain.box[a / 2][2 * (a % 2) + 1] = v[1];
  }
  for (double x : detail::parse_numbers(m[3].str(), ',', "grid")) {
    if (x != std::floor(x) || x < 4 || x > 4096) throw ConfigError("grid sizes must be integers in 4..4096");
    g.grid.push_back(int(x));
  }
  if (int(g.grid.size()) != 2 * g.n) throw ConfigError("grid needs one size per real axis");
  int comps = g.n * (g.n + 1) / 2;
  g.data.assign(comps, std::vector<cplx>(g.nodes()));
  std::string line;
  int node = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (node >= g.nodes()) throw ConfigError("more data rows than grid nodes");
    std::stringstream ss(line);
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      try {
        size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw ConfigError("malformed number on line " + std::to_string(lineno));
      }
    }
    if (int(v.size()) != 2 * comps)
      throw ConfigError("line " + std::to_string(lineno) + " has " + std::to_string(v.size()) + " numbers, n=" +
                        std::to_string(g.n) + " needs " + std::to_string(2 * comps));
    for (int c = 0; c < comps; ++c) g.data[c][node] = cplx(v[2 * c], v[2 * c + 1]);
    ++node;
  }
  if (node != g.nodes())
    throw ConfigError("expected " + std::to_string(g.nodes()) + " data rows, found " + std::to_string(node));
  // diagonal entries must be real; every sample positive definite
  for (int k = 0; k < g.nodes(); ++k) {
    MatC H(g.n, g.n);
    for (int i = 0; i < g.n; ++i)
      for (int j = i; j < g.n; ++j) {
        cplx c = g.data[MetricGrid::entry_index(g.n, i, j)][k];
        H(i, j) = c;
        H(j, i) = std::conj(c);
      }
    for (int i = 0; i < g.n; ++i)
      if (std::abs(H(i, i).imag()) > 1e-12 * (1 + std::abs(H(i, i).real())))
        throw ConfigError("non-Hermitian sample at node " + std::to_string(k));
    Eigen::SelfAdjointEigenSolver<MatC> es(H, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())))
      throw SingularMetricError("metric sample at node " + std::to_string(k) + " is not positive definite");
  }
  return g;
}

// Spline interpolant of a MetricGrid; jets come from the spline's own
// derivatives (third derivatives are piecewise constant, higher vanish).
inline MetricField spline_metric(const MetricGrid& g, std::string label) {
  struct State {
    MetricGrid g;
    std::vector<detail::SplineAxis> axes;
  };
  auto st = std::make_shared<State>();
  st->g = g;
  for (int a = 0; a < 2 * g.n; ++a) {
    const auto& b = g.domain.box[a / 2];
    st->axes.emplace_back(b[2 * (a % 2)], b[2 * (a % 2) + 1], g.grid[a]);
  }
  int n = g.n;
  // derivative d^alpha of every component at real point x
  auto derivs = [st](const std::vector<double>& x, const std::vector<std::vector<int>>& alphas) {
    const auto& G = st->g;
    int d = int(x.size()), comps = int(G.data.size());
    std::vector<std::vector<cplx>> out(alphas.size(), std::vector<cplx>(comps));
    std::map<std::pair<int, int>, Eigen::VectorXd> wcache;
    auto w = [&](int a, int k) -> const Eigen::VectorXd& {
      auto key = std::pair{a, k};
      auto it = wcache.find(key);
      if (it == wcache.end()) it = wcache.emplace(key, st->axes[a].weights(x[a], k)).first;
      return it->second;
    };
    for (size_t m = 0; m < alphas.size(); ++m) {
      bool zero = false;
      for (int a = 0; a < d; ++a) zero = zero || alphas[m][a] > 3;
      if (zero) continue;
      // contract the last axis first
      for (int c = 0; c < comps; ++c) {
        std::vector<cplx> cur = G.data[c];
        int len = int(cur.size());
        for (int a = d - 1; a >= 0; --a) {
          const Eigen::VectorXd& wa = w(a, alphas[m][a]);
          int ga = G.grid[a];
          int outer = len / ga;
          std::vector<cplx> next(outer, 0.0);
          for (int o = 0; o < outer; ++o) {
            cplx s = 0;
            for (int t = 0; t < ga; ++t) s += wa(t) * cur[o * ga + t];
            next[o] = s;
          }
          cur.swap(next);
          len = outer;
        }
        out[m][c] = cur[0];
      }
    }
    return out;
  };
  auto to_matrix = [n](const std::vector<cplx>& comp) {
    MatC H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        H(i, j) = comp[MetricGrid::entry_index(n, i, j)];
        H(j, i) = std::conj(H(i, j));
      }
    for (int i = 0; i < n; ++i) H(i, i) = H(i, i).real();
    return H;
  };
  MetricField m;
  m.n = n;
  m.label = std::move(label);
  m.domain = g.domain;
  m.analytic = false;
  m.eval_raw = [derivs, to_matrix, n](const ChartPoint& p) {
    auto v = derivs(p.real_coords(), {std::vector<int>(2 * n, 0)});
    return to_matrix(v[0]);
  };
  m.jet_source = [derivs, n, dom = g.domain](const ChartPoint& p, int order) {
    if (!dom.contains(p)) throw DomainError("point outside the metric file domain");
    auto alphas = detail::multi_indices(2 * n, order);
    auto v = derivs(p.real_coords(), alphas);
    auto [z, zb] = coordinate_jets(p, order);
    // real displacements as jets: dx = (dz + dzbar)/2, dy = (dz - dzbar)/(2i)
    std::vector<Jet> dx;
    for (int i = 0; i < n; ++i) {
      Jet dz = z[i] - Jet(z[i].val()), dzb = zb[i] - Jet(zb[i].val());
      dx.push_back((dz + dzb) * Jet(0.5));
      dx.push_back((dz - dzb) * Jet(cplx(0, -0.5)));
    }
    int comps = n * (n + 1) / 2;
    std::vector<Jet> acc(comps, Jet(0.0));
    for (size_t k = 0; k < alphas.size(); ++k) {
      Jet mono(1.0);
      double fact = 1;
      for (int a = 0; a < 2 * n; ++a)
        for (int e = 1; e <= alphas[k][a]; ++e) {
          mono = mono * dx[a];
          fact *= e;
        }
      for (int c = 0; c < comps; ++c)
        if (v[k][c] != cplx(0)) acc[c] += mono * Jet(v[k][c] / fact);
    }
    JetMat r(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        r(i, j) = acc[MetricGrid::entry_index(n, i, j)];
        r(j, i) = conj_fn(r(i, j));
      }
    return r;
  };
  return m;
}

inline MetricField load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metric file '" + path + "'");
  return spline_metric(parse_metric_grid(in), path);
}

// Samples a metric on a grid in the file format; used to build fixtures.
inline void write_metric_file(std::ostream& os, const MetricField& m, const Domain& dom, const std::vector<int>& grid) {
  int n = m.n;
  if (int(grid.size()) != 2 * n) throw ConfigError("grid needs one size per real axis");
  os << "herm-metric v1; n=" << n << "; domain=";
  for (int a = 0; a < 2 * n; ++a) {
    const auto& b = dom.box[a / 2];
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", a ? ";" : "", b[2 * (a % 2)], b[2 * (a % 2) + 1]);
    os << buf;
  }
  os << "; grid=";
  for (int a = 0; a < 2 * n; ++a) os << (a ? "," : "") << grid[a];
  os << "\n";
  int total = 1;
  for (int x : grid) total *= x;
  std::vector<double> x(2 * n);
  for (int t = 0; t < total; ++t) {
    int r = t;
    for (int a = 2 * n - 1; a >= 0; --a) {
      int k = r % grid[a];
      r /= grid[a];
      const auto& b = dom.box[a / 2];
      double lo = b[2 * (a % 2)], hi = b[2 * (a % 2) + 1];
      x[a] = lo + (hi - lo) * k / (grid[a] - 1);
    }
    MatC H = m.eval_raw(ChartPoint::from_real(x));
    std::string line;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "%s%.17g %.17g", line.empty() ? "" : " ", H(i, j).real(), H(i, j).imag());
        line += buf;
      }
    os << line << "\n";
  }
}

// A catalogue entry around a loaded metric: no spectrum, no eigenfunction.
inline GeometryCatalogueEntry file_geometry(const std::string& path) {
  GeometryCatalogueEntry e;
  e.name = path;
  e.family = "file";
  e.metric = load_metric_file(path);
  e.sample_box = e.metric.domain.shrunk(0.1);
  return e;
}

}  // namespace hermlab
