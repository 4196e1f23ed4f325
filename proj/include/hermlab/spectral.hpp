#pragma once

// First eigenvalue, eigenfunction and diameter of the built-in compact
// geometries.  Flat tori are exact (Fourier); the Fubini-Study CP^1 is
// checked independently on a geodesic icosphere with the cotangent Laplacian.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <map>
#include <ostream>

#include "hermlab/hodge.hpp"
#include "hermlab/sampling.hpp"

namespace hermlab {

struct SpectralResult {
  double lambda1 = 0;
  std::optional<ScalarField> eigenfunction;
  double diameter = 0;
  std::string method;  // fourier-exact or mesh-cotangent
  int resolution = 0;
  double residual = 0;
  int iterations = 0;
};

struct TriMesh {
  std::vector<Eigen::Vector3d> v;
  std::vector<std::array<int, 3>> f;
};

// Geodesic icosphere: icosahedron, `level` midpoint subdivisions, projected
// onto the sphere of the given radius.
inline TriMesh icosphere(int level, double radius) {
  TriMesh m;
  const double t = (1 + std::sqrt(5.0)) / 2;
  double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                       {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& r : raw) m.v.push_back(Eigen::Vector3d(r[0], r[1], r[2]).normalized() * radius);
  m.f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
         {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.v.push_back((m.v[a] + m.v[b]).normalized() * radius);
      int id = int(m.v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> nf;
    nf.reserve(m.f.size() * 4);
    for (auto& tri : m.f) {
      int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      nf.push_back({tri[0], a, c});
      nf.push_back({tri[1], b, a});
      nf.push_back({tri[2], c, b});
      nf.push_back({a, b, c});
    }
    m.f = std::move(nf);
  }
  return m;
}

using SpMat = Eigen::SparseMatrix<double>;

// Cotangent stiffness K (positive semidefinite) and barycentric lumped mass M.
inline std::pair<SpMat, Eigen::VectorXd> cotangent_laplacian(const TriMesh& m) {
  int N = int(m.v.size());
  size_t F = m.f.size();
  // per-face contributions, computed independently then assembled in order
  std::vector<std::array<double, 4>> face(F);
  parallel_for(F, [&](size_t k) {
    const auto& t = m.f[k];
    std::array<double, 4> c{};
    for (int e = 0; e < 3; ++e) {
      const auto& p = m.v[t[e]];
      Eigen::Vector3d a = m.v[t[(e + 1) % 3]] - p, b = m.v[t[(e + 2) % 3]] - p;
      c[e] = a.dot(b) / a.cross(b).norm();  // cot of the angle at vertex e
    }
    Eigen::Vector3d a = m.v[t[1]] - m.v[t[0]], b = m.v[t[2]] - m.v[t[0]];
    c[3] = 0.5 * a.cross(b).norm();
    face[k] = c;
  });
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(F * 9);
  Eigen::VectorXd M = Eigen::VectorXd::Zero(N);
  for (size_t k = 0; k < F; ++k) {
    const auto& t = m.f[k];
    for (int e = 0; e < 3; ++e) {
      // edge opposite vertex e
      int i = t[(e + 1) % 3], j = t[(e + 2) % 3];
      double w = 0.5 * face[k][e];
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      M(t[e]) += face[k][3] / 3;
    }
  }
  SpMat K(N, N);
  K.setFromTriplets(trip.begin(), trip.end());
  return {K, M};
}

struct MeshEigen {
  double lambda = 0;
  Eigen::VectorXd vec;
  int iterations = 0;
  double residual = 0;  // |K x - lambda M x|_inf / |M x|_inf
};

// Smallest nonzero eigenpair of K x = lambda M x by inverse iteration with
// shift -sigma, M-orthogonal deflation of constants, deterministic start.
inline MeshEigen first_nonzero_eigenpair(const SpMat& K, const Eigen::VectorXd& M, double sigma = 1,
                                         double tol = 1e-10, int max_iter = 500) {
  int N = int(M.size());
  SpMat A = K;
  for (int i = 0; i < N; ++i) A.coeffRef(i, i) += sigma * M(i);
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success) throw Error("mesh factorization failed");
  double mass = M.sum();
  auto deflate = [&](Eigen::VectorXd& x) {
    double c = M.dot(x) / mass;
    x.array() -= c;
  };
  Eigen::VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = std::sin(1.0 + 0.37 * i) + 0.1 * std::cos(0.011 * i * i);
  deflate(x);
  x /= std::sqrt(x.dot(M.cwiseProduct(x)));
  MeshEigen r;
  double prev = INFINITY;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd y = solver.solve(M.cwiseProduct(x));
    deflate(y);
    x = y / std::sqrt(y.dot(M.cwiseProduct(y)));
    double rq = x.dot(K * x);
    r.iterations = it;
    if (std::abs(rq - prev) < tol) {
      prev = rq;
      break;
    }
    prev = rq;
  }
  r.lambda = prev;
  r.vec = x;
  Eigen::VectorXd Mx = M.cwiseProduct(x);
  r.residual = (K * x - r.lambda * Mx).cwiseAbs().maxCoeff() / Mx.cwiseAbs().maxCoeff();
  return r;
}

inline double rayleigh_quotient(const SpMat& K, const Eigen::VectorXd& M, const Eigen::VectorXd& f) {
  return f.dot(K * f) / f.dot(M.cwiseProduct(f));
}

inline ScalarField analytic_eigenfunction(const GeometryCatalogueEntry& e) {
  if (!e.eigenfunction) throw UnsupportedError("no eigenfunction registered for " + e.name);
  return *e.eigenfunction;
}

inline double diameter(const GeometryCatalogueEntry& e) {
  if (!e.diameter) throw UnsupportedError("no analytic diameter for " + e.name);
  return *e.diameter;
}

// max over sample points of |Delta_d u - lambda u| / max |u|
inline double eigen_residual(const GeometryCatalogueEntry& e, const ScalarField& u, double lambda,
                             int count = 200, std::uint64_t seed = 1) {
  auto pts = halton_points(e.sample_box, count, seed);
  double rmax = 0, umax = 0;
  for (auto& p : pts) {
    double v = u(p).real();
    rmax = std::max(rmax, std::abs(scalar_laplacian(e.metric, u, p) - lambda * v));
    umax = std::max(umax, std::abs(v));
  }
  return rmax / std::max(umax, 1e-300);
}

inline SpectralResult torus_spectrum(const GeometryCatalogueEntry& e) {
  if (e.family != "flat-torus") throw UnsupportedError("fourier spectrum needs a flat torus, got " + e.name);
  SpectralResult r;
  double k = 2 * M_PI / e.period;
  r.lambda1 = k * k / e.scale;
  r.eigenfunction = e.eigenfunction;
  r.diameter = 0.5 * e.period * std::sqrt(2.0 * e.metric.n * e.scale);
  r.method = "fourier-exact";
  r.resolution = 0;
  r.residual = eigen_residual(e, *e.eigenfunction, r.lambda1);
  return r;
}

struct SphereSpectrum {
  SpectralResult result;
  TriMesh mesh;
  MeshEigen eig;
  std::array<double, 3> coordinate_rayleigh{};
};

// FS CP^1 is the round sphere of radius 1/sqrt(2); metric scaling by c
// multiplies the radius by sqrt(c).
inline SphereSpectrum sphere_fs_spectrum_full(const GeometryCatalogueEntry& e, int subdivisions) {
  if (e.family != "fubini-study" || e.metric.n != 1)
    throw UnsupportedError("mesh spectrum is only available for fubini-study:1");
  if (subdivisions < 3) throw ConfigError("icosphere needs at least 3 subdivisions");
  if (subdivisions > 8) throw ConfigError("icosphere subdivisions above 8 are not supported");
  SphereSpectrum s;
  double radius = std::sqrt(e.scale / 2.0);
  s.mesh = icosphere(subdivisions, radius);
  auto [K, M] = cotangent_laplacian(s.mesh);
  s.eig = first_nonzero_eigenpair(K, M, 1.0 / e.scale);
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd f(s.mesh.v.size());
    for (size_t i = 0; i < s.mesh.v.size(); ++i) f(i) = s.mesh.v[i](a);
    s.coordinate_rayleigh[a] = rayleigh_quotient(K, M, f);
  }
  auto& r = s.result;
  r.lambda1 = s.eig.lambda;
  r.eigenfunction = e.eigenfunction;
  r.diameter = diameter(e);
  r.method = "mesh-cotangent";
  r.resolution = subdivisions;
  r.residual = s.eig.residual;
  r.iterations = s.eig.iterations;
  return s;
}

inline SpectralResult sphere_fs_spectrum(const GeometryCatalogueEntry& e, int subdivisions) {
  return sphere_fs_spectrum_full(e, subdivisions).result;
}

// lambda_1 = 2(n+1)/scale of CP^n, no discretization
inline SpectralResult fs_closed_form_spectrum(const GeometryCatalogueEntry& e) {
  if (e.family != "fubini-study" || !e.exact_lambda1) throw UnsupportedError("closed form needs fubini-study");
  SpectralResult r;
  r.lambda1 = *e.exact_lambda1;
  r.eigenfunction = e.eigenfunction;
  r.diameter = diameter(e);
  r.method = "closed-form";
  r.residual = eigen_residual(e, *e.eigenfunction, r.lambda1, 50);
  return r;
}

// Dispatch for the CLI: tori are exact, FS CP^1 uses the mesh, higher FS the
// closed form.
inline SpectralResult spectrum_for(const GeometryCatalogueEntry& e, int subdivisions = 5) {
  if (e.family == "flat-torus") return torus_spectrum(e);
  if (e.family == "fubini-study" && e.metric.n == 1) return sphere_fs_spectrum(e, subdivisions);
  if (e.family == "fubini-study") return fs_closed_form_spectrum(e);
  throw UnsupportedError("no spectral support for " + e.name);
}

// vertices then faces; the eigenvector is attached to vertices
inline void write_mesh_csv(std::ostream& os, const TriMesh& m, const Eigen::VectorXd& vec) {
  char buf[160];
  os << "kind,index,a,b,c,value\n";
  for (size_t i = 0; i < m.v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "vertex,%zu,%.17g,%.17g,%.17g,%.17g\n", i, m.v[i](0), m.v[i](1), m.v[i](2),
                  vec.size() ? vec(i) : 0.0);
    os << buf;
  }
  for (size_t k = 0; k < m.f.size(); ++k) os << "face," << k << "," << m.f[k][0] << "," << m.f[k][1] << "," << m.f[k][2] << ",\n";
}

}  // namespace hermlab
