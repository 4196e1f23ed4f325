#include <gtest/gtest.h>

#include <sstream>

#include "hermlab/catalogue.hpp"
#include "hermlab/spectral.hpp"

using namespace hermlab;

TEST(Mesh, IcosphereCountsAndRadius) {
  for (int l = 0; l <= 3; ++l) {
    auto m = icosphere(l, 0.7);
    size_t p = size_t(1) << (2 * l);
    EXPECT_EQ(m.v.size(), 10 * p + 2);
    EXPECT_EQ(m.f.size(), 20 * p);
    for (auto& v : m.v) EXPECT_NEAR(v.norm(), 0.7, 1e-15);
  }
}

TEST(Mesh, CotangentLaplacianStructure) {
  auto m = icosphere(3, 1.0);
  auto [K, M] = cotangent_laplacian(m);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(K.rows());
  EXPECT_LT((K * one).cwiseAbs().maxCoeff(), 1e-12);
  SpMat Kt = K.transpose();
  EXPECT_LT((K - Kt).norm(), 1e-12);
  EXPECT_GT(M.minCoeff(), 0);
  // lumped mass is the polyhedral area, computed here face by face
  double area = 0;
  for (auto& f : m.f) area += 0.5 * (m.v[f[1]] - m.v[f[0]]).cross(m.v[f[2]] - m.v[f[0]]).norm();
  EXPECT_NEAR(M.sum(), area, 1e-12);
  EXPECT_LT(M.sum(), 4 * M_PI);
  // and approaches the sphere area from below
  double prev = 4 * M_PI - M.sum();
  for (int l = 4; l <= 5; ++l) {
    auto [K2, M2] = cotangent_laplacian(icosphere(l, 1.0));
    double gap = 4 * M_PI - M2.sum();
    EXPECT_GT(gap, 0);
    EXPECT_LT(gap, prev / 3);
    prev = gap;
  }
}

TEST(Spectral, MeshEigenvalueConvergesToFour) {
  auto fs = fubini_study(1);
  double prev = INFINITY;
  for (int l = 3; l <= 5; ++l) {
    auto s = sphere_fs_spectrum_full(fs, l);
    double err = std::abs(s.result.lambda1 - 4.0);
    EXPECT_LT(err, prev) << l;
    prev = err;
    EXPECT_LT(s.eig.residual, 1e-4);
    // the eigenvector is M-orthogonal to constants
    auto [K, M] = cotangent_laplacian(s.mesh);
    EXPECT_LT(std::abs(M.dot(s.eig.vec)) / s.eig.vec.cwiseAbs().maxCoeff(), 1e-8);
    // coordinate functions span the first eigenspace
    for (double r : s.coordinate_rayleigh) EXPECT_NEAR(r, s.result.lambda1, 1e-3);
  }
  auto s5 = sphere_fs_spectrum(fs, 5);
  EXPECT_GE(s5.lambda1, 3.92);
  EXPECT_LE(s5.lambda1, 4.08);
  EXPECT_NEAR(s5.diameter, M_PI / std::sqrt(2.0), 1e-15);
}

TEST(Spectral, ScalingDividesEigenvalue) {
  auto s = sphere_fs_spectrum(scaled(fubini_study(1), 4.0), 4);
  EXPECT_NEAR(s.lambda1, 1.0, 1e-3);
  auto t = torus_spectrum(scaled(flat_torus(2), 4.0));
  EXPECT_NEAR(t.lambda1, 0.25, 1e-15);
}

TEST(Spectral, TorusIsExact) {
  auto t = torus_spectrum(flat_torus(1));
  EXPECT_EQ(t.lambda1, 1.0);
  EXPECT_NEAR(t.diameter, M_PI * std::sqrt(2.0), 1e-15);
  EXPECT_LT(t.residual, 1e-12);
  EXPECT_EQ(t.method, "fourier-exact");
  auto small = torus_spectrum(flat_torus(2, M_PI));
  EXPECT_NEAR(small.lambda1, 4.0, 1e-14);
}

TEST(Spectral, ClosedFormFubiniStudy) {
  for (int n = 2; n <= 4; ++n) {
    auto r = fs_closed_form_spectrum(fubini_study(n));
    EXPECT_EQ(r.lambda1, 2.0 * (n + 1));
    EXPECT_LT(r.residual, 1e-12);
  }
}

TEST(Spectral, ResidualDetectsWrongEigenvalue) {
  auto fs = fubini_study(2);
  EXPECT_LT(eigen_residual(fs, *fs.eigenfunction, 6.0), 1e-12);
  EXPECT_GT(eigen_residual(fs, *fs.eigenfunction, 5.0), 0.5);
}

TEST(Spectral, DispatchAndErrors) {
  EXPECT_EQ(spectrum_for(flat_torus(3)).method, "fourier-exact");
  EXPECT_EQ(spectrum_for(fubini_study(1), 3).method, "mesh-cotangent");
  EXPECT_EQ(spectrum_for(fubini_study(2)).method, "closed-form");
  EXPECT_THROW(spectrum_for(iwasawa()), UnsupportedError);
  EXPECT_THROW(sphere_fs_spectrum(fubini_study(1), 2), ConfigError);
  EXPECT_THROW(sphere_fs_spectrum(fubini_study(1), 9), ConfigError);
  EXPECT_THROW(sphere_fs_spectrum(fubini_study(2), 4), UnsupportedError);
  EXPECT_THROW(torus_spectrum(fubini_study(1)), UnsupportedError);
  EXPECT_THROW(diameter(iwasawa()), UnsupportedError);
}

TEST(Spectral, MeshCsvLayout) {
  auto s = sphere_fs_spectrum_full(fubini_study(1), 3);
  std::ostringstream os;
  write_mesh_csv(os, s.mesh, s.eig.vec);
  std::string text = os.str();
  size_t lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(lines, 1 + s.mesh.v.size() + s.mesh.f.size());
  EXPECT_EQ(text.substr(0, text.find('\n')), "kind,index,a,b,c,value");
}
