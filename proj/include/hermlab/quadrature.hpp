#pragma once

#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <vector>

#include "hermlab/charts.hpp"

namespace hermlab {

// Gauss-Legendre nodes/weights on [-1, 1]
inline void gauss_legendre(int N, std::vector<double>& x, std::vector<double>& w) {
  auto pos = boost::math::legendre_p_zeros<double>(N);
  x.clear();
  w.clear();
  for (double r : pos) {
    double dp = boost::math::legendre_p_prime(N, r);
    double wt = 2.0 / ((1 - r * r) * dp * dp);
    if (r == 0.0) {
      x.push_back(0.0);
      w.push_back(wt);
    } else {
      x.push_back(r);
      w.push_back(wt);
      x.push_back(-r);
      w.push_back(wt);
    }
  }
}

// Riemann sphere through z = tan(theta/2) e^{i phi}: the FS area form is
// (1/2) sin(theta) dtheta dphi.
inline Quadrature fs_sphere_quadrature(int n_theta, int n_phi, double scale = 1) {
  Quadrature q;
  q.label = "gauss-legendre(" + std::to_string(n_theta) + ")x trapezoid(" + std::to_string(n_phi) + ")";
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  for (size_t a = 0; a < x.size(); ++a) {
    double th = 0.5 * M_PI * (1 + x[a]);
    double wt = 0.5 * M_PI * w[a];
    double r = std::tan(0.5 * th);
    for (int k = 0; k < n_phi; ++k) {
      double ph = 2 * M_PI * k / n_phi;
      q.nodes.push_back(ChartPoint{std::polar(r, ph)});
      q.weights.push_back(scale * 0.5 * std::sin(th) * wt * 2 * M_PI / n_phi);
    }
  }
  return q;
}

// Tensor trapezoid on the box [0,L)^{2m} for the first m coordinates; the
// remaining coordinates are fixed at 0 and contribute `extra_volume`.
// `density` is the constant det(h) 2^n.
inline Quadrature periodic_box_quadrature(int n, int m, int N, double L, double density,
                                          double extra_volume = 1) {
  Quadrature q;
  q.label = "trapezoid(" + std::to_string(N) + ")^" + std::to_string(2 * m);
  int d = 2 * m;
  long total = 1;
  for (int a = 0; a < d; ++a) total *= N;
  double w = density * extra_volume * std::pow(L, d) / double(total);
  std::vector<int> idx(d, 0);
  for (long t = 0; t < total; ++t) {
    long r = t;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = int(r % N);
      r /= N;
    }
    ChartPoint p = ChartPoint::origin(n);
    for (int i = 0; i < m; ++i) p.z[i] = cplx(L * idx[2 * i] / N, L * idx[2 * i + 1] / N);
    q.nodes.push_back(p);
    q.weights.push_back(w);
  }
  return q;
}

}  // namespace hermlab
