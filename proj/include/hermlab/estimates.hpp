#pragma once

// Closed-form pieces of the eigenvalue estimates: the Li-Yau type bound and
// its gradient estimates, and the Zhong-Yang comparison function psi with
// the series built from it.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <mutex>
#include <vector>

#include "hermlab/errors.hpp"

namespace hermlab {

struct LiYauBound {
  double bound = 0;        // e^{-alpha} (alpha^2 / (2(3n-2)D^2) - K)
  double a = 0;            // maximizing a = 1/(1 - e^{-alpha})
  double alpha = 0;        // 1 + sqrt(1 + 2(3n-2) K D^2)
  double closed_form = 0;  // 2/((3n-2) e^2 D^2), the K = 0 value
};

inline void require_liyau_args(int n, double K, double D) {
  if (n < 3) throw ConfigError("the Li-Yau estimate needs complex dimension n >= 3");
  if (!(K >= 0)) throw ConfigError("Li-Yau lower Ricci constant K must be >= 0");
  if (!(D > 0)) throw ConfigError("diameter must be positive");
}

// lower bound for lambda_1 at a given a > 1:
//   ((a-1)/a) (log(a/(a-1))^2 / (2(3n-2)D^2) - K)
inline double liyau_bound_at(int n, double K, double D, double a) {
  require_liyau_args(n, K, D);
  if (!(a > 1)) throw ConfigError("Li-Yau parameter a must exceed 1");
  double L = std::log(a / (a - 1));
  return (a - 1) / a * (L * L / (2 * (3 * n - 2) * D * D) - K);
}

inline LiYauBound liyau_bound(int n, double K, double D) {
  require_liyau_args(n, K, D);
  LiYauBound r;
  double m = 3.0 * n - 2;
  r.alpha = 1 + std::sqrt(1 + 2 * m * K * D * D);
  double e = std::exp(-r.alpha);
  r.a = 1 / (1 - e);
  r.bound = e * (r.alpha * r.alpha / (2 * m * D * D) - K);
  r.closed_form = 2 / (m * std::exp(2.0) * D * D);
  return r;
}

// P at its maximum point: 3(n-1)K + (3n-2) a lambda/(a+u) - lambda
inline double liyau_pmax_bound(int n, double K, double a, double lambda, double u) {
  if (!(a > 1)) throw ConfigError("Li-Yau parameter a must exceed 1");
  return 3.0 * (n - 1) * K + (3.0 * n - 2) * a * lambda / (a + u) - lambda;
}

// uniform gradient estimate sup |d log(a+u)|^2 <= (3n-2)(K + a lambda/(a-1))
inline double liyau_gradient_bound(int n, double K, double a, double lambda) {
  if (!(a > 1)) throw ConfigError("Li-Yau parameter a must exceed 1");
  return (3.0 * n - 2) * (K + a * lambda / (a - 1));
}

// Inputs of the lower estimate for tr(i ddbar P) at a point.
struct LiYauHessianInputs {
  int n = 3;
  double ric_vv = 0;  // Ric^{SB,C}(V, Vbar)
  double P = 0;       // |d v|^2, must be > 0
  double lambda = 0;
  double a = 2;
  double u = 0;
  double grad_p2 = 0;        // |d P|^2
  double re_dp_dv = 0;       // Re <dP, dv>
};

// right-hand side of
//  tr(i ddbar P) >= Ric(V,Vbar) + P^2/(3(n-1))
//    + (lambda/(3(n-1)) - (3n-2)/(3(n-1)) a lambda/(a+u)) P + |dP|^2/(4P)
//    + (2/(n-1)) ((2-n)P + lambda/2 - a lambda/(2(a+u))) Re<dP,dv>/P
inline double liyau_hessian_lower(const LiYauHessianInputs& x) {
  if (x.n < 3) throw ConfigError("the Li-Yau Hessian estimate needs n >= 3");
  if (!(x.P > 0)) throw ConfigError("P must be positive");
  if (!(x.a > 1)) throw ConfigError("Li-Yau parameter a must exceed 1");
  double n = x.n, c = 3 * (n - 1);
  double q = x.a * x.lambda / (x.a + x.u);
  return x.ric_vv + x.P * x.P / c + (x.lambda / c - (3 * n - 2) / c * q) * x.P + x.grad_p2 / (4 * x.P) +
         (2 / (n - 1)) * ((2 - n) * x.P + x.lambda / 2 - q / 2) * x.re_dp_dv / x.P;
}

namespace detail {

// g(t) = t - sin(2t)/2, by its Taylor series for small t
inline double psi_g(double t) {
  if (t > 0.25) return t - 0.5 * std::sin(2 * t);
  double x = 2 * t, x2 = x * x, term = x * x2 / 6, s = 0;
  for (int k = 1; k < 30 && std::abs(term) > 1e-300; ++k) {
    s += term;
    term *= -x2 / ((2.0 * k + 2) * (2.0 * k + 3));
  }
  return 0.5 * s;
}

}  // namespace detail

// psi(theta) = ((4/pi)(theta + cos sin) - 2 sin)/cos^2 on [-pi/2, pi/2],
// psi(+-pi/2) = +-1.  Near the endpoints the formula is rewritten in
// t = pi/2 - |theta| as (4 sin^2(t/2) - (4/pi) g(t)) / sin^2 t.
inline double zhongyang_psi(double theta) {
  const double h = M_PI / 2;
  if (!(std::abs(theta) <= h + 1e-15)) throw ConfigError("psi is defined on [-pi/2, pi/2]");
  if (std::abs(theta) <= M_PI / 4) {
    double c = std::cos(theta), s = std::sin(theta);
    return ((4 / M_PI) * (theta + c * s) - 2 * s) / (c * c);
  }
  double t = std::max(0.0, h - std::abs(theta));
  double sgn = theta < 0 ? -1 : 1;
  if (t == 0) return sgn;
  double st = std::sin(t), sh = std::sin(t / 2);
  return sgn * (4 * sh * sh - (4 / M_PI) * detail::psi_g(t)) / (st * st);
}

// C_k = (2/pi) int_0^{pi/2} psi^{2k}, cached
inline double zhongyang_coefficient(int k) {
  static std::mutex mu;
  static std::vector<double> cache;
  if (k < 1) throw ConfigError("series coefficient index starts at 1");
  std::lock_guard<std::mutex> lock(mu);
  while (int(cache.size()) < k) {
    int kk = int(cache.size()) + 1;
    auto f = [kk](double th) { return std::pow(zhongyang_psi(th), 2 * kk); };
    double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, M_PI / 2, 15, 1e-14);
    cache.push_back(2 / M_PI * I);
  }
  return cache[k - 1];
}

// pi (1 + sum_{k<=terms} [(4k-1)!!/(4k)!!] C_k b^{2k})
inline double zhongyang_series(double b, int terms) {
  if (!(b >= 0 && b < 1)) throw ConfigError("series parameter b must lie in [0, 1)");
  if (terms < 0) throw ConfigError("number of series terms must be >= 0");
  double s = 1, ratio = 1, b2k = 1;
  for (int k = 1; k <= terms; ++k) {
    ratio *= (4.0 * k - 3) / (4.0 * k - 2) * (4.0 * k - 1) / (4.0 * k);
    b2k *= b * b;
    if (b2k == 0) break;
    s += ratio * zhongyang_coefficient(k) * b2k;
  }
  return M_PI * s;
}

}  // namespace hermlab
