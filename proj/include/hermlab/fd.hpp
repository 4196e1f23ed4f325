#pragma once

// Finite-difference jets: mixed partials in the underlying real coordinates
// from tensor products of 4th-order central stencils, re-expanded in the
// Wirtinger variables (dz, dzbar).

#include <functional>
#include <map>
#include <vector>

#include "hermlab/jet.hpp"

namespace hermlab {

struct Stencil1D {
  std::vector<int> off;
  std::vector<double> w;
};

// d^k/dx^k with O(h^4) truncation error, weights for unit step
inline const Stencil1D& central_stencil(int k) {
  static const Stencil1D s[5] = {
      {{0}, {1.0}},
      {{-2, -1, 1, 2}, {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12}},
      {{-2, -1, 0, 1, 2}, {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}},
      {{-3, -2, -1, 1, 2, 3}, {1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8}},
      {{-3, -2, -1, 0, 1, 2, 3}, {-1.0 / 6, 2.0, -6.5, 28.0 / 3, -6.5, 2.0, -1.0 / 6}},
  };
  if (k < 0 || k > 4) throw std::domain_error("stencil order must be 0..4");
  return s[k];
}

inline int stencil_radius(int order) { return order <= 2 ? 2 : 3; }

// f maps real coordinates (x1,y1,...,xn,yn) to a vector of m complex values.
// Returns m jets in the 2n Wirtinger variables, truncated at `order`.
inline std::vector<Jet> fd_wirtinger_jets(
    const std::function<std::vector<cplx>(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const std::vector<double>& step, int order) {
  int d = int(x0.size());
  int n = d / 2;
  const JetSpace& real_space = JetSpace::get(d, order);
  const JetSpace& wsp = JetSpace::get(d, order);
  std::map<std::vector<int>, std::vector<cplx>> cache;
  auto sample = [&](const std::vector<int>& o) -> const std::vector<cplx>& {
    auto it = cache.find(o);
    if (it != cache.end()) return it->second;
    std::vector<double> x = x0;
    for (int a = 0; a < d; ++a) x[a] += o[a] * step[a];
    return cache.emplace(o, f(x)).first->second;
  };
  size_t m = sample(std::vector<int>(d, 0)).size();
  std::vector<std::vector<cplx>> coef(m, std::vector<cplx>(real_space.size()));

  for (int mi = 0; mi < real_space.size(); ++mi) {
    const auto& alpha = real_space.mono[mi];
    std::vector<int> dims, pos;
    for (int a = 0; a < d; ++a)
      if (alpha[a]) dims.push_back(a);
    double scale = real_space.factorial_weight[mi];
    for (int a : dims) scale *= std::pow(step[a], alpha[a]);
    std::vector<cplx> acc(m, 0.0);
    pos.assign(dims.size(), 0);
    while (true) {
      std::vector<int> o(d, 0);
      double w = 1;
      for (size_t k = 0; k < dims.size(); ++k) {
        const auto& st = central_stencil(alpha[dims[k]]);
        o[dims[k]] = st.off[pos[k]];
        w *= st.w[pos[k]];
      }
      const auto& v = sample(o);
      for (size_t c = 0; c < m; ++c) acc[c] += w * v[c];
      size_t k = 0;
      for (; k < dims.size(); ++k) {
        if (++pos[k] < int(central_stencil(alpha[dims[k]]).off.size())) break;
        pos[k] = 0;
      }
      if (k == dims.size()) break;
    }
    for (size_t c = 0; c < m; ++c) coef[c][mi] = acc[c] / scale;
  }

  // x = x0 + (dz + dzbar)/2,  y = y0 + (dz - dzbar)/(2i)
  std::vector<Jet> img(d);
  for (int i = 0; i < n; ++i) {
    Jet dz = Jet::variable(wsp, i, 0.0), dzb = Jet::variable(wsp, n + i, 0.0);
    img[2 * i] = (dz + dzb) * Jet(0.5);
    img[2 * i + 1] = (dz - dzb) * Jet(cplx(0, -0.5));
  }
  std::vector<Jet> out;
  for (size_t c = 0; c < m; ++c) out.push_back(substitute(Jet(&real_space, coef[c]), img, wsp));
  return out;
}

}  // namespace hermlab
