#pragma once

// (p,q)-forms with jet coefficients.  A term is stored under (I, J) bit masks
// and means  c * dz^I ^ dzbar^J  with both multi-indices increasing, so
// antisymmetry is exact by construction.

#include <bit>
#include <map>
#include <utility>

#include "hermlab/connections.hpp"

namespace hermlab {

using FormKey = std::pair<unsigned, unsigned>;

struct Form {
  int n = 0;
  std::map<FormKey, Jet> c;

  Form() = default;
  explicit Form(int n_) : n(n_) {}

  static Form scalar(int n, const Jet& f) {
    Form r(n);
    r.c[{0u, 0u}] = f;
    return r;
  }
  // f dz^i  /  f dzbar^i
  static Form dz(int n, int i, const Jet& f = Jet(1.0)) {
    Form r(n);
    r.c[{1u << i, 0u}] = f;
    return r;
  }
  static Form dzbar(int n, int i, const Jet& f = Jet(1.0)) {
    Form r(n);
    r.c[{0u, 1u << i}] = f;
    return r;
  }

  Jet get(unsigned I, unsigned J) const {
    auto it = c.find({I, J});
    return it == c.end() ? Jet(0.0) : it->second;
  }
  cplx value(unsigned I, unsigned J) const { return get(I, J).val(); }

  void add(unsigned I, unsigned J, const Jet& v) {
    auto it = c.find({I, J});
    if (it == c.end())
      c.emplace(FormKey{I, J}, v);
    else
      it->second += v;
  }

  // bidegree of the terms; (-1,-1) for the zero form, throws if mixed
  std::pair<int, int> bidegree() const {
    std::pair<int, int> b{-1, -1};
    for (auto& [k, v] : c) {
      std::pair<int, int> d{std::popcount(k.first), std::popcount(k.second)};
      if (b.first < 0)
        b = d;
      else if (b != d)
        throw Error("form has mixed bidegree");
    }
    return b;
  }

  friend Form operator+(Form a, const Form& b) {
    if (a.n == 0) a.n = b.n;
    for (auto& [k, v] : b.c) a.add(k.first, k.second, v);
    return a;
  }
  friend Form operator-(const Form& a, const Form& b) { return a + Jet(-1.0) * b; }
  friend Form operator*(const Jet& s, Form a) {
    for (auto& [k, v] : a.c) v = s * v;
    return a;
  }

  // max |coefficient value|
  double max_abs_value() const {
    double m = 0;
    for (auto& [k, v] : c) m = std::max(m, std::abs(v.val()));
    return m;
  }
};

namespace detail {

inline int below(unsigned mask, int i) { return std::popcount(mask & ((1u << i) - 1u)); }
inline double parity(int k) { return (k & 1) ? -1.0 : 1.0; }

// sign of sorting the concatenation A,B (both increasing); 0 if they overlap
inline double merge_sign(unsigned A, unsigned B) {
  if (A & B) return 0;
  int inv = 0;
  for (unsigned b = B; b; b &= b - 1) {
    int i = std::countr_zero(b);
    inv += std::popcount(A >> (i + 1));
  }
  return parity(inv);
}

}  // namespace detail

inline Form wedge(const Form& a, const Form& b) {
  Form r(std::max(a.n, b.n));
  for (auto& [ka, va] : a.c)
    for (auto& [kb, vb] : b.c) {
      double s = detail::merge_sign(ka.first, kb.first) * detail::merge_sign(ka.second, kb.second);
      if (s == 0) continue;
      s *= detail::parity(std::popcount(ka.second) * std::popcount(kb.first));
      r.add(ka.first | kb.first, ka.second | kb.second, Jet(s) * va * vb);
    }
  return r;
}

// interior product with d/dz^i
inline Form iota_hol(const Form& a, int i) {
  Form r(a.n);
  for (auto& [k, v] : a.c)
    if (k.first >> i & 1u) r.add(k.first & ~(1u << i), k.second, Jet(detail::parity(detail::below(k.first, i))) * v);
  return r;
}

// interior product with d/dzbar^i
inline Form iota_antihol(const Form& a, int i) {
  Form r(a.n);
  for (auto& [k, v] : a.c)
    if (k.second >> i & 1u) {
      double s = detail::parity(std::popcount(k.first) + detail::below(k.second, i));
      r.add(k.first, k.second & ~(1u << i), Jet(s) * v);
    }
  return r;
}

// d-bar-free exterior derivatives; coefficient jets lose one order
inline Form del(const Form& a) {
  Form r(a.n);
  for (auto& [k, v] : a.c)
    for (int i = 0; i < a.n; ++i) {
      if (k.first >> i & 1u) continue;
      r.add(k.first | (1u << i), k.second, Jet(detail::parity(detail::below(k.first, i))) * v.d(i));
    }
  return r;
}

inline Form dbar(const Form& a) {
  Form r(a.n);
  for (auto& [k, v] : a.c)
    for (int i = 0; i < a.n; ++i) {
      if (k.second >> i & 1u) continue;
      double s = detail::parity(std::popcount(k.first) + detail::below(k.second, i));
      r.add(k.first, k.second | (1u << i), Jet(s) * v.d(a.n + i));
    }
  return r;
}

// complex conjugate: conj(f dz^I ^ dzbar^J) = (-1)^{|I||J|} conj(f) dz^J ^ dzbar^I
inline Form conj(const Form& a) {
  Form r(a.n);
  for (auto& [k, v] : a.c) {
    double s = detail::parity(std::popcount(k.first) * std::popcount(k.second));
    r.add(k.second, k.first, Jet(s) * conj_fn(v));
  }
  return r;
}

// Lambda = -i h^{i jbar} iota_{jbar} iota_i; gives Lambda(omega) = n
inline Form lambda(const Form& a, const JetMat& hu) {
  Form r(a.n);
  for (int i = 0; i < a.n; ++i) {
    Form ai = iota_hol(a, i);
    if (ai.c.empty()) continue;
    for (int j = 0; j < a.n; ++j) {
      Form aij = iota_antihol(ai, j);
      if (aij.c.empty()) continue;
      r = r + (Jet(cplx(0, -1)) * hu(i, j)) * aij;
    }
  }
  return r;
}

// omega = i h_{i jbar} dz^i ^ dzbar^j
inline Form omega_form(const LocalMetric& g) {
  Form r(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) r.add(1u << i, 1u << j, Jet(cplx(0, 1)) * g.h(i, j));
  return r;
}

inline Form power(const Form& a, int k) {
  Form r = Form::scalar(a.n, Jet(1.0));
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

// tau f = [Lambda, d omega] f  with d omega the (2,1)-part (del omega)
inline Form tau(const Form& f, const Form& del_omega, const JetMat& hu) {
  return lambda(wedge(del_omega, f), hu) - wedge(del_omega, lambda(f, hu));
}

namespace detail {

// determinant of hu restricted to rows R, columns C (same popcount)
inline cplx minor_det(const MatC& hu, unsigned R, unsigned C) {
  int k = std::popcount(R);
  if (k != std::popcount(C)) return 0.0;
  if (k == 0) return 1.0;
  MatC m(k, k);
  int a = 0;
  for (unsigned r = R; r; r &= r - 1, ++a) {
    int b = 0;
    for (unsigned c = C; c; c &= c - 1, ++b) m(a, b) = hu(std::countr_zero(r), std::countr_zero(c));
  }
  return m.determinant();
}

}  // namespace detail

// pointwise <a, b>: <dz^I^dzbar^J, dz^K^dzbar^L> = det[h^{i kbar}]_{I,K} det[h^{l jbar}]_{L,J}
// with hu(i,k) = h^{i kbar}; linear in a, conjugate-linear in b
inline cplx pointwise_inner(const Form& a, const Form& b, const MatC& hu) {
  cplx s = 0;
  for (auto& [ka, va] : a.c)
    for (auto& [kb, vb] : b.c) {
      if (std::popcount(ka.first) != std::popcount(kb.first) ||
          std::popcount(ka.second) != std::popcount(kb.second))
        continue;
      cplx w = detail::minor_det(hu, ka.first, kb.first) * detail::minor_det(hu, kb.second, ka.second);
      s += va.val() * std::conj(vb.val()) * w;
    }
  return s;
}

// coefficient of a (1,1)-form: beta = b_{i jbar} dz^i ^ dzbar^j
inline MatC coefficients11(const Form& a) {
  MatC m = MatC::Zero(a.n, a.n);
  for (auto& [k, v] : a.c) {
    if (std::popcount(k.first) != 1 || std::popcount(k.second) != 1) throw Error("not a (1,1)-form");
    m(std::countr_zero(k.first), std::countr_zero(k.second)) += v.val();
  }
  return m;
}

inline Form form11(const MatC& b) {
  Form r(int(b.rows()));
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j)
      if (b(i, j) != cplx(0)) r.add(1u << i, 1u << j, Jet(b(i, j)));
  return r;
}

}  // namespace hermlab
