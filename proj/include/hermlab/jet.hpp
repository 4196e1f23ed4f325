#pragma once

// Truncated multivariate Taylor polynomials ("jets") with complex coefficients.
//
// A jet over the variables v_0..v_{m-1} at a base point stores the Taylor
// coefficients of a function up to a fixed total order.  Geometry code runs on
// jets whose variables are (dz^1..dz^n, dzbar^1..dzbar^n) treated as
// independent, so that differentiating a jet gives the Wirtinger derivatives
// exactly.

#include <array>
#include <atomic>
#include <cassert>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace hermlab {

using cplx = std::complex<double>;

class JetSpace {
 public:
  int nvars = 0;
  int order = 0;
  std::vector<std::vector<int>> mono;   // exponent vectors, graded by degree
  std::vector<int> deg;
  std::vector<int> prefix;              // prefix[k] = #monomials of degree <= k
  std::vector<std::array<int, 3>> mul;  // (a, b, a*b) with deg a + deg b <= order
  // dtab[v] = (src, dst, factor): coefficient of d/dv_v at monomial dst
  std::vector<std::vector<std::tuple<int, int, double>>> dtab;
  std::vector<double> factorial_weight;  // alpha! per monomial

  int size() const { return static_cast<int>(mono.size()); }

  int index(const std::vector<int>& e) const {
    auto it = lookup_.find(e);
    if (it == lookup_.end()) return -1;
    return it->second;
  }

  static const JetSpace& get(int nvars, int order) {
    // lock-free fast path for the small spaces used everywhere
    static std::atomic<const JetSpace*> fast[17][9];
    bool small = nvars >= 0 && nvars <= 16 && order >= 0 && order <= 8;
    if (small)
      if (const JetSpace* s = fast[nvars][order].load(std::memory_order_acquire)) return *s;
    const JetSpace& s = get_slow(nvars, order);
    if (small) fast[nvars][order].store(&s, std::memory_order_release);
    return s;
  }

 private:
  static const JetSpace& get_slow(int nvars, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot.reset(new JetSpace(nvars, order));
    return *slot;
  }

  std::map<std::vector<int>, int> lookup_;

  JetSpace(int nv, int ord) : nvars(nv), order(ord) {
    // degree-graded, lexicographic inside a degree; the ordering of degree <= k
    // monomials does not depend on the maximal order, so lower-order jets are
    // prefixes of higher-order ones.
    for (int d = 0; d <= ord; ++d) {
      std::vector<int> e(nv, 0);
      emit(e, 0, d);
      prefix.push_back(static_cast<int>(mono.size()));
    }
    for (int i = 0; i < size(); ++i) lookup_[mono[i]] = i;
    for (int a = 0; a < size(); ++a)
      for (int b = 0; b < size(); ++b) {
        if (deg[a] + deg[b] > ord) continue;
        std::vector<int> e(nv);
        for (int v = 0; v < nv; ++v) e[v] = mono[a][v] + mono[b][v];
        mul.push_back({a, b, lookup_.at(e)});
      }
    dtab.resize(nv);
    for (int v = 0; v < nv; ++v)
      for (int m = 0; m < size(); ++m) {
        if (deg[m] >= ord) continue;
        std::vector<int> e = mono[m];
        e[v] += 1;
        dtab[v].emplace_back(lookup_.at(e), m, double(mono[m][v] + 1));
      }
    for (auto& e : mono) {
      double f = 1;
      for (int x : e)
        for (int k = 2; k <= x; ++k) f *= k;
      factorial_weight.push_back(f);
    }
  }

  void emit(std::vector<int>& e, int v, int left) {
    if (v == nvars - 1 || nvars == 0) {
      if (nvars == 0) {
        if (left == 0) {
          mono.push_back(e);
          deg.push_back(0);
        }
        return;
      }
      e[v] = left;
      mono.push_back(e);
      int d = 0;
      for (int x : e) d += x;
      deg.push_back(d);
      e[v] = 0;
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[v] = k;
      emit(e, v + 1, left - k);
    }
    e[v] = 0;
  }
};

// A jet with a null space pointer is a plain constant that adapts to whatever
// it is combined with.
class Jet {
 public:
  Jet() : c_{cplx(0)} {}
  Jet(double v) : c_{cplx(v)} {}
  Jet(cplx v) : c_{v} {}
  Jet(const JetSpace* s, std::vector<cplx> c) : sp_(s), c_(std::move(c)) {}

  static Jet zero(const JetSpace& s) { return Jet(&s, std::vector<cplx>(s.size())); }

  static Jet variable(const JetSpace& s, int v, cplx base) {
    Jet j = zero(s);
    j.c_[0] = base;
    if (s.order >= 1) {
      std::vector<int> e(s.nvars, 0);
      e[v] = 1;
      j.c_[s.index(e)] = 1.0;
    }
    return j;
  }

  const JetSpace* space() const { return sp_; }
  bool is_constant_type() const { return sp_ == nullptr; }
  int order() const { return sp_ ? sp_->order : 1 << 20; }
  cplx val() const { return c_[0]; }
  const std::vector<cplx>& coeffs() const { return c_; }
  std::vector<cplx>& coeffs() { return c_; }

  // Taylor coefficient for exponent vector e (0 when out of range)
  cplx coef(const std::vector<int>& e) const {
    if (!sp_) {
      for (int x : e)
        if (x) return 0.0;
      return c_[0];
    }
    int i = sp_->index(e);
    return i < 0 ? cplx(0) : c_[i];
  }

  // mixed partial derivative d^e f at the base point
  cplx deriv(const std::vector<int>& e) const {
    double f = 1;
    for (int x : e)
      for (int k = 2; k <= x; ++k) f *= k;
    return f * coef(e);
  }

  // derivative wrt variable v; the result has one order less
  Jet d(int v) const {
    if (!sp_) return Jet(0.0);
    if (sp_->order == 0) return Jet(0.0);
    const JetSpace& lower = JetSpace::get(sp_->nvars, sp_->order - 1);
    Jet r = zero(lower);
    for (auto& [src, dst, f] : sp_->dtab[v]) r.c_[dst] = f * c_[src];
    return r;
  }

  Jet truncated(int ord) const {
    if (!sp_ || ord >= sp_->order) return *this;
    const JetSpace& lower = JetSpace::get(sp_->nvars, ord);
    return Jet(&lower, std::vector<cplx>(c_.begin(), c_.begin() + lower.size()));
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator-(const Jet& a) {
    Jet r = a;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (!b.sp_) {
      Jet r = a;
      r.c_[0] += b.c_[0];
      return r;
    }
    if (!a.sp_) return b + a;
    if (a.sp_ == b.sp_) {
      Jet r = a;
      for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
      return r;
    }
    auto [x, y] = align(a, b);
    for (size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
    return x;
  }

  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (!b.sp_) {
      Jet r = a;
      for (auto& x : r.c_) x *= b.c_[0];
      return r;
    }
    if (!a.sp_) return b * a;
    if (a.sp_ == b.sp_) {
      Jet r = zero(*a.sp_);
      for (auto& m : a.sp_->mul) r.c_[m[2]] += a.c_[m[0]] * b.c_[m[1]];
      return r;
    }
    auto [x, y] = align(a, b);
    Jet r = zero(*x.sp_);
    for (auto& m : x.sp_->mul) r.c_[m[2]] += x.c_[m[0]] * y.c_[m[1]];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (!b.sp_) return a * Jet(1.0 / b.c_[0]);
    return a * reciprocal(b);
  }

  // f(a) from the derivatives f^(k)(a0), k = 0..order
  friend Jet compose(const Jet& a, const std::vector<cplx>& fd) {
    if (!a.sp_) return Jet(fd[0]);
    Jet delta = a;
    delta.c_[0] = 0;
    Jet r = zero(*a.sp_);
    r.c_[0] = fd[0];
    Jet pw = delta;
    double fact = 1;
    for (int k = 1; k <= a.sp_->order && k < int(fd.size()); ++k) {
      fact *= k;
      r = r + pw * Jet(fd[k] / fact);
      pw = pw * delta;
    }
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    int K = a.order() < 64 ? a.order() : 0;
    std::vector<cplx> fd(K + 1);
    cplx x = a.val(), p = 1.0 / x;
    double s = 1;
    for (int k = 0; k <= K; ++k) {
      fd[k] = s * p;
      p /= x;
      s *= -(k + 1);
    }
    return compose(a, fd);
  }

 private:
  const JetSpace* sp_ = nullptr;
  std::vector<cplx> c_;

  static std::pair<Jet, Jet> align(const Jet& a, const Jet& b) {
    if (a.sp_->nvars != b.sp_->nvars) throw std::logic_error("jet variable count mismatch");
    int o = std::min(a.sp_->order, b.sp_->order);
    return {a.truncated(o), b.truncated(o)};
  }
};

inline int jet_order_cap(const Jet& a) { return a.order() < 64 ? a.order() : 0; }

inline Jet exp(const Jet& a) {
  std::vector<cplx> fd(jet_order_cap(a) + 1, std::exp(a.val()));
  return compose(a, fd);
}

inline Jet log(const Jet& a) {
  int K = jet_order_cap(a);
  std::vector<cplx> fd(K + 1);
  cplx x = a.val();
  fd[0] = std::log(x);
  double f = 1;
  cplx p = 1.0 / x;
  for (int k = 1; k <= K; ++k) {
    fd[k] = ((k % 2) ? 1.0 : -1.0) * f * p;
    f *= k;
    p /= x;
  }
  return compose(a, fd);
}

inline Jet pow(const Jet& a, double e) {
  int K = jet_order_cap(a);
  std::vector<cplx> fd(K + 1);
  cplx x = a.val();
  double c = 1;
  for (int k = 0; k <= K; ++k) {
    fd[k] = c * std::pow(x, e - k);
    c *= (e - k);
  }
  return compose(a, fd);
}

inline Jet sqrt(const Jet& a) { return pow(a, 0.5); }

inline Jet sin(const Jet& a) {
  int K = jet_order_cap(a);
  std::vector<cplx> fd(K + 1);
  cplx s = std::sin(a.val()), c = std::cos(a.val());
  const cplx cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= K; ++k) fd[k] = cyc[k % 4];
  return compose(a, fd);
}

inline Jet cos(const Jet& a) {
  int K = jet_order_cap(a);
  std::vector<cplx> fd(K + 1);
  cplx s = std::sin(a.val()), c = std::cos(a.val());
  const cplx cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= K; ++k) fd[k] = cyc[k % 4];
  return compose(a, fd);
}

// arcsin; derivatives of (1 - x^2)^(-1/2) written out through fourth order
inline Jet asin(const Jet& a) {
  int K = jet_order_cap(a);
  if (K > 4) throw std::domain_error("asin jet order > 4");
  cplx x = a.val();
  cplx w = 1.0 - x * x;
  std::vector<cplx> fd = {std::asin(x), std::pow(w, -0.5), x * std::pow(w, -1.5),
                          (1.0 + 2.0 * x * x) * std::pow(w, -2.5),
                          3.0 * x * (3.0 + 2.0 * x * x) * std::pow(w, -3.5)};
  fd.resize(K + 1);
  return compose(a, fd);
}

// complex conjugate of a function of (z, zbar): swaps the z and zbar exponent
// blocks and conjugates the coefficients.  Requires nvars = 2n.
inline Jet conj_fn(const Jet& a) {
  const JetSpace* s = a.space();
  if (!s) return Jet(std::conj(a.val()));
  int n = s->nvars / 2;
  Jet r = Jet::zero(*s);
  for (int m = 0; m < s->size(); ++m) {
    std::vector<int> e(s->nvars);
    for (int i = 0; i < n; ++i) {
      e[i] = s->mono[m][n + i];
      e[n + i] = s->mono[m][i];
    }
    r.coeffs()[s->index(e)] = std::conj(a.coeffs()[m]);
  }
  return r;
}

// substitute each variable v by images[v] (jets with zero constant term)
inline Jet substitute(const Jet& poly, const std::vector<Jet>& images, const JetSpace& target) {
  const JetSpace* s = poly.space();
  if (!s) return Jet(poly.val());
  int K = s->order;
  std::vector<std::vector<Jet>> pw(s->nvars);
  for (int v = 0; v < s->nvars; ++v) {
    pw[v].push_back(Jet(1.0));
    for (int k = 1; k <= K; ++k) pw[v].push_back(pw[v].back() * images[v]);
  }
  Jet r = Jet::zero(target);
  for (int m = 0; m < s->size(); ++m) {
    cplx c = poly.coeffs()[m];
    if (c == cplx(0)) continue;
    Jet t(c);
    for (int v = 0; v < s->nvars; ++v)
      if (s->mono[m][v]) t = t * pw[v][s->mono[m][v]];
    r = r + t;
  }
  return r;
}

}  // namespace hermlab
