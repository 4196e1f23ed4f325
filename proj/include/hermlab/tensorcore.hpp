#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hermlab/errors.hpp"
#include "hermlab/jet.hpp"

namespace hermlab {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

enum class IndexKind { hol_lower, hol_upper, antihol_lower, antihol_upper };

inline bool is_upper(IndexKind k) { return k == IndexKind::hol_upper || k == IndexKind::antihol_upper; }
inline bool is_hol(IndexKind k) { return k == IndexKind::hol_lower || k == IndexKind::hol_upper; }

inline IndexKind flip_holomorphy(IndexKind k) {
  switch (k) {
    case IndexKind::hol_lower: return IndexKind::antihol_lower;
    case IndexKind::hol_upper: return IndexKind::antihol_upper;
    case IndexKind::antihol_lower: return IndexKind::hol_lower;
    default: return IndexKind::hol_upper;
  }
}

inline const char* kind_name(IndexKind k) {
  switch (k) {
    case IndexKind::hol_lower: return "hol-lower";
    case IndexKind::hol_upper: return "hol-upper";
    case IndexKind::antihol_lower: return "antihol-lower";
    default: return "antihol-upper";
  }
}

// Dense row-major complex tensor whose indices carry a holomorphy/variance tag.
class ComplexTensor {
 public:
  ComplexTensor() = default;
  ComplexTensor(std::vector<int> dims, std::vector<IndexKind> kinds)
      : dims_(std::move(dims)), kinds_(std::move(kinds)) {
    if (dims_.size() != kinds_.size()) throw IndexError("dims/kinds length mismatch");
    data_.assign(product(dims_), cplx(0));
  }
  ComplexTensor(std::vector<int> dims, std::vector<IndexKind> kinds, std::vector<cplx> data)
      : ComplexTensor(std::move(dims), std::move(kinds)) {
    if (data.size() != data_.size()) throw IndexError("data length does not match dims");
    data_ = std::move(data);
  }

  static ComplexTensor from_matrix(const MatC& m, IndexKind k0, IndexKind k1) {
    ComplexTensor t({int(m.rows()), int(m.cols())}, {k0, k1});
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
    return t;
  }

  MatC to_matrix() const {
    if (rank() != 2) throw IndexError("to_matrix needs rank 2");
    MatC m(dims_[0], dims_[1]);
    for (int i = 0; i < dims_[0]; ++i)
      for (int j = 0; j < dims_[1]; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  int rank() const { return int(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<IndexKind>& kinds() const { return kinds_; }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }
  size_t size() const { return data_.size(); }

  size_t offset(const std::vector<int>& idx) const {
    if (idx.size() != dims_.size()) throw IndexError("wrong number of indices");
    size_t o = 0;
    for (size_t a = 0; a < idx.size(); ++a) {
      if (idx[a] < 0 || idx[a] >= dims_[a]) throw IndexError("index out of range");
      o = o * dims_[a] + idx[a];
    }
    return o;
  }

  template <class... I>
  cplx& operator()(I... i) {
    return data_[offset({int(i)...})];
  }
  template <class... I>
  const cplx& operator()(I... i) const {
    return data_[offset({int(i)...})];
  }
  cplx& at(const std::vector<int>& idx) { return data_[offset(idx)]; }
  const cplx& at(const std::vector<int>& idx) const { return data_[offset(idx)]; }

  // complex conjugate; holomorphic and antiholomorphic slots trade places
  ComplexTensor conj() const {
    ComplexTensor r = *this;
    for (auto& k : r.kinds_) k = flip_holomorphy(k);
    for (auto& x : r.data_) x = std::conj(x);
    return r;
  }

  friend ComplexTensor operator+(const ComplexTensor& a, const ComplexTensor& b) {
    check_same(a, b);
    ComplexTensor r = a;
    for (size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
    return r;
  }
  friend ComplexTensor operator-(const ComplexTensor& a, const ComplexTensor& b) {
    check_same(a, b);
    ComplexTensor r = a;
    for (size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
    return r;
  }
  friend ComplexTensor operator*(cplx s, const ComplexTensor& a) {
    ComplexTensor r = a;
    for (auto& x : r.data_) x *= s;
    return r;
  }

 private:
  std::vector<int> dims_;
  std::vector<IndexKind> kinds_;
  std::vector<cplx> data_{cplx(0)};

  static size_t product(const std::vector<int>& d) {
    size_t p = 1;
    for (int x : d) {
      if (x < 0) throw IndexError("negative extent");
      p *= size_t(x);
    }
    return p;
  }
  static void check_same(const ComplexTensor& a, const ComplexTensor& b) {
    if (a.dims_ != b.dims_ || a.kinds_ != b.kinds_) throw IndexError("shape or kind mismatch");
  }
};

inline double max_abs(const ComplexTensor& a) {
  double m = 0;
  for (auto& x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs(const MatC& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

// Contract index pairs (i in a, j in b).  A pair is legal when the extents
// agree and the two slots have the same holomorphy type and opposite variance,
// e.g. h^{i jbar} with h_{k jbar} over jbar.
inline ComplexTensor contract(const ComplexTensor& a, const ComplexTensor& b,
                              const std::vector<std::pair<int, int>>& pairs) {
  std::vector<char> used_a(a.rank(), 0), used_b(b.rank(), 0);
  for (auto [i, j] : pairs) {
    if (i < 0 || i >= a.rank() || j < 0 || j >= b.rank()) throw IndexError("pair index out of range");
    if (used_a[i] || used_b[j]) throw IndexError("index paired twice");
    used_a[i] = used_b[j] = 1;
    if (a.dims()[i] != b.dims()[j]) throw IndexError("extent mismatch in contraction");
    IndexKind ka = a.kinds()[i], kb = b.kinds()[j];
    if (is_hol(ka) != is_hol(kb) || is_upper(ka) == is_upper(kb)) {
      std::ostringstream os;
      os << "cannot contract " << kind_name(ka) << " with " << kind_name(kb);
      throw IndexError(os.str());
    }
  }
  std::vector<int> rd;
  std::vector<IndexKind> rk;
  std::vector<int> free_a, free_b;
  for (int i = 0; i < a.rank(); ++i)
    if (!used_a[i]) {
      free_a.push_back(i);
      rd.push_back(a.dims()[i]);
      rk.push_back(a.kinds()[i]);
    }
  for (int j = 0; j < b.rank(); ++j)
    if (!used_b[j]) {
      free_b.push_back(j);
      rd.push_back(b.dims()[j]);
      rk.push_back(b.kinds()[j]);
    }
  ComplexTensor r(rd, rk);
  std::vector<int> pd;
  for (auto [i, j] : pairs) pd.push_back(a.dims()[i]);

  std::vector<int> ia(a.rank()), ib(b.rank()), ir(r.rank()), ip(pairs.size());
  auto advance = [](std::vector<int>& idx, const std::vector<int>& ext) {
    for (int k = int(idx.size()) - 1; k >= 0; --k) {
      if (++idx[k] < ext[k]) return true;
      idx[k] = 0;
    }
    return false;
  };
  do {
    for (size_t k = 0; k < free_a.size(); ++k) ia[free_a[k]] = ir[k];
    for (size_t k = 0; k < free_b.size(); ++k) ib[free_b[k]] = ir[free_a.size() + k];
    cplx s = 0;
    std::fill(ip.begin(), ip.end(), 0);
    do {
      for (size_t k = 0; k < pairs.size(); ++k) {
        ia[pairs[k].first] = ip[k];
        ib[pairs[k].second] = ip[k];
      }
      s += a.at(ia) * b.at(ib);
    } while (!pairs.empty() && advance(ip, pd));
    r.at(ir) = s;
  } while (r.rank() > 0 && advance(ir, rd));
  return r;
}

// Hermitian matrix, symmetrized on construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const MatC& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) throw Error("HermitianMatrix must be square");
    double scale = std::max(1.0, max_abs(m));
    double dev = max_abs(MatC(m - m.adjoint()));
    if (dev > tol * scale) {
      std::ostringstream os;
      os << "matrix is not Hermitian (deviation " << dev << ")";
      throw Error(os.str());
    }
    m_ = (m + m.adjoint()) * 0.5;
  }
  static HermitianMatrix identity(int n) { return HermitianMatrix(MatC::Identity(n, n)); }

  int n() const { return int(m_.rows()); }
  const MatC& entries() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  ComplexTensor as_metric_tensor() const {
    return ComplexTensor::from_matrix(m_, IndexKind::hol_lower, IndexKind::antihol_lower);
  }

 private:
  MatC m_;
};

// Inverse via Cholesky; a failed factorization is a singular metric.
inline HermitianMatrix hermitian_inverse(const HermitianMatrix& H) {
  int n = H.n();
  Eigen::LLT<MatC> llt(H.entries());
  if (llt.info() != Eigen::Success) throw SingularMetricError("metric is not positive definite");
  const MatC& L = llt.matrixLLT();
  double dmax = 0, dmin = INFINITY;
  for (int i = 0; i < n; ++i) {
    double d = std::real(L(i, i));
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  if (!(dmin > 1e-14 * std::max(1.0, dmax))) throw SingularMetricError("metric is numerically singular");
  MatC R = llt.solve(MatC::Identity(n, n));
  return HermitianMatrix(R, 1e-8);
}

// h^{i jbar} as a tensor: the raised metric pairs with h_{k jbar} over jbar.
inline ComplexTensor inverse_metric_tensor(const HermitianMatrix& H) {
  MatC R = hermitian_inverse(H).entries();
  return ComplexTensor::from_matrix(R.transpose(), IndexKind::hol_upper, IndexKind::antihol_upper);
}

}  // namespace hermlab
