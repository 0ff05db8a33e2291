#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "matpres/complexval.hpp"
#include "matpres/errors.hpp"
#include "matpres/exact.hpp"

namespace matpres {

template <class R>
class DenseMat;

/// Hermitian m x m matrix over Cplx<R>, Hermitian by construction: only the
/// strict lower triangle and the (real) diagonal are stored, so the invariant
/// M = M* cannot be violated by arithmetic. Indices are 0-based in code;
/// serialized formats are 1-based.
template <class R>
class HermMatrix {
 public:
  HermMatrix() : m_(0) {}
  explicit HermMatrix(int m)
      : m_(m), diag_(m, scalar_traits<R>::zero()), low_(m * (m - 1) / 2) {
    if (m <= 0) throw DimensionError("matrix dimension must be positive");
  }

  int dim() const { return m_; }

  /// Entry (i, j), reconstructing the upper triangle by conjugation.
  Cplx<R> at(int i, int j) const {
    check_index(i, j);
    if (i == j) return Cplx<R>(diag_[i]);
    if (i > j) return low_[low_index(i, j)];
    return low_[low_index(j, i)].conj();
  }

  const R& diag(int i) const {
    check_index(i, i);
    return diag_[i];
  }
  void set_diag(int i, R v) {
    check_index(i, i);
    diag_[i] = std::move(v);
  }
  /// Set the (i, j) entry with i > j; the mirror entry follows implicitly.
  void set_lower(int i, int j, Cplx<R> z) {
    check_index(i, j);
    if (i <= j) throw DimensionError("set_lower requires i > j");
    low_[low_index(i, j)] = std::move(z);
  }

  bool is_zero() const {
    for (const auto& d : diag_)
      if (!scalar_traits<R>::is_zero(d)) return false;
    for (const auto& z : low_)
      if (!z.is_zero()) return false;
    return true;
  }

  HermMatrix operator-() const {
    HermMatrix r(*this);
    for (auto& d : r.diag_) d = -d;
    for (auto& z : r.low_) z = -z;
    return r;
  }
  HermMatrix& operator+=(const HermMatrix& o) {
    check_same(o);
    for (int i = 0; i < m_; ++i) diag_[i] += o.diag_[i];
    for (size_t k = 0; k < low_.size(); ++k) low_[k] += o.low_[k];
    return *this;
  }
  HermMatrix& operator-=(const HermMatrix& o) {
    check_same(o);
    for (int i = 0; i < m_; ++i) diag_[i] -= o.diag_[i];
    for (size_t k = 0; k < low_.size(); ++k) low_[k] -= o.low_[k];
    return *this;
  }
  /// Scaling by a *real* scalar (complex scaling would break Hermiticity).
  HermMatrix& operator*=(const R& s) {
    for (auto& d : diag_) d = d * s;
    for (auto& z : low_) z *= s;
    return *this;
  }
  friend HermMatrix operator+(HermMatrix x, const HermMatrix& y) { return x += y; }
  friend HermMatrix operator-(HermMatrix x, const HermMatrix& y) { return x -= y; }
  friend HermMatrix operator*(HermMatrix x, const R& s) { return x *= s; }
  friend HermMatrix operator*(const R& s, HermMatrix x) { return x *= s; }
  friend bool operator==(const HermMatrix& x, const HermMatrix& y) {
    return x.m_ == y.m_ && x.diag_ == y.diag_ && x.low_ == y.low_;
  }
  friend bool operator!=(const HermMatrix& x, const HermMatrix& y) { return !(x == y); }

  R trace() const {
    R t = scalar_traits<R>::zero();
    for (const auto& d : diag_) t += d;
    return t;
  }

  double max_abs() const {
    double mx = 0.0;
    for (const auto& d : diag_) mx = std::max(mx, std::abs(scalar_traits<R>::to_double(d)));
    for (const auto& z : low_) mx = std::max(mx, cplx_abs(z));
    return mx;
  }

 private:
  void check_index(int i, int j) const {
    if (i < 0 || j < 0 || i >= m_ || j >= m_)
      throw DimensionError("matrix index out of range");
  }
  void check_same(const HermMatrix& o) const {
    if (m_ != o.m_) throw DimensionError("matrix dimension mismatch");
  }
  static size_t low_index(int i, int j) {
    return static_cast<size_t>(i) * (i - 1) / 2 + j;
  }

  int m_;
  std::vector<R> diag_;          // real diagonal
  std::vector<Cplx<R>> low_;     // strict lower triangle, row-major
};

template <class R>
HermMatrix<R> herm_zero(int m) {
  return HermMatrix<R>(m);
}

template <class R>
HermMatrix<R> herm_identity(int m) {
  HermMatrix<R> r(m);
  for (int i = 0; i < m; ++i) r.set_diag(i, scalar_traits<R>::one());
  return r;
}

/// Orthonormal Hermitian basis element H_{k,l} (0-based):
///   k <  l : (E_kl + E_lk)/sqrt2        (symmetric)
///   k == l : E_kk                       (diagonal)
///   k >  l : i (E_kl - E_lk)/sqrt2      (antisymmetric)
template <class R>
HermMatrix<R> basis_element(int m, int k, int l) {
  if (k < 0 || l < 0 || k >= m || l >= m)
    throw DimensionError("basis_element index out of range");
  HermMatrix<R> r(m);
  R h = scalar_traits<R>::inv_sqrt2();
  if (k == l)
    r.set_diag(k, scalar_traits<R>::one());
  else if (k < l)
    r.set_lower(l, k, Cplx<R>(h));  // entry (l,k) of (E_kl+E_lk)/sqrt2 is 1/sqrt2
  else
    r.set_lower(k, l, Cplx<R>(scalar_traits<R>::zero(), h));  // entry (k,l) is i/sqrt2
  return r;
}

/// Real trace pairing <A,B> = tr(AB); real by Hermiticity, computed without
/// complex round trips.
template <class R>
R inner_product(const HermMatrix<R>& a, const HermMatrix<R>& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner_product dimension mismatch");
  R s = scalar_traits<R>::zero();
  for (int i = 0; i < a.dim(); ++i) s += a.diag(i) * b.diag(i);
  R two = scalar_traits<R>::from_int(2);
  for (int i = 1; i < a.dim(); ++i)
    for (int j = 0; j < i; ++j) {
      Cplx<R> x = a.at(i, j), y = b.at(i, j);
      // pair (i,j)+(j,i): 2 Re(a_ij conj(b_ij))
      s += two * (x.re * y.re + x.im * y.im);
    }
  return s;
}

/// Coordinates in the H_{k,l} basis, flattened row-major: c[k*m+l] = <M, H_kl>.
/// Diagonal slots give M_kk, (k<l) slots sqrt2*Re M_kl, (k>l) slots sqrt2*Im M_kl.
template <class R>
std::vector<R> to_coords(const HermMatrix<R>& mat) {
  int m = mat.dim();
  R rt2 = scalar_traits<R>::inv_sqrt2() * scalar_traits<R>::from_int(2);  // sqrt2
  std::vector<R> c(static_cast<size_t>(m) * m, scalar_traits<R>::zero());
  for (int k = 0; k < m; ++k) c[static_cast<size_t>(k) * m + k] = mat.diag(k);
  for (int i = 1; i < m; ++i)
    for (int j = 0; j < i; ++j) {
      Cplx<R> z = mat.at(i, j);  // lower entry, i > j
      c[static_cast<size_t>(j) * m + i] = rt2 * z.re;  // H_{j,i}, j < i: sym slot
      c[static_cast<size_t>(i) * m + j] = rt2 * z.im;  // H_{i,j}, i > j: antisym slot
    }
  return c;
}

template <class R>
HermMatrix<R> from_coords(int m, const std::vector<R>& c) {
  if (c.size() != static_cast<size_t>(m) * m)
    throw DimensionError("from_coords: need m^2 coordinates");
  HermMatrix<R> r(m);
  R h = scalar_traits<R>::inv_sqrt2();
  for (int k = 0; k < m; ++k) r.set_diag(k, c[static_cast<size_t>(k) * m + k]);
  for (int i = 1; i < m; ++i)
    for (int j = 0; j < i; ++j)
      r.set_lower(i, j,
                  Cplx<R>(c[static_cast<size_t>(j) * m + i] * h,
                          c[static_cast<size_t>(i) * m + j] * h));
  return r;
}

/// General (not necessarily Hermitian) complex m x m matrix; the workhorse for
/// products, Hermiticity checks at trust boundaries, and Choi matrices.
template <class R>
class DenseMat {
 public:
  DenseMat() : m_(0) {}
  explicit DenseMat(int m) : m_(m), e_(static_cast<size_t>(m) * m) {
    if (m <= 0) throw DimensionError("matrix dimension must be positive");
  }
  explicit DenseMat(const HermMatrix<R>& h) : DenseMat(h.dim()) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) at(i, j) = h.at(i, j);
  }

  int dim() const { return m_; }
  Cplx<R>& at(int i, int j) { return e_[static_cast<size_t>(i) * m_ + j]; }
  const Cplx<R>& at(int i, int j) const { return e_[static_cast<size_t>(i) * m_ + j]; }

  DenseMat& operator+=(const DenseMat& o) {
    for (size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
    return *this;
  }
  DenseMat& operator-=(const DenseMat& o) {
    for (size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
    return *this;
  }
  DenseMat& operator*=(const Cplx<R>& s) {
    for (auto& z : e_) z *= s;
    return *this;
  }
  friend DenseMat operator+(DenseMat x, const DenseMat& y) { return x += y; }
  friend DenseMat operator-(DenseMat x, const DenseMat& y) { return x -= y; }
  friend bool operator==(const DenseMat& x, const DenseMat& y) {
    return x.m_ == y.m_ && x.e_ == y.e_;
  }

  friend DenseMat operator*(const DenseMat& x, const DenseMat& y) {
    if (x.m_ != y.m_) throw DimensionError("matrix product dimension mismatch");
    DenseMat r(x.m_);
    for (int i = 0; i < x.m_; ++i)
      for (int k = 0; k < x.m_; ++k) {
        const Cplx<R>& xik = x.at(i, k);
        if (xik.is_zero()) continue;
        for (int j = 0; j < x.m_; ++j) r.at(i, j) += xik * y.at(k, j);
      }
    return r;
  }

  /// max_ij |M_ij - conj(M_ji)| — zero iff Hermitian.
  double hermitian_defect() const {
    double mx = 0.0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j) {
        Cplx<R> d = at(i, j) - at(j, i).conj();
        mx = std::max(mx, cplx_abs(d));
      }
    return mx;
  }

  bool is_hermitian_exact() const {
    for (int i = 0; i < m_; ++i) {
      if (!scalar_traits<R>::is_zero(at(i, i).im)) return false;
      for (int j = 0; j < i; ++j)
        if (at(i, j) != at(j, i).conj()) return false;
    }
    return true;
  }

  /// Reinterpret as HermMatrix, requiring the defect be within tol; reports
  /// the offending entry otherwise.
  HermMatrix<R> to_hermitian(double tol) const {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j <= i; ++j) {
        Cplx<R> d = at(i, j) - at(j, i).conj();
        if (cplx_abs(d) > tol)
          throw ValidationError("Hermitian defect " + std::to_string(cplx_abs(d)) +
                                " above tolerance at entry (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + ")");
      }
    HermMatrix<R> r(m_);
    for (int i = 0; i < m_; ++i) r.set_diag(i, at(i, i).re);
    for (int i = 1; i < m_; ++i)
      for (int j = 0; j < i; ++j) r.set_lower(i, j, at(i, j));
    return r;
  }

 private:
  int m_;
  std::vector<Cplx<R>> e_;
};

template <class R>
DenseMat<R> dense_mul(const HermMatrix<R>& a, const HermMatrix<R>& b) {
  return DenseMat<R>(a) * DenseMat<R>(b);
}

/// Complex column vector over R.
template <class R>
using CVec = std::vector<Cplx<R>>;

/// Rank-one Hermitian v v*.
template <class R>
HermMatrix<R> outer(const CVec<R>& v) {
  int m = static_cast<int>(v.size());
  HermMatrix<R> r(m);
  for (int i = 0; i < m; ++i)
    r.set_diag(i, v[i].re * v[i].re + v[i].im * v[i].im);
  for (int i = 1; i < m; ++i)
    for (int j = 0; j < i; ++j) r.set_lower(i, j, v[i] * v[j].conj());
  return r;
}

/// v* M v — real for Hermitian M.
template <class R>
R quad_form(const HermMatrix<R>& mat, const CVec<R>& v) {
  if (static_cast<int>(v.size()) != mat.dim())
    throw DimensionError("quad_form dimension mismatch");
  R s = scalar_traits<R>::zero();
  for (int i = 0; i < mat.dim(); ++i)
    s += mat.diag(i) * (v[i].re * v[i].re + v[i].im * v[i].im);
  R two = scalar_traits<R>::from_int(2);
  for (int i = 1; i < mat.dim(); ++i)
    for (int j = 0; j < i; ++j) {
      // conj(v_i) M_ij v_j + conj(v_j) M_ji v_i = 2 Re(conj(v_i) M_ij v_j)
      Cplx<R> t = v[i].conj() * mat.at(i, j) * v[j];
      s += two * t.re;
    }
  return s;
}

}  // namespace matpres
