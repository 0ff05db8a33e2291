#pragma once

#include <map>
#include <utility>
#include <vector>

#include "matpres/hermitian.hpp"
#include "matpres/multiindex.hpp"

namespace matpres {

template <class R>
R power(R base, int e) {
  R r = scalar_traits<R>::one();
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

template <class R>
R monomial_value(const std::vector<R>& x, const MultiIndex& a) {
  R r = scalar_traits<R>::one();
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > 0) r = r * power(x[i], a[i]);
  return r;
}

/// Scalar polynomial over R in n variables; sparse, graded-lex term order,
/// zero coefficients never stored.
template <class R>
class RealPoly {
 public:
  using Terms = std::map<MultiIndex, R, MiLess>;

  RealPoly() : n_(0) {}
  explicit RealPoly(int n) : n_(n) {
    if (n <= 0) throw DimensionError("polynomial needs at least one variable");
  }
  static RealPoly constant(int n, R c) {
    RealPoly p(n);
    p.add_term(MultiIndex(n, 0), std::move(c));
    return p;
  }

  int vars() const { return n_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  int degree() const { return t_.empty() ? -1 : mi_degree(t_.rbegin()->first); }

  void add_term(const MultiIndex& a, R c) {
    if (static_cast<int>(a.size()) != n_) throw DimensionError("term arity mismatch");
    auto it = t_.find(a);
    if (it == t_.end()) {
      if (!scalar_traits<R>::is_zero(c)) t_.emplace(a, std::move(c));
    } else {
      it->second += c;
      if (scalar_traits<R>::is_zero(it->second)) t_.erase(it);
    }
  }

  R coeff(const MultiIndex& a) const {
    auto it = t_.find(a);
    return it == t_.end() ? scalar_traits<R>::zero() : it->second;
  }

  RealPoly operator-() const {
    RealPoly r(n_);
    for (const auto& [a, c] : t_) r.t_.emplace(a, -c);
    return r;
  }
  RealPoly& operator+=(const RealPoly& o) {
    check_same(o);
    for (const auto& [a, c] : o.t_) add_term(a, c);
    return *this;
  }
  RealPoly& operator-=(const RealPoly& o) {
    check_same(o);
    for (const auto& [a, c] : o.t_) add_term(a, -c);
    return *this;
  }
  RealPoly& operator*=(const R& s) {
    if (scalar_traits<R>::is_zero(s)) {
      t_.clear();
      return *this;
    }
    for (auto& [a, c] : t_) c = c * s;
    return *this;
  }
  friend RealPoly operator+(RealPoly x, const RealPoly& y) { return x += y; }
  friend RealPoly operator-(RealPoly x, const RealPoly& y) { return x -= y; }
  friend RealPoly operator*(RealPoly x, const R& s) { return x *= s; }
  friend RealPoly operator*(const RealPoly& x, const RealPoly& y) {
    x.check_same(y);
    RealPoly r(x.n_);
    for (const auto& [a, ca] : x.t_)
      for (const auto& [b, cb] : y.t_) r.add_term(mi_add(a, b), ca * cb);
    return r;
  }
  friend bool operator==(const RealPoly& x, const RealPoly& y) {
    return x.n_ == y.n_ && x.t_ == y.t_;
  }

  R evaluate(const std::vector<R>& x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionError("evaluation point arity");
    R s = scalar_traits<R>::zero();
    for (const auto& [a, c] : t_) s += c * monomial_value(x, a);
    return s;
  }

  RealPoly differentiate(int var) const {
    if (var < 0 || var >= n_) throw DimensionError("differentiation variable index");
    RealPoly r(n_);
    for (const auto& [a, c] : t_) {
      if (a[var] == 0) continue;
      MultiIndex b = a;
      b[var] -= 1;
      r.add_term(b, c * scalar_traits<R>::from_int(a[var]));
    }
    return r;
  }

  /// p(x + a), expanded exactly via componentwise binomials.
  RealPoly shift(const std::vector<R>& a) const {
    if (static_cast<int>(a.size()) != n_) throw DimensionError("shift vector arity");
    RealPoly r(n_);
    for (const auto& [alpha, c] : t_)
      for (const auto& beta : multi_indices_below(alpha)) {
        R factor = c * scalar_traits<R>::from_int(mi_binomial(alpha, beta)) *
                   monomial_value(a, mi_sub(alpha, beta));
        r.add_term(beta, std::move(factor));
      }
    return r;
  }

 private:
  void check_same(const RealPoly& o) const {
    if (n_ != o.n_) throw DimensionError("polynomial arity mismatch");
  }

  int n_;
  Terms t_;
};

/// Complex-coefficient scalar polynomial; building block for vector
/// polynomials in sum-of-squares constructions.
template <class R>
class CplxPoly {
 public:
  using Terms = std::map<MultiIndex, Cplx<R>, MiLess>;

  CplxPoly() : n_(0) {}
  explicit CplxPoly(int n) : n_(n) {}

  int vars() const { return n_; }
  const Terms& terms() const { return t_; }
  int degree() const { return t_.empty() ? -1 : mi_degree(t_.rbegin()->first); }

  void add_term(const MultiIndex& a, Cplx<R> c) {
    auto it = t_.find(a);
    if (it == t_.end()) {
      if (!c.is_zero()) t_.emplace(a, std::move(c));
    } else {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  Cplx<R> evaluate(const std::vector<R>& x) const {
    Cplx<R> s;
    for (const auto& [a, c] : t_) s += c * monomial_value(x, a);
    return s;
  }

 private:
  int n_;
  Terms t_;
};

/// Polynomial with Hermitian matrix coefficients. The coefficient type keeps
/// Hermiticity structural, so every operation here returns a well-formed
/// Hermitian-coefficient polynomial by construction.
template <class R>
class MatrixPoly {
 public:
  using Terms = std::map<MultiIndex, HermMatrix<R>, MiLess>;

  MatrixPoly() : n_(0), m_(0) {}
  MatrixPoly(int n, int m) : n_(n), m_(m) {
    if (n <= 0) throw DimensionError("polynomial needs at least one variable");
    if (m <= 0) throw DimensionError("matrix dimension must be positive");
  }
  static MatrixPoly constant(int n, const HermMatrix<R>& c) {
    MatrixPoly p(n, c.dim());
    p.add_term(MultiIndex(n, 0), c);
    return p;
  }
  static MatrixPoly monomial(int n, const MultiIndex& a, const HermMatrix<R>& c) {
    MatrixPoly p(n, c.dim());
    p.add_term(a, c);
    return p;
  }

  int vars() const { return n_; }
  int mat_dim() const { return m_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  int degree() const { return t_.empty() ? -1 : mi_degree(t_.rbegin()->first); }

  void add_term(const MultiIndex& a, const HermMatrix<R>& c) {
    if (static_cast<int>(a.size()) != n_) throw DimensionError("term arity mismatch");
    if (c.dim() != m_) throw DimensionError("coefficient dimension mismatch");
    auto it = t_.find(a);
    if (it == t_.end()) {
      if (!c.is_zero()) t_.emplace(a, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  HermMatrix<R> coeff(const MultiIndex& a) const {
    auto it = t_.find(a);
    return it == t_.end() ? HermMatrix<R>(m_) : it->second;
  }

  MatrixPoly operator-() const {
    MatrixPoly r(n_, m_);
    for (const auto& [a, c] : t_) r.t_.emplace(a, -c);
    return r;
  }
  MatrixPoly& operator+=(const MatrixPoly& o) {
    check_same(o);
    for (const auto& [a, c] : o.t_) add_term(a, c);
    return *this;
  }
  MatrixPoly& operator-=(const MatrixPoly& o) {
    check_same(o);
    for (const auto& [a, c] : o.t_) add_term(a, -c);
    return *this;
  }
  MatrixPoly& operator*=(const R& s) {
    if (scalar_traits<R>::is_zero(s)) {
      t_.clear();
      return *this;
    }
    Terms kept;
    for (auto& [a, c] : t_) {
      HermMatrix<R> sc = c * s;
      if (!sc.is_zero()) kept.emplace(a, std::move(sc));
    }
    t_ = std::move(kept);
    return *this;
  }
  friend MatrixPoly operator+(MatrixPoly x, const MatrixPoly& y) { return x += y; }
  friend MatrixPoly operator-(MatrixPoly x, const MatrixPoly& y) { return x -= y; }
  friend MatrixPoly operator*(MatrixPoly x, const R& s) { return x *= s; }
  friend bool operator==(const MatrixPoly& x, const MatrixPoly& y) {
    return x.n_ == y.n_ && x.m_ == y.m_ && x.t_ == y.t_;
  }
  friend bool operator!=(const MatrixPoly& x, const MatrixPoly& y) { return !(x == y); }

  /// Multiply by the scalar monomial x^a.
  MatrixPoly mul_monomial(const MultiIndex& a) const {
    MatrixPoly r(n_, m_);
    for (const auto& [b, c] : t_) r.t_.emplace(mi_add(a, b), c);
    return r;
  }

  /// Multiply by a scalar polynomial.
  friend MatrixPoly operator*(const RealPoly<R>& s, const MatrixPoly& p) {
    if (s.vars() != p.n_) throw DimensionError("polynomial arity mismatch");
    MatrixPoly r(p.n_, p.m_);
    for (const auto& [a, ca] : s.terms())
      for (const auto& [b, cb] : p.t_) r.add_term(mi_add(a, b), cb * ca);
    return r;
  }

  HermMatrix<R> evaluate(const std::vector<R>& x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionError("evaluation point arity");
    HermMatrix<R> s(m_);
    for (const auto& [a, c] : t_) s += c * monomial_value(x, a);
    return s;
  }

  MatrixPoly differentiate(int var) const {
    if (var < 0 || var >= n_) throw DimensionError("differentiation variable index");
    MatrixPoly r(n_, m_);
    for (const auto& [a, c] : t_) {
      if (a[var] == 0) continue;
      MultiIndex b = a;
      b[var] -= 1;
      r.add_term(b, c * scalar_traits<R>::from_int(a[var]));
    }
    return r;
  }

  /// Iterated partial derivative d^alpha.
  MatrixPoly partial(const MultiIndex& a) const {
    MatrixPoly r = *this;
    for (size_t v = 0; v < a.size(); ++v)
      for (int k = 0; k < a[v]; ++k) r = r.differentiate(static_cast<int>(v));
    return r;
  }

  /// p(x + a), exact binomial expansion.
  MatrixPoly shift(const std::vector<R>& a) const {
    if (static_cast<int>(a.size()) != n_) throw DimensionError("shift vector arity");
    MatrixPoly r(n_, m_);
    for (const auto& [alpha, c] : t_)
      for (const auto& beta : multi_indices_below(alpha)) {
        R factor = scalar_traits<R>::from_int(mi_binomial(alpha, beta)) *
                   monomial_value(a, mi_sub(alpha, beta));
        r.add_term(beta, c * factor);
      }
    return r;
  }

  /// Largest |entry| across coefficients — scale reference for tolerances.
  double max_abs() const {
    double mx = 0.0;
    for (const auto& [a, c] : t_) mx = std::max(mx, c.max_abs());
    return mx;
  }

 private:
  void check_same(const MatrixPoly& o) const {
    if (n_ != o.n_ || m_ != o.m_) throw DimensionError("polynomial shape mismatch");
  }

  int n_;
  int m_;
  Terms t_;
};

/// m = 1 bridge: a 1x1 matrix polynomial is a scalar polynomial.
template <class R>
RealPoly<R> to_real_poly(const MatrixPoly<R>& p) {
  if (p.mat_dim() != 1) throw DimensionError("to_real_poly needs m = 1");
  RealPoly<R> r(p.vars());
  for (const auto& [a, c] : p.terms()) r.add_term(a, c.diag(0));
  return r;
}

template <class R>
MatrixPoly<R> from_real_poly(const RealPoly<R>& p) {
  MatrixPoly<R> r(p.vars(), 1);
  for (const auto& [a, c] : p.terms()) {
    HermMatrix<R> one(1);
    one.set_diag(0, c);
    r.add_term(a, one);
  }
  return r;
}

/// Largest coefficient-entry distance; the float-mode equality yardstick.
template <class R>
double max_coeff_dist(const MatrixPoly<R>& p, const MatrixPoly<R>& q) {
  MatrixPoly<R> d = p - q;
  return d.max_abs();
}

}  // namespace matpres
