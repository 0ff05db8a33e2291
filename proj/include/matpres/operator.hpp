#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "matpres/parallel.hpp"
#include "matpres/polynomial.hpp"

namespace matpres {

namespace detail {

/// Dense storage over (beta, i, j): one entry per basis monomial H_ij x^beta
/// with |beta| <= d. Shared layout for operator tables and canonical reps.
template <class R>
class BasisImages {
  // validated in the initializer list, before multi_indices_up_to runs
  static int checked_vars(int n, int m, int d) {
    if (n <= 0 || m <= 0 || d < 0) throw DimensionError("bad operator shape");
    return n;
  }

 public:
  BasisImages() : n_(0), m_(0), d_(0) {}
  BasisImages(int n, int m, int d)
      : n_(checked_vars(n, m, d)), m_(m), d_(d), keys_(multi_indices_up_to(n, d)) {
    for (size_t p = 0; p < keys_.size(); ++p) pos_.emplace(keys_[p], p);
    img_.assign(keys_.size() * m * m, MatrixPoly<R>(n, m));
  }

  int vars() const { return n_; }
  int mat_dim() const { return m_; }
  int max_degree() const { return d_; }
  const std::vector<MultiIndex>& keys() const { return keys_; }

  bool has_key(const MultiIndex& b) const { return pos_.count(b) != 0; }

  const MatrixPoly<R>& at(int i, int j, const MultiIndex& b) const {
    return img_[slot(i, j, b)];
  }
  void set(int i, int j, const MultiIndex& b, MatrixPoly<R> p) {
    if (p.vars() != n_ || p.mat_dim() != m_)
      throw DimensionError("image polynomial shape mismatch");
    img_[slot(i, j, b)] = std::move(p);
  }

  friend bool operator==(const BasisImages& x, const BasisImages& y) {
    return x.n_ == y.n_ && x.m_ == y.m_ && x.d_ == y.d_ && x.img_ == y.img_;
  }

 private:
  size_t slot(int i, int j, const MultiIndex& b) const {
    if (i < 0 || j < 0 || i >= m_ || j >= m_)
      throw DimensionError("basis index out of range");
    auto it = pos_.find(b);
    if (it == pos_.end())
      throw DegreeError("multi-index outside the operator's degree bound");
    return (it->second * m_ + i) * m_ + j;
  }

  int n_, m_, d_;
  std::vector<MultiIndex> keys_;
  std::map<MultiIndex, size_t, MiLess> pos_;
  std::vector<MatrixPoly<R>> img_;
};

}  // namespace detail

/// Total action of a linear operator on Herm_m[x_1..x_n], truncated at degree
/// d: the image T(H_ij x^beta) for every basis element and |beta| <= d.
template <class R>
class OperatorTable {
 public:
  OperatorTable() = default;
  OperatorTable(int n, int m, int d) : a_(n, m, d) {}

  int vars() const { return a_.vars(); }
  int mat_dim() const { return a_.mat_dim(); }
  int max_degree() const { return a_.max_degree(); }
  const std::vector<MultiIndex>& betas() const { return a_.keys(); }

  const MatrixPoly<R>& action(int i, int j, const MultiIndex& beta) const {
    return a_.at(i, j, beta);
  }
  void set_action(int i, int j, const MultiIndex& beta, MatrixPoly<R> image) {
    a_.set(i, j, beta, std::move(image));
  }

  friend bool operator==(const OperatorTable& x, const OperatorTable& y) {
    return x.a_ == y.a_;
  }

 private:
  detail::BasisImages<R> a_;
};

/// Canonical differential-operator data: the coefficient maps Q_alpha, stored
/// through their images Q_alpha(H_ij) for |alpha| <= d. Together these encode
/// T = sum_alpha (1/alpha!) Q_alpha x d^alpha.
template <class R>
class CanonicalRep {
 public:
  CanonicalRep() = default;
  CanonicalRep(int n, int m, int d) : q_(n, m, d) {}

  int vars() const { return q_.vars(); }
  int mat_dim() const { return q_.mat_dim(); }
  int max_degree() const { return q_.max_degree(); }
  const std::vector<MultiIndex>& alphas() const { return q_.keys(); }

  const MatrixPoly<R>& q_image(int i, int j, const MultiIndex& alpha) const {
    return q_.at(i, j, alpha);
  }
  void set_q_image(int i, int j, const MultiIndex& alpha, MatrixPoly<R> image) {
    q_.set(i, j, alpha, std::move(image));
  }

  /// Q_alpha extended R-linearly from basis images to any Hermitian v.
  MatrixPoly<R> q_apply(const MultiIndex& alpha, const HermMatrix<R>& v) const {
    if (v.dim() != mat_dim()) throw DimensionError("coefficient dimension mismatch");
    std::vector<R> c = to_coords(v);
    MatrixPoly<R> out(vars(), mat_dim());
    for (int i = 0; i < mat_dim(); ++i)
      for (int j = 0; j < mat_dim(); ++j) {
        const R& w = c[static_cast<size_t>(i) * mat_dim() + j];
        if (scalar_traits<R>::is_zero(w)) continue;
        out += q_.at(i, j, alpha) * w;
      }
    return out;
  }

  friend bool operator==(const CanonicalRep& x, const CanonicalRep& y) {
    return x.q_ == y.q_;
  }

 private:
  detail::BasisImages<R> q_;
};

/// Recursive extraction of the canonical coefficients, walking multi-indices
/// in graded order:
///   Q_gamma(v) = T(v x^gamma) - sum_{alpha < gamma} C(gamma, alpha)
///                Q_alpha(v) x^{gamma - alpha}.
template <class R>
CanonicalRep<R> canonical_rep(const OperatorTable<R>& t) {
  CanonicalRep<R> rep(t.vars(), t.mat_dim(), t.max_degree());
  int m = t.mat_dim();
  for (const MultiIndex& gamma : t.betas()) {  // graded order: dependencies first
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        MatrixPoly<R> q = t.action(i, j, gamma);
        for (const MultiIndex& alpha : multi_indices_below(gamma)) {
          if (alpha == gamma) continue;
          R factor = scalar_traits<R>::from_int(mi_binomial(gamma, alpha));
          q -= rep.q_image(i, j, alpha).mul_monomial(mi_sub(gamma, alpha)) * factor;
        }
        rep.set_q_image(i, j, gamma, std::move(q));
      }
  }
  return rep;
}

/// Closed-form extraction via the inverse binomial transform:
///   Q_beta(v) = sum_{alpha <= beta} C(beta, alpha) (-1)^{|beta - alpha|}
///               T(v x^alpha) x^{beta - alpha}.
/// Independent per beta, so computed in parallel into disjoint slots.
template <class R>
CanonicalRep<R> canonical_rep_explicit(const OperatorTable<R>& t) {
  CanonicalRep<R> rep(t.vars(), t.mat_dim(), t.max_degree());
  int m = t.mat_dim();
  const auto& betas = t.betas();
  std::vector<std::vector<MatrixPoly<R>>> slots(betas.size());
  parallel_for(betas.size(), [&](std::size_t bi) {
    const MultiIndex& beta = betas[bi];
    std::vector<MatrixPoly<R>> local;
    local.reserve(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        MatrixPoly<R> q(t.vars(), m);
        for (const MultiIndex& alpha : multi_indices_below(beta)) {
          MultiIndex rest = mi_sub(beta, alpha);
          std::int64_t sgn = mi_degree(rest) % 2 == 0 ? 1 : -1;
          R factor = scalar_traits<R>::from_int(sgn * mi_binomial(beta, alpha));
          q += t.action(i, j, alpha).mul_monomial(rest) * factor;
        }
        local.push_back(std::move(q));
      }
    slots[bi] = std::move(local);
  });
  for (size_t bi = 0; bi < betas.size(); ++bi)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        rep.set_q_image(i, j, betas[bi], std::move(slots[bi][static_cast<size_t>(i) * m + j]));
  return rep;
}

/// Apply through the canonical data:
///   T p = sum_beta sum_{alpha <= beta} C(beta, alpha) Q_alpha(c_beta)
///         x^{beta - alpha}.
/// Exceeding the truncation degree d is a hard error, not a silent drop.
template <class R>
MatrixPoly<R> apply(const CanonicalRep<R>& rep, const MatrixPoly<R>& p) {
  if (p.vars() != rep.vars() || p.mat_dim() != rep.mat_dim())
    throw DimensionError("operator/polynomial shape mismatch");
  if (p.degree() > rep.max_degree())
    throw DegreeError("input degree exceeds the operator's truncation bound");
  MatrixPoly<R> out(rep.vars(), rep.mat_dim());
  for (const auto& [beta, c] : p.terms())
    for (const MultiIndex& alpha : multi_indices_below(beta)) {
      R factor = scalar_traits<R>::from_int(mi_binomial(beta, alpha));
      out += rep.q_apply(alpha, c).mul_monomial(mi_sub(beta, alpha)) * factor;
    }
  return out;
}

/// Apply directly from the stored total action (linear extension in the
/// coefficients' basis coordinates).
template <class R>
MatrixPoly<R> apply(const OperatorTable<R>& t, const MatrixPoly<R>& p) {
  if (p.vars() != t.vars() || p.mat_dim() != t.mat_dim())
    throw DimensionError("operator/polynomial shape mismatch");
  if (p.degree() > t.max_degree())
    throw DegreeError("input degree exceeds the operator's truncation bound");
  int m = t.mat_dim();
  MatrixPoly<R> out(t.vars(), m);
  for (const auto& [beta, c] : p.terms()) {
    std::vector<R> coords = to_coords(c);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const R& w = coords[static_cast<size_t>(i) * m + j];
        if (scalar_traits<R>::is_zero(w)) continue;
        out += t.action(i, j, beta) * w;
      }
  }
  return out;
}

/// Rebuild the total action from canonical data via
///   T(v x^beta) = sum_{alpha <= beta} C(beta, alpha) Q_alpha(v) x^{beta-alpha}.
template <class R>
OperatorTable<R> table_from_rep(const CanonicalRep<R>& rep) {
  OperatorTable<R> t(rep.vars(), rep.mat_dim(), rep.max_degree());
  int m = rep.mat_dim();
  for (const MultiIndex& beta : rep.alphas())
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        MatrixPoly<R> img(rep.vars(), m);
        for (const MultiIndex& alpha : multi_indices_below(beta)) {
          R factor = scalar_traits<R>::from_int(mi_binomial(beta, alpha));
          img += rep.q_image(i, j, alpha).mul_monomial(mi_sub(beta, alpha)) * factor;
        }
        t.set_action(i, j, beta, std::move(img));
      }
  return t;
}

/// Freeze the coefficient maps at the point y: every Q_alpha(H_ij) becomes the
/// constant matrix Q_alpha(H_ij)(y). The result represents T_y.
template <class R>
CanonicalRep<R> specialize_y(const CanonicalRep<R>& rep, const std::vector<R>& y) {
  CanonicalRep<R> out(rep.vars(), rep.mat_dim(), rep.max_degree());
  int m = rep.mat_dim();
  for (const MultiIndex& alpha : rep.alphas())
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        HermMatrix<R> v = rep.q_image(i, j, alpha).evaluate(y);
        MatrixPoly<R> c(rep.vars(), m);
        if (!v.is_zero()) c.add_term(MultiIndex(rep.vars(), 0), v);
        out.set_q_image(i, j, alpha, std::move(c));
      }
  return out;
}

/// Pair each coefficient with M: p -> <p(.), M> as a scalar polynomial.
template <class R>
RealPoly<R> pair_coefficients(const MatrixPoly<R>& p, const HermMatrix<R>& m) {
  RealPoly<R> out(p.vars());
  for (const auto& [a, c] : p.terms()) out.add_term(a, inner_product(c, m));
  return out;
}

/// The scalar functional polynomial T_{y,M} p = <(T_y p)(.), M>.
template <class R>
RealPoly<R> functional_yM(const CanonicalRep<R>& rep, const std::vector<R>& y,
                          const HermMatrix<R>& mat, const MatrixPoly<R>& p) {
  return pair_coefficients(apply(specialize_y(rep, y), p), mat);
}

/// The moment functional L_{y,M}(p) = (T_{y,M} p)(0).
template <class R>
R moment_functional(const CanonicalRep<R>& rep, const std::vector<R>& y,
                    const HermMatrix<R>& mat, const MatrixPoly<R>& p) {
  return inner_product(apply(specialize_y(rep, y), p).evaluate(std::vector<R>(
                           rep.vars(), scalar_traits<R>::zero())),
                       mat);
}

/// Verdict of the multiplication-structure probe at one alpha.
template <class R>
struct MultiplicationInfo {
  bool is_multiplication = false;
  MatrixPoly<R> multiplier;        // q_alpha, meaningful when is_multiplication
  bool identity_multiple = false;  // q_alpha = (scalar polynomial) * Id
  RealPoly<R> scalar;              // that scalar polynomial, when identity_multiple
};

namespace detail {

/// Is image == q * H (coefficientwise general matrix products)?
template <class R>
bool matches_multiplier(const MatrixPoly<R>& image, const MatrixPoly<R>& q,
                        const HermMatrix<R>& h, double tol) {
  // Collect the union of supports; compare dense products per monomial.
  std::map<MultiIndex, DenseMat<R>, MiLess> want;
  DenseMat<R> hd(h);
  for (const auto& [a, c] : q.terms()) want.emplace(a, DenseMat<R>(c) * hd);
  double scale = std::max({1.0, image.max_abs(), q.max_abs()});
  auto close = [&](const DenseMat<R>& x, const DenseMat<R>& y) {
    for (int i = 0; i < x.dim(); ++i)
      for (int j = 0; j < x.dim(); ++j) {
        Cplx<R> d = x.at(i, j) - y.at(i, j);
        if constexpr (scalar_traits<R>::exact) {
          if (!d.is_zero()) return false;
        } else {
          if (cplx_abs(d) > tol * scale) return false;
        }
      }
    return true;
  };
  DenseMat<R> zero(h.dim());
  for (const auto& [a, c] : image.terms()) {
    auto it = want.find(a);
    if (!close(DenseMat<R>(c), it == want.end() ? zero : it->second)) return false;
    if (it != want.end()) want.erase(it);
  }
  for (const auto& [a, d] : want)
    if (!close(d, zero)) return false;
  return true;
}

}  // namespace detail

/// For each |alpha| <= d, decide whether Q_alpha acts as left multiplication
/// by a fixed matrix polynomial. The only possible multiplier is Q_alpha(Id)
/// (plug v = Id), so candidate construction is forced; verification checks
/// Q_alpha(H_ij) = q_alpha H_ij on the whole basis. Exact comparison in exact
/// mode, tolerance tol relative to the coefficient scale in float mode.
template <class R>
std::map<MultiIndex, MultiplicationInfo<R>, MiLess> detect_multiplication(
    const CanonicalRep<R>& rep, double tol = 1e-10) {
  std::map<MultiIndex, MultiplicationInfo<R>, MiLess> out;
  int m = rep.mat_dim();
  for (const MultiIndex& alpha : rep.alphas()) {
    MultiplicationInfo<R> info;
    info.multiplier = rep.q_apply(alpha, herm_identity<R>(m));
    info.is_multiplication = true;
    for (int i = 0; i < m && info.is_multiplication; ++i)
      for (int j = 0; j < m && info.is_multiplication; ++j)
        info.is_multiplication = detail::matches_multiplier(
            rep.q_image(i, j, alpha), info.multiplier, basis_element<R>(m, i, j), tol);
    if (info.is_multiplication) {
      info.identity_multiple = true;
      RealPoly<R> scalar(rep.vars());
      double scale = std::max(1.0, info.multiplier.max_abs());
      for (const auto& [a, c] : info.multiplier.terms()) {
        R lead = c.diag(0);
        for (int i = 0; i < m && info.identity_multiple; ++i) {
          R d = c.diag(i) - lead;
          if constexpr (scalar_traits<R>::exact)
            info.identity_multiple = scalar_traits<R>::is_zero(d);
          else
            info.identity_multiple = std::abs(d) <= tol * scale;
        }
        for (int i = 1; i < m && info.identity_multiple; ++i)
          for (int j = 0; j < i; ++j) {
            if constexpr (scalar_traits<R>::exact)
              info.identity_multiple =
                  info.identity_multiple && c.at(i, j).is_zero();
            else
              info.identity_multiple =
                  info.identity_multiple && cplx_abs(c.at(i, j)) <= tol * scale;
          }
        if (info.identity_multiple) scalar.add_term(a, lead);
      }
      if (info.identity_multiple) info.scalar = std::move(scalar);
    }
    out.emplace(alpha, std::move(info));
  }
  return out;
}

template <class R>
std::map<MultiIndex, MultiplicationInfo<R>, MiLess> detect_multiplication(
    const OperatorTable<R>& t, double tol = 1e-10) {
  return detect_multiplication(canonical_rep(t), tol);
}

}  // namespace matpres
