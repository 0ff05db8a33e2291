#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "matpres/operator.hpp"
#include "matpres/polynomial.hpp"
#include "matpres/rng.hpp"
#include "matpres/spectral.hpp"

namespace matpres {

/// Linear map Herm_m -> Herm_m, stored as its m^2 x m^2 real matrix in the
/// orthonormal H basis (real entries suffice: coordinates of Hermitian
/// matrices are real, so any such matrix maps Herm_m into Herm_m).
template <class R>
class LinMap {
 public:
  LinMap() : m_(0) {}
  explicit LinMap(int m)
      : m_(m), e_(static_cast<size_t>(m) * m * m * m, scalar_traits<R>::zero()) {
    if (m <= 0) throw DimensionError("matrix dimension must be positive");
  }

  static LinMap identity(int m) {
    LinMap out(m);
    for (int c = 0; c < m * m; ++c) out.entry(c, c) = scalar_traits<R>::one();
    return out;
  }

  int mat_dim() const { return m_; }
  int coord_dim() const { return m_ * m_; }

  R& entry(int row, int col) { return e_[static_cast<size_t>(row) * coord_dim() + col]; }
  const R& entry(int row, int col) const {
    return e_[static_cast<size_t>(row) * coord_dim() + col];
  }

  HermMatrix<R> apply(const HermMatrix<R>& x) const {
    if (x.dim() != m_) throw DimensionError("operator atom dimension mismatch");
    std::vector<R> c = to_coords(x);
    std::vector<R> out(coord_dim(), scalar_traits<R>::zero());
    for (int r = 0; r < coord_dim(); ++r)
      for (int k = 0; k < coord_dim(); ++k) {
        if (scalar_traits<R>::is_zero(c[k])) continue;
        out[r] += entry(r, k) * c[k];
      }
    return from_coords(m_, out);
  }

  /// Trace adjoint: <Phi(A), B> = <A, adjoint(B)> — the transpose here, since
  /// the H basis is orthonormal and entries are real.
  LinMap adjoint() const {
    LinMap out(m_);
    for (int r = 0; r < coord_dim(); ++r)
      for (int c = 0; c < coord_dim(); ++c) out.entry(c, r) = entry(r, c);
    return out;
  }

  LinMap& operator+=(const LinMap& o) {
    if (m_ != o.m_) throw DimensionError("operator atom dimension mismatch");
    for (size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
    return *this;
  }
  LinMap& operator*=(const R& s) {
    for (auto& v : e_) v = v * s;
    return *this;
  }
  friend bool operator==(const LinMap& x, const LinMap& y) {
    return x.m_ == y.m_ && x.e_ == y.e_;
  }

 private:
  int m_;
  std::vector<R> e_;
};

template <class R>
LinMap<double> linmap_to_double(const LinMap<R>& p) {
  LinMap<double> out(p.mat_dim());
  for (int r = 0; r < p.coord_dim(); ++r)
    for (int c = 0; c < p.coord_dim(); ++c)
      out.entry(r, c) = scalar_traits<R>::to_double(p.entry(r, c));
  return out;
}

/// Choi matrix of Phi: the m^2 x m^2 complex block matrix with (i,j) block
/// Phi_C(E_ij)/m, the complex-linear extension evaluated on matrix units.
/// Normalized so the identity map gives the maximally entangled projector
/// (eigenvalues 0 and 1); Hermitian since Phi preserves Hermiticity.
inline DenseMat<double> choi_matrix(const LinMap<double>& phi) {
  int m = phi.mat_dim();
  double inv_rt2 = scalar_traits<double>::inv_sqrt2();
  DenseMat<double> choi(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      // Phi_C(E_ij): i < j: (Phi(H_ij) + i Phi(H_ji))/sqrt2;  i = j: Phi(H_ii);
      //              i > j: (Phi(H_ji) - i Phi(H_ij))/sqrt2.
      DenseMat<double> block(m);
      if (i == j) {
        block = DenseMat<double>(phi.apply(basis_element<double>(m, i, i)));
      } else {
        int lo = std::min(i, j), hi = std::max(i, j);
        DenseMat<double> sym(phi.apply(basis_element<double>(m, lo, hi)));
        DenseMat<double> anti(phi.apply(basis_element<double>(m, hi, lo)));
        Cplx<double> unit = i < j ? Cplx<double>(0.0, 1.0) : Cplx<double>(0.0, -1.0);
        anti *= unit;
        block = sym + anti;
        block *= Cplx<double>(inv_rt2);
      }
      Cplx<double> inv_m(1.0 / m);
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) choi.at(i * m + k, j * m + l) = block.at(k, l) * inv_m;
    }
  return choi;
}

enum class AtomClass { CertifiedPositive, Unknown, NotPositive };

inline const char* atom_class_name(AtomClass c) {
  switch (c) {
    case AtomClass::CertifiedPositive:
      return "certified-positive";
    case AtomClass::Unknown:
      return "unknown";
    default:
      return "not-positive";
  }
}

struct AtomClassification {
  AtomClass cls = AtomClass::Unknown;
  double choi_min_eig = 0.0;
  std::optional<CVec<double>> violating_direction;  // for not-positive
};

/// Three-valued positivity probe for one operator atom: the Choi matrix being
/// PSD certifies complete positivity (sufficient); a sampled rank-one input
/// v v* mapping to a non-PSD output refutes positivity; otherwise unknown
/// (deciding plain positivity is out of reach — e.g. the transpose map).
inline AtomClassification classify_atom(const LinMap<double>& phi, int samples = 1000,
                                        std::uint64_t seed = kDefaultSeed,
                                        double psd_tol = 1e-8, double choi_tol = 1e-9) {
  AtomClassification out;
  DenseMat<double> choi = choi_matrix(phi);
  // Hermitian up to roundoff by construction; tolerance scales with entries.
  double scale = 0.0;
  for (int i = 0; i < choi.dim(); ++i)
    for (int j = 0; j < choi.dim(); ++j) scale = std::max(scale, cplx_abs(choi.at(i, j)));
  HermMatrix<double> choi_h = choi.to_hermitian(1e-9 * std::max(1.0, scale));
  EigenSystem es = eigensystem(choi_h);
  out.choi_min_eig = es.values.front();
  double norm = std::max(std::abs(es.values.front()), std::abs(es.values.back()));
  if (out.choi_min_eig >= -choi_tol * std::max(1.0, norm)) {
    out.cls = AtomClass::CertifiedPositive;
    return out;
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    CVec<double> v = rng.unit_vector(phi.mat_dim());
    if (!is_psd(phi.apply(outer(v)), psd_tol)) {
      out.cls = AtomClass::NotPositive;
      out.violating_direction = std::move(v);
      return out;
    }
  }
  out.cls = AtomClass::Unknown;
  return out;
}

template <class R>
AtomClassification classify_atom(const LinMap<R>& phi, int samples = 1000,
                                 std::uint64_t seed = kDefaultSeed,
                                 double psd_tol = 1e-8, double choi_tol = 1e-9) {
  return classify_atom(linmap_to_double(phi), samples, seed, psd_tol, choi_tol);
}

/// Finite atomic Herm_m-valued measure: atoms (t, W) with pairwise distinct
/// points (duplicates merge by weight addition).
template <class R>
class AtomicMatrixMeasure {
 public:
  struct Atom {
    std::vector<R> t;
    HermMatrix<R> w;
  };

  AtomicMatrixMeasure() : n_(0), m_(0) {}
  AtomicMatrixMeasure(int n, int m) : n_(n), m_(m) {
    if (n <= 0 || m <= 0) throw DimensionError("bad measure shape");
  }

  int vars() const { return n_; }
  int mat_dim() const { return m_; }
  const std::vector<Atom>& atoms() const { return a_; }

  void add_atom(std::vector<R> t, HermMatrix<R> w) {
    if (static_cast<int>(t.size()) != n_) throw DimensionError("atom point arity");
    if (w.dim() != m_) throw DimensionError("atom weight dimension");
    for (auto& atom : a_)
      if (atom.t == t) {
        atom.w += w;
        prune();
        return;
      }
    if (!w.is_zero()) a_.push_back(Atom{std::move(t), std::move(w)});
  }

  bool is_positive(double tol = 1e-9) const {
    for (const auto& atom : a_)
      if (!is_psd(atom.w, tol)) return false;
    return true;
  }

  HermMatrix<R> total_mass() const {
    HermMatrix<R> s(m_);
    for (const auto& atom : a_) s += atom.w;
    return s;
  }

  HermMatrix<R> moment(const MultiIndex& beta) const {
    HermMatrix<R> s(m_);
    for (const auto& atom : a_) s += atom.w * monomial_value(atom.t, beta);
    return s;
  }

 private:
  void prune() {
    for (size_t k = 0; k < a_.size(); ++k)
      if (a_[k].w.is_zero()) {
        a_.erase(a_.begin() + k);
        return;  // at most one atom can have just become zero
      }
  }

  int n_, m_;
  std::vector<Atom> a_;
};

/// The pairing integral: sum over atoms of <p(t), W>.
template <class R>
R pair_integral(const MatrixPoly<R>& p, const AtomicMatrixMeasure<R>& mu) {
  if (p.vars() != mu.vars() || p.mat_dim() != mu.mat_dim())
    throw DimensionError("pair_integral shape mismatch");
  R s = scalar_traits<R>::zero();
  for (const auto& atom : mu.atoms()) s += inner_product(p.evaluate(atom.t), atom.w);
  return s;
}

/// Matrix-valued integral of a scalar polynomial: sum of q(t) W.
template <class R>
HermMatrix<R> integrate_matrix(const RealPoly<R>& q, const AtomicMatrixMeasure<R>& mu) {
  if (q.vars() != mu.vars()) throw DimensionError("integrate_matrix arity mismatch");
  HermMatrix<R> s(mu.mat_dim());
  for (const auto& atom : mu.atoms()) s += atom.w * q.evaluate(atom.t);
  return s;
}

/// A PSD weight with (numerically) zero trace must itself be (numerically)
/// zero; a materially nonzero weight with vanishing trace signals bad data.
template <class R>
bool degenerate_trace(const R& tr, const HermMatrix<R>& w) {
  if constexpr (scalar_traits<R>::exact)
    return scalar_traits<R>::is_zero(tr) && !w.is_zero();
  else
    return std::abs(scalar_traits<R>::to_double(tr)) <=
               1e-12 * std::max(1.0, w.max_abs()) &&
           w.max_abs() > 1e-9;
}

/// The scalar trace measure tr(mu): atoms (t, tr W). Defined for positive
/// measures; exact-zero weights were already removed by the atom merge.
template <class R>
AtomicMatrixMeasure<R> trace_measure(const AtomicMatrixMeasure<R>& mu,
                                     double psd_tol = 1e-9) {
  if (!mu.is_positive(psd_tol))
    throw ValidationError("trace_measure requires a positive measure");
  AtomicMatrixMeasure<R> out(mu.vars(), 1);
  for (const auto& atom : mu.atoms()) {
    R tr = atom.w.trace();
    if (degenerate_trace(tr, atom.w))
      throw ValidationError("PSD atom with zero trace must be the zero matrix");
    HermMatrix<R> w1(1);
    w1.set_diag(0, tr);
    out.add_atom(atom.t, w1);
  }
  return out;
}

/// Atomic Radon–Nikodym density against the trace measure: (t, W / tr W).
template <class R>
std::vector<typename AtomicMatrixMeasure<R>::Atom> rn_density(
    const AtomicMatrixMeasure<R>& mu, double psd_tol = 1e-9) {
  if (!mu.is_positive(psd_tol))
    throw ValidationError("rn_density requires a positive measure");
  std::vector<typename AtomicMatrixMeasure<R>::Atom> out;
  for (const auto& atom : mu.atoms()) {
    R tr = atom.w.trace();
    if (degenerate_trace(tr, atom.w))
      throw ValidationError("PSD atom with zero trace must be the zero matrix");
    if (scalar_traits<R>::is_zero(tr)) continue;
    if constexpr (!scalar_traits<R>::exact)
      if (std::abs(scalar_traits<R>::to_double(tr)) <=
          1e-12 * std::max(1.0, atom.w.max_abs()))
        continue;  // numerically zero atom: contributes nothing
    HermMatrix<R> w = atom.w;
    if constexpr (scalar_traits<R>::exact)
      w *= scalar_traits<R>::one() / tr;
    else
      w *= 1.0 / tr;
    out.push_back({atom.t, std::move(w)});
  }
  return out;
}

template <class R>
AtomicMatrixMeasure<R> pushforward(const AtomicMatrixMeasure<R>& mu,
                                   const std::vector<R>& a) {
  if (static_cast<int>(a.size()) != mu.vars())
    throw DimensionError("pushforward arity mismatch");
  AtomicMatrixMeasure<R> out(mu.vars(), mu.mat_dim());
  for (const auto& atom : mu.atoms()) {
    std::vector<R> t = atom.t;
    for (size_t i = 0; i < t.size(); ++i) t[i] += a[i];
    out.add_atom(std::move(t), atom.w);
  }
  return out;
}

/// Finite atomic operator-valued measure: atoms (t, Phi).
template <class R>
class AtomicOperatorMeasure {
 public:
  struct Atom {
    std::vector<R> t;
    LinMap<R> phi;
  };

  AtomicOperatorMeasure() : n_(0), m_(0) {}
  AtomicOperatorMeasure(int n, int m) : n_(n), m_(m) {
    if (n <= 0 || m <= 0) throw DimensionError("bad measure shape");
  }

  int vars() const { return n_; }
  int mat_dim() const { return m_; }
  const std::vector<Atom>& atoms() const { return a_; }

  void add_atom(std::vector<R> t, LinMap<R> phi) {
    if (static_cast<int>(t.size()) != n_) throw DimensionError("atom point arity");
    if (phi.mat_dim() != m_) throw DimensionError("atom map dimension");
    for (auto& atom : a_)
      if (atom.t == t) {
        atom.phi += phi;
        return;
      }
    a_.push_back(Atom{std::move(t), std::move(phi)});
  }

  /// The matrix measure mu[M]: same atoms, weights Phi(M).
  AtomicMatrixMeasure<R> apply_to(const HermMatrix<R>& mat) const {
    AtomicMatrixMeasure<R> out(n_, m_);
    for (const auto& atom : a_) out.add_atom(atom.t, atom.phi.apply(mat));
    return out;
  }

  std::vector<AtomClassification> classify_atoms(int samples = 1000,
                                                 std::uint64_t seed = kDefaultSeed) const {
    std::vector<AtomClassification> out;
    out.reserve(a_.size());
    for (const auto& atom : a_) out.push_back(classify_atom(atom.phi, samples, seed));
    return out;
  }

 private:
  int n_, m_;
  std::vector<Atom> a_;
};

/// The operator-measure integral of a matrix polynomial: sum of Phi(p(t)),
/// the atomic instantiation of the coordinate-wise integral definition.
template <class R>
HermMatrix<R> integrate_operator(const MatrixPoly<R>& p,
                                 const AtomicOperatorMeasure<R>& mu) {
  if (p.vars() != mu.vars() || p.mat_dim() != mu.mat_dim())
    throw DimensionError("integrate_operator shape mismatch");
  HermMatrix<R> s(mu.mat_dim());
  for (const auto& atom : mu.atoms()) s += atom.phi.apply(p.evaluate(atom.t));
  return s;
}

template <class R>
AtomicOperatorMeasure<R> pushforward(const AtomicOperatorMeasure<R>& mu,
                                     const std::vector<R>& a) {
  if (static_cast<int>(a.size()) != mu.vars())
    throw DimensionError("pushforward arity mismatch");
  AtomicOperatorMeasure<R> out(mu.vars(), mu.mat_dim());
  for (const auto& atom : mu.atoms()) {
    std::vector<R> t = atom.t;
    for (size_t i = 0; i < t.size(); ++i) t[i] += a[i];
    out.add_atom(std::move(t), atom.phi);
  }
  return out;
}

/// Moments of the operator measure against M: beta -> sum of t^beta Phi(M).
template <class R>
std::map<MultiIndex, HermMatrix<R>, MiLess> moments(const AtomicOperatorMeasure<R>& mu,
                                                    const HermMatrix<R>& mat, int up_to) {
  std::map<MultiIndex, HermMatrix<R>, MiLess> out;
  AtomicMatrixMeasure<R> applied = mu.apply_to(mat);
  for (const MultiIndex& beta : multi_indices_up_to(mu.vars(), up_to))
    out.emplace(beta, applied.moment(beta));
  return out;
}

/// Linear map with polynomial entries in y; evaluation yields a LinMap.
template <class R>
class LinMapPoly {
 public:
  LinMapPoly() : n_(0), m_(0) {}
  LinMapPoly(int n, int m)
      : n_(n), m_(m),
        e_(static_cast<size_t>(m) * m * m * m, RealPoly<R>(n)) {
    if (n <= 0 || m <= 0) throw DimensionError("bad map shape");
  }
  static LinMapPoly constant(int n, const LinMap<R>& c) {
    LinMapPoly out(n, c.mat_dim());
    for (int r = 0; r < c.coord_dim(); ++r)
      for (int col = 0; col < c.coord_dim(); ++col)
        if (!scalar_traits<R>::is_zero(c.entry(r, col)))
          out.entry(r, col) = RealPoly<R>::constant(n, c.entry(r, col));
    return out;
  }

  int vars() const { return n_; }
  int mat_dim() const { return m_; }
  int coord_dim() const { return m_ * m_; }

  RealPoly<R>& entry(int row, int col) {
    return e_[static_cast<size_t>(row) * coord_dim() + col];
  }
  const RealPoly<R>& entry(int row, int col) const {
    return e_[static_cast<size_t>(row) * coord_dim() + col];
  }

  int degree() const {
    int d = 0;
    for (const auto& p : e_) d = std::max(d, p.degree());
    return d;
  }

  LinMap<R> at(const std::vector<R>& y) const {
    LinMap<R> out(m_);
    for (int r = 0; r < coord_dim(); ++r)
      for (int c = 0; c < coord_dim(); ++c) out.entry(r, c) = entry(r, c).evaluate(y);
    return out;
  }

 private:
  int n_, m_;
  std::vector<RealPoly<R>> e_;
};

/// Family of operator-valued measures indexed by the base point y: atoms are
/// fixed, maps are either constant or polynomial in y.
template <class R>
class MeasureFamily {
 public:
  enum class Dependence { Constant, PolynomialWeights };

  struct Atom {
    std::vector<R> t;
    LinMapPoly<R> phi;
  };

  MeasureFamily() : n_(0), m_(0), dep_(Dependence::Constant) {}
  MeasureFamily(int n, int m, Dependence dep) : n_(n), m_(m), dep_(dep) {
    if (n <= 0 || m <= 0) throw DimensionError("bad family shape");
  }

  static MeasureFamily constant(const AtomicOperatorMeasure<R>& mu) {
    MeasureFamily out(mu.vars(), mu.mat_dim(), Dependence::Constant);
    for (const auto& atom : mu.atoms())
      out.add_atom(atom.t, LinMapPoly<R>::constant(mu.vars(), atom.phi));
    return out;
  }

  int vars() const { return n_; }
  int mat_dim() const { return m_; }
  Dependence dependence() const { return dep_; }
  const std::vector<Atom>& atoms() const { return a_; }

  void add_atom(std::vector<R> t, LinMapPoly<R> phi) {
    if (static_cast<int>(t.size()) != n_) throw DimensionError("atom point arity");
    if (phi.mat_dim() != m_ || phi.vars() != n_)
      throw DimensionError("atom map shape");
    if (dep_ == Dependence::Constant && phi.degree() > 0)
      throw ValidationError("constant family with non-constant weights");
    a_.push_back(Atom{std::move(t), std::move(phi)});
  }

  AtomicOperatorMeasure<R> at(const std::vector<R>& y) const {
    AtomicOperatorMeasure<R> out(n_, m_);
    for (const auto& atom : a_) out.add_atom(atom.t, atom.phi.at(y));
    return out;
  }

 private:
  int n_, m_;
  Dependence dep_;
  std::vector<Atom> a_;
};

/// Build the operator table of T from the family:
///   T(H_ij x^beta)(y) = sum_atoms Phi_atom(y)[H_ij] (y + t_atom)^beta,
/// assembled exactly as a polynomial in y.
template <class R>
OperatorTable<R> operator_from_family(const MeasureFamily<R>& f, int d) {
  int n = f.vars(), m = f.mat_dim();
  OperatorTable<R> t(n, m, d);
  // Per atom and basis element: the matrix polynomial y -> Phi_a(y)[H_ij].
  std::vector<std::vector<MatrixPoly<R>>> phi_img(f.atoms().size());
  for (size_t ai = 0; ai < f.atoms().size(); ++ai) {
    const auto& atom = f.atoms()[ai];
    phi_img[ai].reserve(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        // column (i,j) of the entry matrix, re-expanded in the H basis
        MatrixPoly<R> img(n, m);
        int col = i * m + j;
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const RealPoly<R>& w = atom.phi.entry(k * m + l, col);
            if (w.is_zero()) continue;
            img += w * MatrixPoly<R>::constant(n, basis_element<R>(m, k, l));
          }
        phi_img[ai].push_back(std::move(img));
      }
  }
  for (const MultiIndex& beta : t.betas()) {
    // (y + t_a)^beta as a scalar polynomial in y, exact binomial expansion
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        MatrixPoly<R> img(n, m);
        for (size_t ai = 0; ai < f.atoms().size(); ++ai) {
          RealPoly<R> mono(n);
          mono.add_term(beta, scalar_traits<R>::one());
          RealPoly<R> shifted = mono.shift(f.atoms()[ai].t);
          img += shifted * phi_img[ai][static_cast<size_t>(i) * m + j];
        }
        t.set_action(i, j, beta, std::move(img));
      }
  }
  return t;
}

}  // namespace matpres
