#pragma once

#include <atomic>
#include <optional>
#include <utility>
#include <vector>

#include "matpres/parallel.hpp"
#include "matpres/polynomial.hpp"
#include "matpres/rng.hpp"
#include "matpres/spectral.hpp"

namespace matpres {

/// Evaluation region: all of R^n, or an axis-aligned box.
struct Region {
  bool whole_space = true;
  std::vector<std::pair<double, double>> bounds;  // per axis, used when !whole_space

  static Region all() { return Region{}; }
  static Region box(std::vector<std::pair<double, double>> b) {
    for (const auto& [lo, hi] : b)
      if (!(lo < hi)) throw DimensionError("box bounds must satisfy lo < hi");
    return Region{false, std::move(b)};
  }
};

/// A pointwise positivity refutation: v* p(x) v = value < 0.
struct PointWitness {
  std::vector<double> x;
  CVec<double> v;
  double value = 0.0;
};

/// Deterministic candidate points: a coarse lattice first (integer lattice on
/// [-5,5]^n, or its affine image in the box), then random points (Gaussian at
/// sigma 1 and 10 for R^n, uniform for a box), all from the given seed.
inline std::vector<std::vector<double>> candidate_points(int n, const Region& region,
                                                         std::size_t count,
                                                         std::uint64_t seed) {
  if (!region.whole_space && static_cast<int>(region.bounds.size()) != n)
    throw DimensionError("region arity mismatch");
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  // lattice: 11^n points visited center-out (shells of growing sup-norm), so
  // the origin and its neighbours are always scanned even under a tight cap
  std::size_t lattice_cap = std::max<std::size_t>(1, count / 2);
  for (int r = 0; r <= 5 && pts.size() < lattice_cap; ++r) {
    std::vector<int> idx(n, 0);  // odometer over [-r, r]^n
    int side = 2 * r + 1;
    bool done = false;
    while (!done && pts.size() < lattice_cap) {
      int sup = 0;
      for (int i = 0; i < n; ++i) sup = std::max(sup, std::abs(idx[i] - r));
      if (sup == r) {  // skip interior points already emitted by smaller shells
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) {
          double t = idx[i] - r;
          if (region.whole_space)
            x[i] = t;
          else {
            auto [lo, hi] = region.bounds[i];
            x[i] = lo + (t + 5.0) / 10.0 * (hi - lo);
          }
        }
        pts.push_back(std::move(x));
      }
      int p = 0;
      while (p < n && ++idx[p] == side) idx[p++] = 0;
      done = p == n;
    }
  }
  Rng rng(seed);
  while (pts.size() < count) {
    std::vector<double> x(n);
    if (region.whole_space) {
      double sigma = pts.size() % 2 == 0 ? 1.0 : 10.0;
      for (int i = 0; i < n; ++i) x[i] = sigma * rng.gaussian();
    } else {
      for (int i = 0; i < n; ++i) {
        auto [lo, hi] = region.bounds[i];
        x[i] = rng.uniform(lo, hi);
      }
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

/// Hunt for a point where p is not PSD. Scans the candidate sequence, taking
/// the minimum eigenvector as the refutation direction; the first (lowest
/// index) hit is returned regardless of thread schedule. Absence of a witness
/// is evidence, not a certificate.
inline std::optional<PointWitness> falsify_positivity(const MatrixPoly<double>& p,
                                                      const Region& region,
                                                      std::size_t budget = 10000,
                                                      std::uint64_t seed = kDefaultSeed,
                                                      double neg_tol = 1e-10) {
  auto pts = candidate_points(p.vars(), region, budget, seed);
  std::vector<char> hit(pts.size(), 0);
  std::vector<PointWitness> wit(pts.size());
  std::atomic<std::size_t> first_hit{pts.size()};
  parallel_for(pts.size(), [&](std::size_t i) {
    if (i > first_hit.load(std::memory_order_relaxed) + 256) return;  // soft cutoff
    HermMatrix<double> val = p.evaluate(pts[i]);
    auto [lam, v] = min_eig_pair(val);
    if (lam < -neg_tol * std::max(1.0, val.max_abs())) {
      double value = quad_form(val, v);  // re-derives lam through the quadratic form
      wit[i] = PointWitness{pts[i], std::move(v), value};
      hit[i] = 1;
      std::size_t cur = first_hit.load();
      while (i < cur && !first_hit.compare_exchange_weak(cur, i)) {
      }
    }
  });
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (hit[i]) return wit[i];
  return std::nullopt;
}

/// Random vector polynomial with small integer coefficients: m components,
/// each with a couple of terms of degree <= half_degree.
template <class R>
std::vector<CplxPoly<R>> random_vector_poly(Rng& rng, int n, int m, int half_degree) {
  auto monos = multi_indices_up_to(n, half_degree);
  std::vector<CplxPoly<R>> q(m, CplxPoly<R>(n));
  for (int k = 0; k < m; ++k) {
    int terms = static_cast<int>(rng.int_range(1, 3));
    for (int t = 0; t < terms; ++t) {
      const MultiIndex& a = monos[rng.int_range(0, static_cast<std::int64_t>(monos.size()) - 1)];
      Cplx<R> c(scalar_traits<R>::from_int(rng.int_range(-2, 2)),
                scalar_traits<R>::from_int(rng.int_range(-2, 2)));
      q[k].add_term(a, c);
    }
  }
  bool all_zero = true;
  for (const auto& comp : q) all_zero = all_zero && comp.terms().empty();
  if (all_zero) q[0].add_term(MultiIndex(n, 0), Cplx<R>(scalar_traits<R>::one()));
  return q;
}

/// Assemble sum_r q_r q_r* from vector polynomials; PSD everywhere by
/// construction.  Only the lower triangle is accumulated, so the result is
/// Hermitian by construction; the diagonal's imaginary part (zero up to the
/// summation order of floating-point rounding) is dropped.
template <class R>
MatrixPoly<R> sos_from_vectors(const std::vector<std::vector<CplxPoly<R>>>& squares,
                               int n, int m) {
  std::map<MultiIndex, DenseMat<R>, MiLess> acc;
  for (const auto& q : squares) {
    for (int k = 0; k < m; ++k)
      for (int l = 0; l <= k; ++l)
        for (const auto& [a, ca] : q[k].terms())
          for (const auto& [b, cb] : q[l].terms()) {
            MultiIndex g = mi_add(a, b);
            auto it = acc.find(g);
            if (it == acc.end()) it = acc.emplace(g, DenseMat<R>(m)).first;
            it->second.at(k, l) += ca * cb.conj();
          }
  }
  MatrixPoly<R> p(n, m);
  for (const auto& [g, d] : acc) {
    HermMatrix<R> c(m);
    for (int k = 0; k < m; ++k) {
      c.set_diag(k, d.at(k, k).re);
      for (int l = 0; l < k; ++l) c.set_lower(k, l, d.at(k, l));
    }
    if (!c.is_zero()) p.add_term(g, c);
  }
  return p;
}

/// Random sum-of-squares sample: count squares of random vector polynomials.
/// Positive semidefinite at every real point, in both scalar modes.
template <class R>
MatrixPoly<R> sos_sample(Rng& rng, int n, int m, int half_degree, int count = 2) {
  std::vector<std::vector<CplxPoly<R>>> squares;
  squares.reserve(count);
  for (int r = 0; r < count; ++r)
    squares.push_back(random_vector_poly<R>(rng, n, m, half_degree));
  return sos_from_vectors(squares, n, m);
}

/// (x_i - a)(b - x_i): nonnegative exactly on the slab a <= x_i <= b.
template <class R>
RealPoly<R> box_factor(int n, int axis, const R& a, const R& b) {
  RealPoly<R> xi(n);
  MultiIndex e(n, 0);
  e[axis] = 1;
  xi.add_term(e, scalar_traits<R>::one());
  RealPoly<R> lo = xi - RealPoly<R>::constant(n, a);
  RealPoly<R> hi = RealPoly<R>::constant(n, b) - xi;
  return lo * hi;
}

}  // namespace matpres
