#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "matpres/errors.hpp"

namespace matpres {

/// Exponent tuple of a monomial x^alpha in n variables.
using MultiIndex = std::vector<int>;

inline int mi_degree(const MultiIndex& a) {
  return std::accumulate(a.begin(), a.end(), 0);
}

/// Graded-lexicographic order: first by total degree, then lexicographically
/// on the exponent tuple. The canonical term order for serialization.
inline bool mi_less(const MultiIndex& a, const MultiIndex& b) {
  int da = mi_degree(a), db = mi_degree(b);
  if (da != db) return da < db;
  return a < b;
}

struct MiLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return mi_less(a, b); }
};

/// Componentwise alpha <= beta ("alpha divides x^beta").
inline bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw DimensionError("multi-index arity mismatch");
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw DimensionError("multi-index arity mismatch");
  MultiIndex r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) throw DimensionError("multi-index arity mismatch");
  MultiIndex r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    r[i] = a[i] - b[i];
    if (r[i] < 0) throw std::domain_error("multi-index subtraction went negative");
  }
  return r;
}

/// Exact C(n, k) in int64 with overflow detection. Degrees are bounded by the
/// operator truncation limit (<= 20 per axis), far below the overflow range,
/// but the guard makes that a hard error instead of silent wraparound.
inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (n > 62) throw NumericError("binomial overflow guard: n > 62");
  // every C(n, k) with n <= 62 fits in int64, but the running product needs
  // headroom before its exact division, hence the 128-bit intermediate
  unsigned __int128 r = 1;
  if (k > n - k) k = n - k;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i);
    r /= static_cast<unsigned>(i);
  }
  return static_cast<std::int64_t>(r);
}

/// Product of componentwise binomials C(beta_i, alpha_i).
inline std::int64_t mi_binomial(const MultiIndex& beta, const MultiIndex& alpha) {
  std::int64_t r = 1;
  for (size_t i = 0; i < beta.size(); ++i) {
    r *= binomial(beta[i], alpha[i]);
    if (r < 0) throw NumericError("binomial overflow");
  }
  return r;
}

namespace detail {
inline void mi_enumerate_rec(int n, int pos, int remaining, MultiIndex& cur,
                             std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    mi_enumerate_rec(n, pos + 1, remaining - v, cur, out);
  }
}
}  // namespace detail

/// All multi-indices with |alpha| <= d in graded-lex order.
inline std::vector<MultiIndex> multi_indices_up_to(int n, int d) {
  if (n <= 0) throw DimensionError("multi-index enumeration requires n >= 1");
  std::vector<MultiIndex> out;
  MultiIndex cur(n, 0);
  for (int deg = 0; deg <= d; ++deg) {
    std::vector<MultiIndex> level;
    detail::mi_enumerate_rec(n, 0, deg, cur, level);
    std::sort(level.begin(), level.end());
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// All alpha <= beta componentwise (the support of the binomial sums).
inline std::vector<MultiIndex> multi_indices_below(const MultiIndex& beta) {
  std::vector<MultiIndex> out{MultiIndex(beta.size(), 0)};
  for (size_t i = 0; i < beta.size(); ++i) {
    std::vector<MultiIndex> next;
    next.reserve(out.size() * (beta[i] + 1));
    for (const auto& a : out)
      for (int v = 0; v <= beta[i]; ++v) {
        MultiIndex b = a;
        b[i] = v;
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace matpres
