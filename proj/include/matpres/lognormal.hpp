#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "matpres/errors.hpp"
#include "matpres/hermitian.hpp"
#include "matpres/spectral.hpp"

namespace matpres {

/// Numerical reproduction of the log-normal indeterminacy example. Everything
/// here lives in a self-contained 1-D quadrature world: the substitution
/// u = log x turns the log-normal density into the standard normal weight
/// phi(u), moments become int e^{ku} phi(u) du = e^{k^2/2}, and the
/// Stieltjes-type perturbation sin(2 pi log x) becomes sin(2 pi u), whose
/// weighted moments all vanish. Accumulation runs in long double (80-bit on
/// x86): the k-th moment carries the scale e^{k^2/2}, so double-precision
/// roundoff alone would already break the vanishing-moment gate at k = 8.

namespace lab_detail {

using LD = long double;

inline constexpr LD kPi = 3.14159265358979323846264338327950288L;

/// sin(2 pi u) with the integer part of u removed exactly first — the naive
/// sinl(2*pi*u) loses the periodicity to rounding of the product for |u| >> 1.
inline LD sin2pi(LD u) {
  LD r = u - std::nearbyint(u);
  return std::sin(2.0L * kPi * r);
}

inline LD phi(LD s) { return std::exp(-s * s / 2.0L) / std::sqrt(2.0L * kPi); }

/// Compensated (Kahan) accumulator; keeps the summation error at the level of
/// one rounding of the total rather than one per term.
class KahanSum {
 public:
  void add(LD x) {
    LD y = x - c_;
    LD t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  LD value() const { return s_; }

 private:
  LD s_ = 0.0L;
  LD c_ = 0.0L;
};

}  // namespace lab_detail

/// Composite Simpson rule for the substituted integrals: N (odd) nodes on a
/// window of half-width U around a quantity-dependent center.
struct QuadratureRule {
  double window = 10.0;  // U; the standard-normal tail beyond 10 is < 1e-22
  int nodes = 2001;      // N, odd; >= 100 nodes per sin(2 pi u) period

  QuadratureRule() = default;
  QuadratureRule(double u, int n) : window(u), nodes(n) {
    if (!(u > 0.0)) throw ValidationError("quadrature window must be positive");
    if (n < 3 || n % 2 == 0)
      throw ValidationError("Simpson rule needs an odd node count >= 3");
  }
};

namespace lab_detail {

/// Simpson sum of f over [center - U, center + U].
template <class F>
LD simpson(const QuadratureRule& rule, LD center, F&& f) {
  int n = rule.nodes;
  LD u0 = center - static_cast<LD>(rule.window);
  LD h = 2.0L * static_cast<LD>(rule.window) / static_cast<LD>(n - 1);
  KahanSum acc;
  for (int i = 0; i < n; ++i) {
    LD w = (i == 0 || i == n - 1) ? 1.0L : (i % 2 == 1 ? 4.0L : 2.0L);
    acc.add(w * f(u0 + static_cast<LD>(i) * h));
  }
  return acc.value() * h / 3.0L;
}

/// Simpson sum over [a, b] with the rule's node count.
template <class F>
LD simpson_ab(int nodes, LD a, LD b, F&& f) {
  LD h = (b - a) / static_cast<LD>(nodes - 1);
  KahanSum acc;
  for (int i = 0; i < nodes; ++i) {
    LD w = (i == 0 || i == nodes - 1) ? 1.0L : (i % 2 == 1 ? 4.0L : 2.0L);
    acc.add(w * f(a + static_cast<LD>(i) * h));
  }
  return acc.value() * h / 3.0L;
}

inline void check_order(int k) {
  if (k < 0 || k > 12)
    throw DegreeError("moment order must be in [0, 12] for the default window");
}

}  // namespace lab_detail

/// Total mass of the quadrature: the rule applied to phi alone. Reference 1.
inline double quadrature_mass(const QuadratureRule& rule) {
  using namespace lab_detail;
  return static_cast<double>(simpson(rule, 0.0L, [](LD s) { return phi(s); }));
}

/// int_0^inf x^k f(x) dx via u = log x, recentered at the integrand's peak:
/// e^{ku} phi(u) = e^{k^2/2} phi(u - k) exactly, so the window [k-U, k+U]
/// captures the mass uniformly in k and the scale factor leaves analytically.
inline double lognormal_moment(int k, const QuadratureRule& rule = {}) {
  using namespace lab_detail;
  check_order(k);
  LD s = simpson(rule, static_cast<LD>(k),
                 [&](LD u) { return phi(u - static_cast<LD>(k)); });
  return static_cast<double>(std::exp(static_cast<LD>(k) * k / 2.0L) * s);
}

/// int_0^inf x^k sin(2 pi log x) f(x) dx — zero for every integer k >= 0.
/// Same recentering; the surviving value is quadrature noise at the scale
/// e^{k^2/2} * (long double epsilon).
inline double perturbed_moment(int k, const QuadratureRule& rule = {}) {
  using namespace lab_detail;
  check_order(k);
  LD s = simpson(rule, static_cast<LD>(k),
                 [&](LD u) { return phi(u - static_cast<LD>(k)) * sin2pi(u); });
  return static_cast<double>(std::exp(static_cast<LD>(k) * k / 2.0L) * s);
}

/// The tail mass nu~((1, infinity)) of the 2x2 density
///   [ 1, 1 + 10 sin(2 pi log x); 1 + 10 sin(2 pi log x), 1 ] f(x) dx,
/// i.e. u in (0, U] after substitution: diagonal 1/2, off-diagonal
/// 1/2 + 10 I with I = int_0^inf sin(2 pi u) phi(u) du > 0. The off-diagonal
/// exceeds the diagonal, so the matrix has a negative eigenvalue even though
/// every total moment of the underlying signed density vanishes identically.
inline HermMatrix<double> tail_matrix(const QuadratureRule& rule = {}) {
  using namespace lab_detail;
  LD diag = simpson_ab(rule.nodes, 0.0L, static_cast<LD>(rule.window),
                       [](LD u) { return phi(u); });
  LD off = simpson_ab(rule.nodes, 0.0L, static_cast<LD>(rule.window), [](LD u) {
    return phi(u) * (1.0L + 10.0L * sin2pi(u));
  });
  HermMatrix<double> t(2);
  t.set_diag(0, static_cast<double>(diag));
  t.set_diag(1, static_cast<double>(diag));
  t.set_lower(1, 0, Cplx<double>(static_cast<double>(off)));
  return t;
}

struct MomentRow {
  int k = 0;
  double computed = 0.0;
  double reference = 0.0;
  double rel_err = 0.0;
};

struct VanishingRow {
  int k = 0;
  double value = 0.0;  // reference 0
};

struct AgreementRow {
  int k = 0;
  double mu_moment = 0.0;  // functional built from the log-normal measure
  double nu_moment = 0.0;  // same functional from the perturbed measure
  double rel_diff = 0.0;   // relative to max(1, e^{k^2/2})
};

struct ConvergenceRow {
  std::string quantity;
  double change = 0.0;  // relative change when the node count doubles
};

struct LabReport {
  double window = 0.0;
  int nodes = 0;
  double mass_defect = 0.0;
  std::vector<MomentRow> moments;        // k = 0..8
  std::vector<VanishingRow> vanishing;   // k = 0..8
  std::vector<AgreementRow> agreement;   // k = 0..8
  HermMatrix<double> tail;
  double tail_min_eig = 0.0;
  double tail_diag_err = 0.0;
  bool tail_not_psd = false;
  bool tail_sign_stable = false;  // across N in {1001, 2001, 4001}
  std::vector<ConvergenceRow> convergence;
  bool gate_mass = false;
  bool gate_moments = false;
  bool gate_vanishing = false;
  bool gate_agreement = false;
  bool gate_tail = false;
  bool gate_convergence = false;
  bool reproduced = false;
  std::string verdict() const { return reproduced ? "reproduced" : "failed"; }
};

/// Run every gate of the reproduction:
///  - mass: |quadrature(phi) - 1| <= 1e-10;
///  - moments: relative error <= 1e-6 against e^{k^2/2} for k <= 8;
///  - vanishing: |perturbed_moment(k)| <= 1e-5 for k <= 8;
///  - indeterminacy: the mu- and nu-built moment functionals agree to 1e-6
///    relative to the moment scale (their difference is exactly the vanishing
///    moment, scaled by the perturbation amplitude);
///  - tail: diagonal within 1e-8 of 1/2, minimum eigenvalue strictly
///    negative with a sign stable across N in {1001, 2001, 4001}, not PSD;
///  - convergence: doubling the node count moves every reported quantity by
///    <= 1e-8 relative to its scale.
inline LabReport run_lab(const QuadratureRule& rule = {}) {
  LabReport rep;
  rep.window = rule.window;
  rep.nodes = rule.nodes;
  QuadratureRule doubled(rule.window, 2 * rule.nodes - 1);

  rep.mass_defect = std::abs(quadrature_mass(rule) - 1.0);
  rep.gate_mass = rep.mass_defect <= 1e-10;

  rep.gate_moments = rep.gate_vanishing = rep.gate_agreement = true;
  rep.gate_convergence = true;
  auto conv = [&](const std::string& name, double v1, double v2, double scale) {
    double change = std::abs(v1 - v2) / std::max(1.0, std::abs(scale));
    rep.convergence.push_back({name, change});
    if (change > 1e-8) rep.gate_convergence = false;
  };

  for (int k = 0; k <= 8; ++k) {
    double ref = std::exp(0.5 * k * k);
    double mk = lognormal_moment(k, rule);
    double pk = perturbed_moment(k, rule);
    double rel = std::abs(mk - ref) / ref;
    rep.moments.push_back({k, mk, ref, rel});
    if (rel > 1e-6) rep.gate_moments = false;
    rep.vanishing.push_back({k, pk});
    if (std::abs(pk) > 1e-5) rep.gate_vanishing = false;
    // Pairing both measures against M = X = H_{1,2}: the mu functional gives
    // the plain moment, the nu functional adds 10x the vanishing moment.
    double mu_fn = mk;
    double nu_fn = mk + 10.0 * pk;
    double rel_diff = std::abs(nu_fn - mu_fn) / std::max(1.0, ref);
    rep.agreement.push_back({k, mu_fn, nu_fn, rel_diff});
    if (rel_diff > 1e-6) rep.gate_agreement = false;

    conv("moment(" + std::to_string(k) + ")", mk, lognormal_moment(k, doubled), ref);
    conv("perturbed(" + std::to_string(k) + ")", pk, perturbed_moment(k, doubled), ref);
  }

  rep.tail = tail_matrix(rule);
  rep.tail_min_eig = min_eigenvalue(rep.tail);
  rep.tail_diag_err = std::max(std::abs(rep.tail.diag(0) - 0.5),
                               std::abs(rep.tail.diag(1) - 0.5));
  rep.tail_not_psd = !is_psd(rep.tail);
  HermMatrix<double> tail2 = tail_matrix(doubled);
  conv("tail_diag", rep.tail.diag(0), tail2.diag(0), 1.0);
  conv("tail_offdiag", rep.tail.at(1, 0).re, tail2.at(1, 0).re, 1.0);

  bool sign_stable = true;
  bool negative = rep.tail_min_eig < 0.0;
  for (int n : {1001, 2001, 4001}) {
    double eig = min_eigenvalue(tail_matrix(QuadratureRule(rule.window, n)));
    if ((eig < 0.0) != negative) sign_stable = false;
  }
  rep.tail_sign_stable = sign_stable;
  rep.gate_tail = rep.tail_diag_err <= 1e-8 && rep.tail_min_eig < 0.0 &&
                  rep.tail_not_psd && rep.tail_sign_stable;

  rep.reproduced = rep.gate_mass && rep.gate_moments && rep.gate_vanishing &&
                   rep.gate_agreement && rep.gate_tail && rep.gate_convergence;
  return rep;
}

}  // namespace matpres
