#pragma once

#include "matpres/exact.hpp"

namespace matpres {

/// Complex number over an arbitrary real scalar R. Deliberately not
/// std::complex: the exact pipeline needs R = ExactReal, and the contract for
/// floating point must not depend on platform std::complex arithmetic quirks.
template <class R>
struct Cplx {
  R re{}, im{};

  Cplx() = default;
  Cplx(R r) : re(std::move(r)) {}  // NOLINT: implicit by design
  Cplx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

  static Cplx i() { return Cplx(scalar_traits<R>::zero(), scalar_traits<R>::one()); }

  bool is_zero() const {
    return scalar_traits<R>::is_zero(re) && scalar_traits<R>::is_zero(im);
  }
  Cplx conj() const { return Cplx(re, -im); }

  Cplx operator-() const { return Cplx(-re, -im); }
  Cplx& operator+=(const Cplx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cplx& operator-=(const Cplx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Cplx& operator*=(const Cplx& o) {
    R nre = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(nre);
    return *this;
  }
  Cplx& operator*=(const R& s) {
    re = re * s;
    im = im * s;
    return *this;
  }

  friend Cplx operator+(Cplx x, const Cplx& y) { return x += y; }
  friend Cplx operator-(Cplx x, const Cplx& y) { return x -= y; }
  friend Cplx operator*(Cplx x, const Cplx& y) { return x *= y; }
  friend Cplx operator*(Cplx x, const R& s) { return x *= s; }
  friend Cplx operator*(const R& s, Cplx x) { return x *= s; }
  friend bool operator==(const Cplx& x, const Cplx& y) {
    return x.re == y.re && x.im == y.im;
  }
  friend bool operator!=(const Cplx& x, const Cplx& y) { return !(x == y); }
};

template <class R>
double cplx_abs(const Cplx<R>& z) {
  double re = scalar_traits<R>::to_double(z.re), im = scalar_traits<R>::to_double(z.im);
  return std::hypot(re, im);
}

}  // namespace matpres
