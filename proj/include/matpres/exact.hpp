#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace matpres {

using Rational = boost::multiprecision::cpp_rational;

/// Element of the field Q(sqrt 2), stored as a + b*sqrt(2) with rational a, b.
///
/// This is the smallest field containing every constant the Hermitian basis
/// introduces (the basis elements have 1/sqrt(2) entries, and coordinates of a
/// rational matrix land in sqrt(2)*Q), so it is the scalar type under which the
/// whole pipeline — basis coordinates, canonical representations, moments,
/// block moment matrices — is exact.
class ExactReal {
 public:
  ExactReal() : a_(0), b_(0) {}
  ExactReal(int v) : a_(v), b_(0) {}            // NOLINT: implicit by design
  ExactReal(std::int64_t v) : a_(v), b_(0) {}   // NOLINT
  ExactReal(Rational v) : a_(std::move(v)), b_(0) {}  // NOLINT
  ExactReal(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

  static ExactReal sqrt2() { return ExactReal(Rational(0), Rational(1)); }
  /// 1/sqrt(2) == sqrt(2)/2.
  static ExactReal inv_sqrt2() { return ExactReal(Rational(0), Rational(1, 2)); }

  const Rational& rat_part() const { return a_; }
  const Rational& sqrt2_part() const { return b_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

  /// -1, 0 or +1. Exact: when the parts disagree in sign, compare a^2 vs 2 b^2.
  int sign() const {
    int sa = a_.sign(), sb = b_.sign();
    if (sa == 0) return sb;
    if (sb == 0) return sa;
    if (sa == sb) return sa;
    // a and b*sqrt(2) compete; |a| vs sqrt(2)|b|  <=>  a^2 vs 2 b^2.
    Rational d = a_ * a_ - 2 * b_ * b_;
    return d.sign() == 0 ? 0 : (d.sign() > 0 ? sa : sb);
  }

  ExactReal operator-() const { return ExactReal(-a_, -b_); }

  ExactReal& operator+=(const ExactReal& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  ExactReal& operator-=(const ExactReal& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  ExactReal& operator*=(const ExactReal& o) {
    Rational na = a_ * o.a_ + 2 * (b_ * o.b_);
    b_ = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(na);
    return *this;
  }
  ExactReal& operator/=(const ExactReal& o) {
    // 1/(a + b r) = (a - b r) / (a^2 - 2 b^2), nonzero denominator since
    // sqrt(2) is irrational.
    Rational n = o.a_ * o.a_ - 2 * (o.b_ * o.b_);
    Rational na = (a_ * o.a_ - 2 * (b_ * o.b_)) / n;
    b_ = (b_ * o.a_ - a_ * o.b_) / n;
    a_ = std::move(na);
    return *this;
  }

  friend ExactReal operator+(ExactReal x, const ExactReal& y) { return x += y; }
  friend ExactReal operator-(ExactReal x, const ExactReal& y) { return x -= y; }
  friend ExactReal operator*(ExactReal x, const ExactReal& y) { return x *= y; }
  friend ExactReal operator/(ExactReal x, const ExactReal& y) { return x /= y; }
  friend bool operator==(const ExactReal& x, const ExactReal& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const ExactReal& x, const ExactReal& y) { return !(x == y); }
  friend bool operator<(const ExactReal& x, const ExactReal& y) {
    return (x - y).sign() < 0;
  }
  friend bool operator>(const ExactReal& x, const ExactReal& y) { return y < x; }

  double to_double() const {
    long double v = static_cast<long double>(a_.convert_to<double>());
    if (!b_.is_zero())
      v += static_cast<long double>(b_.convert_to<double>()) *
           1.41421356237309504880168872420969808L;
    return static_cast<double>(v);
  }

  std::string str() const {
    std::string s = a_.str();
    if (!b_.is_zero()) s += " + (" + b_.str() + ")*sqrt2";
    return s;
  }

 private:
  Rational a_, b_;
};

/// Scalar abstraction: the library's algebra is templated over R in
/// { double, ExactReal }.
template <class R>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(std::int64_t v) { return static_cast<double>(v); }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static double inv_sqrt2() { return 0.7071067811865475244008443621048490L; }
};

template <>
struct scalar_traits<ExactReal> {
  static constexpr bool exact = true;
  static ExactReal zero() { return ExactReal(); }
  static ExactReal one() { return ExactReal(1); }
  static ExactReal from_int(std::int64_t v) { return ExactReal(v); }
  static double to_double(const ExactReal& v) { return v.to_double(); }
  static bool is_zero(const ExactReal& v) { return v.is_zero(); }
  static ExactReal inv_sqrt2() { return ExactReal::inv_sqrt2(); }
};

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double v) {
  if (v == 0.0) return Rational(0);
  int exp = 0;
  double frac = std::frexp(v, &exp);  // v = frac * 2^exp, |frac| in [1/2, 1)
  std::int64_t mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exp -= 53;
  Rational r(mant);
  if (exp > 0)
    r *= Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(2), exp));
  else if (exp < 0)
    r /= Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(2), -exp));
  return r;
}

inline ExactReal exact_from_double(double v) { return ExactReal(rational_from_double(v)); }

}  // namespace matpres
