#include <gtest/gtest.h>

#include "corpus.hpp"
#include "matpres/polynomial.hpp"
#include "matpres/sampling.hpp"
#include "matpres/spectral.hpp"

using namespace matpres;

namespace {

RealPoly<ExactReal> random_scalar_poly(Rng& rng, int n, int d) {
  RealPoly<ExactReal> p(n);
  auto monos = multi_indices_up_to(n, d);
  for (int k = 0; k < 4; ++k)
    p.add_term(monos[rng.int_range(0, static_cast<std::int64_t>(monos.size()) - 1)],
               corpus::rat(rng));
  return p;
}

}  // namespace

TEST(Polynomial, EvaluateAndMultiplyExact) {
  // (x0 + 2 x1)(x0 - x1) = x0^2 + x0 x1 - 2 x1^2
  RealPoly<ExactReal> a(2), b(2);
  a.add_term({1, 0}, ExactReal(1));
  a.add_term({0, 1}, ExactReal(2));
  b.add_term({1, 0}, ExactReal(1));
  b.add_term({0, 1}, ExactReal(-1));
  RealPoly<ExactReal> p = a * b;
  EXPECT_EQ(p.coeff({2, 0}), ExactReal(1));
  EXPECT_EQ(p.coeff({1, 1}), ExactReal(1));
  EXPECT_EQ(p.coeff({0, 2}), ExactReal(-2));
  std::vector<ExactReal> x{ExactReal(3), ExactReal(Rational(1, 2))};
  EXPECT_EQ(p.evaluate(x), a.evaluate(x) * b.evaluate(x));
}

TEST(Polynomial, ShiftIsTranslationExact) {
  // p(x + a) evaluated at x equals p evaluated at x + a, on random data
  Rng rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    int n = 1 + static_cast<int>(rng.int_range(0, 2));
    RealPoly<ExactReal> p = random_scalar_poly(rng, n, 3);
    std::vector<ExactReal> a(n), x(n), xa(n);
    for (int i = 0; i < n; ++i) {
      a[i] = corpus::rat(rng);
      x[i] = corpus::rat(rng);
      xa[i] = x[i] + a[i];
    }
    EXPECT_EQ(p.shift(a).evaluate(x), p.evaluate(xa));
  }
}

TEST(Polynomial, DifferentiateOracle) {
  // d/dx0 of x0^3 x1 = 3 x0^2 x1; multi-derivative kills low degrees
  RealPoly<ExactReal> p(2);
  p.add_term({3, 1}, ExactReal(1));
  RealPoly<ExactReal> d = p.differentiate(0);
  EXPECT_EQ(d.coeff({2, 1}), ExactReal(3));
  RealPoly<ExactReal> dd = p.differentiate(0).differentiate(0).differentiate(0).differentiate(0);
  EXPECT_TRUE(dd.is_zero());
  // alpha-th partial of x^alpha at 0 is alpha! (via the matrix wrapper)
  MatrixPoly<ExactReal> q(2, 1);
  HermMatrix<ExactReal> one(1);
  one.set_diag(0, ExactReal(1));
  q.add_term({2, 2}, one);
  MatrixPoly<ExactReal> dq = q.partial({2, 2});
  EXPECT_EQ(dq.coeff({0, 0}).diag(0), ExactReal(4));
}

TEST(Polynomial, MatrixPolyActsEntrywise) {
  Rng rng(31);
  auto c0 = corpus::random_herm(rng, 2);
  auto c1 = corpus::random_herm(rng, 2);
  MatrixPoly<ExactReal> p(1, 2);
  p.add_term({0}, c0);
  p.add_term({2}, c1);
  std::vector<ExactReal> x{ExactReal(Rational(3, 2))};
  HermMatrix<ExactReal> v = p.evaluate(x);
  HermMatrix<ExactReal> want = c0 + c1 * ExactReal(Rational(9, 4));
  EXPECT_TRUE(v == want);
  EXPECT_EQ(p.degree(), 2);
  // scalar * matrix polynomial distributes
  RealPoly<ExactReal> s(1);
  s.add_term({1}, ExactReal(2));
  MatrixPoly<ExactReal> sp = s * p;
  EXPECT_TRUE(sp.coeff({1}) == c0 * ExactReal(2));
  EXPECT_TRUE(sp.coeff({3}) == c1 * ExactReal(2));
}

TEST(Polynomial, SosSamplesArePsdValued) {
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    MatrixPoly<double> p = sos_sample<double>(rng, 2, 2, 2);
    EXPECT_LE(p.degree(), 4);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x{rng.gaussian(), rng.gaussian()};
      EXPECT_GE(min_eigenvalue(p.evaluate(x)), -1e-9 * std::max(1.0, p.max_abs()));
    }
  }
}

TEST(Polynomial, BoxFactorSign) {
  RealPoly<double> f = box_factor<double>(1, 0, -1.0, 2.0);
  EXPECT_GT(f.evaluate({0.5}), 0.0);
  EXPECT_LT(f.evaluate({3.0}), 0.0);
  EXPECT_EQ(f.evaluate({2.0}), 0.0);
}

TEST(Polynomial, CandidatePointsStartAtOrigin) {
  auto pts = candidate_points(2, Region::all(), 40, kDefaultSeed);
  ASSERT_EQ(pts.size(), 40u);
  EXPECT_EQ(pts[0], (std::vector<double>{0.0, 0.0}));
  // the first 9 points are exactly the sup-norm <= 1 shell
  for (int k = 1; k < 9; ++k) {
    EXPECT_LE(std::abs(pts[k][0]), 1.0);
    EXPECT_LE(std::abs(pts[k][1]), 1.0);
  }
  auto box = candidate_points(1, Region::box({{0.0, 1.0}}), 30, kDefaultSeed);
  for (const auto& x : box) {
    EXPECT_GE(x[0], 0.0);
    EXPECT_LE(x[0], 1.0);
  }
}

TEST(Polynomial, FalsifyPositivityFindsNegativeDirection) {
  // p(x) = diag(1, x^2 - 1) is indefinite near 0
  MatrixPoly<double> p(1, 2);
  HermMatrix<double> e11(2), e00(2);
  e00.set_diag(0, 1.0);
  e11.set_diag(1, 1.0);
  p.add_term({0}, e00 - e11);
  p.add_term({2}, e11);
  auto w = falsify_positivity(p, Region::all(), 2000);
  ASSERT_TRUE(w.has_value());
  EXPECT_LT(w->value, 0.0);
  EXPECT_NEAR(quad_form(p.evaluate(w->x), w->v), w->value, 1e-12);
  // but a genuine sos has no witness
  Rng rng(9);
  MatrixPoly<double> s = sos_sample<double>(rng, 1, 2, 1);
  EXPECT_FALSE(falsify_positivity(s, Region::all(), 2000).has_value());
}
