#include <gtest/gtest.h>

#include "corpus.hpp"
#include "matpres/matpres.hpp"

using namespace matpres;

namespace {

AtomicMatrixMeasure<ExactReal> random_positive_matrix_measure(Rng& rng, int n, int m,
                                                              int atoms) {
  AtomicMatrixMeasure<ExactReal> mu(n, m);
  for (int a = 0; a < atoms; ++a) {
    std::vector<ExactReal> t(n);
    for (int i = 0; i < n; ++i) t[i] = corpus::rat(rng, 2, 2);
    // w = B B* is PSD with exact rational entries
    DenseMat<ExactReal> b(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        b.at(i, j) = Cplx<ExactReal>(corpus::rat(rng, 2, 2), corpus::rat(rng, 2, 2));
    DenseMat<ExactReal> bstar(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) bstar.at(i, j) = b.at(j, i).conj();
    mu.add_atom(std::move(t), corpus::herm_exact(b * bstar));
  }
  return mu;
}

MatrixPoly<ExactReal> random_matrix_poly(Rng& rng, int n, int m, int d) {
  MatrixPoly<ExactReal> p(n, m);
  auto monos = multi_indices_up_to(n, d);
  for (int k = 0; k < 3; ++k)
    p.add_term(monos[rng.int_range(0, static_cast<std::int64_t>(monos.size()) - 1)],
               corpus::random_herm(rng, m));
  return p;
}

}  // namespace

TEST(Measures, PairIntegralPointMass) {
  // single atom at 0 with weight I2: pairing any p gives tr p(0)
  AtomicMatrixMeasure<ExactReal> mu(1, 2);
  mu.add_atom({ExactReal(0)}, herm_identity<ExactReal>(2));
  MatrixPoly<ExactReal> z = MatrixPoly<ExactReal>::constant(1, herm_identity<ExactReal>(2));
  EXPECT_EQ(pair_integral(z, mu), ExactReal(2));
  // two atoms: values add; x^2 picks up the location
  mu.add_atom({ExactReal(2)}, herm_identity<ExactReal>(2) * ExactReal(Rational(1, 2)));
  MatrixPoly<ExactReal> xsq(1, 2);
  xsq.add_term({2}, herm_identity<ExactReal>(2));
  // <I2 * 4, I2/2> = 4; plus 0 from the origin atom
  EXPECT_EQ(pair_integral(xsq, mu), ExactReal(4));
}

TEST(Measures, MomentsAndMassOracle) {
  AtomicMatrixMeasure<ExactReal> mu(1, 2);
  mu.add_atom({ExactReal(1)}, herm_identity<ExactReal>(2));
  mu.add_atom({ExactReal(-1)}, herm_identity<ExactReal>(2));
  // even moments 2 I2, odd moments 0
  EXPECT_TRUE(mu.moment({0}) == herm_identity<ExactReal>(2) * ExactReal(2));
  EXPECT_TRUE(mu.moment({1}).is_zero());
  EXPECT_TRUE(mu.moment({2}) == herm_identity<ExactReal>(2) * ExactReal(2));
  EXPECT_TRUE(mu.moment({3}).is_zero());
  EXPECT_TRUE(mu.total_mass() == mu.moment({0}));
  EXPECT_TRUE(mu.is_positive());
}

TEST(Measures, AtomMergingAndPruning) {
  AtomicMatrixMeasure<ExactReal> mu(1, 1);
  HermMatrix<ExactReal> one(1);
  one.set_diag(0, ExactReal(1));
  mu.add_atom({ExactReal(Rational(1, 3))}, one);
  mu.add_atom({ExactReal(Rational(1, 3))}, one);
  ASSERT_EQ(mu.atoms().size(), 1u);
  EXPECT_EQ(mu.atoms()[0].w.diag(0), ExactReal(2));
  mu.add_atom({ExactReal(Rational(1, 3))}, one * ExactReal(-2));
  EXPECT_TRUE(mu.atoms().empty());
}

TEST(Measures, SwapIdentityInvariant) {
  // pair_integral(M * q, mu) = <integrate_matrix(q, mu), M> on random data
  Rng rng(515);
  for (int rep = 0; rep < 60; ++rep) {
    int n = 1 + static_cast<int>(rng.int_range(0, 1));
    int m = 1 + static_cast<int>(rng.int_range(0, 2));
    auto mu = random_positive_matrix_measure(rng, n, m, 3);
    RealPoly<ExactReal> q(n);
    auto monos = multi_indices_up_to(n, 3);
    for (int k = 0; k < 3; ++k)
      q.add_term(monos[rng.int_range(0, static_cast<std::int64_t>(monos.size()) - 1)],
                 corpus::rat(rng));
    auto mval = corpus::random_herm(rng, m);
    ExactReal lhs = pair_integral(q * MatrixPoly<ExactReal>::constant(n, mval), mu);
    ExactReal rhs = inner_product(integrate_matrix(q, mu), mval);
    EXPECT_TRUE((lhs - rhs).is_zero());
  }
}

TEST(Measures, PairingPositivityInvariant) {
  // positive measure against an sos matrix polynomial is >= 0
  Rng rng(616);
  for (int rep = 0; rep < 40; ++rep) {
    auto mu_exact = random_positive_matrix_measure(rng, 2, 2, 3);
    AtomicMatrixMeasure<double> mu(2, 2);
    for (const auto& atom : mu_exact.atoms()) {
      std::vector<double> t{scalar_traits<ExactReal>::to_double(atom.t[0]),
                            scalar_traits<ExactReal>::to_double(atom.t[1])};
      mu.add_atom(t, herm_to_double(atom.w));
    }
    MatrixPoly<double> p = sos_sample<double>(rng, 2, 2, 2);
    EXPECT_GE(pair_integral(p, mu), -1e-10 * std::max(1.0, p.max_abs()));
  }
}

TEST(Measures, ClassifyIdentityCertified) {
  auto cls = classify_atom(LinMap<double>::identity(2));
  EXPECT_EQ(cls.cls, AtomClass::CertifiedPositive);
  EXPECT_GE(cls.choi_min_eig, -1e-9);
  EXPECT_STREQ(atom_class_name(cls.cls), "certified-positive");
}

TEST(Measures, ClassifyNegationNotPositive) {
  LinMap<double> neg(2);
  for (int c = 0; c < 4; ++c) neg.entry(c, c) = -1.0;
  auto cls = classify_atom(neg);
  EXPECT_EQ(cls.cls, AtomClass::NotPositive);
  ASSERT_TRUE(cls.violating_direction.has_value());
  EXPECT_STREQ(atom_class_name(cls.cls), "not-positive");
}

TEST(Measures, ClassifyTransposeUnknown) {
  // X -> X^T is positive but not completely positive: Choi min eig -1/2 at m=2,
  // and no rank-one sample can refute plain positivity
  LinMap<ExactReal> tr(2);
  // in the H basis, transpose fixes H00, H11, H01 and negates H10
  tr.entry(0, 0) = ExactReal(1);
  tr.entry(3, 3) = ExactReal(1);
  tr.entry(1, 1) = ExactReal(1);
  tr.entry(2, 2) = ExactReal(-1);
  auto cls = classify_atom(tr);
  EXPECT_EQ(cls.cls, AtomClass::Unknown);
  EXPECT_NEAR(cls.choi_min_eig, -0.5, 1e-9);
  EXPECT_STREQ(atom_class_name(cls.cls), "unknown");
}

TEST(Measures, OperatorMeasureMomentConsistency) {
  // moments(mu, M) equals the matrix-measure route exactly
  Rng rng(717);
  for (int rep = 0; rep < 20; ++rep) {
    auto fam = corpus::random_positive_family(rng, 2, 2, 4);
    std::vector<ExactReal> y{ExactReal(0), ExactReal(0)};
    auto mu = fam.at(y);
    auto mval = corpus::random_herm(rng, 2);
    auto mom = moments(mu, mval, 3);
    auto direct = mu.apply_to(mval);
    for (const auto& [beta, value] : mom) EXPECT_TRUE(value == direct.moment(beta));
  }
}

TEST(Measures, IntegrateOperatorPositivity) {
  // certified-positive atoms + sos integrand => PSD result
  Rng rng(818);
  for (int rep = 0; rep < 20; ++rep) {
    auto fam = corpus::random_positive_family(rng, 2, 2, 3);
    auto mu_exact = fam.at({ExactReal(0), ExactReal(0)});
    AtomicOperatorMeasure<double> mu(2, 2);
    for (const auto& atom : mu_exact.atoms()) {
      std::vector<double> t{scalar_traits<ExactReal>::to_double(atom.t[0]),
                            scalar_traits<ExactReal>::to_double(atom.t[1])};
      mu.add_atom(t, linmap_to_double(atom.phi));
    }
    for (const auto& cls : mu.classify_atoms())
      ASSERT_EQ(cls.cls, AtomClass::CertifiedPositive);
    MatrixPoly<double> p = sos_sample<double>(rng, 2, 2, 1);
    HermMatrix<double> out = integrate_operator(p, mu);
    EXPECT_TRUE(is_psd(out, 1e-8));
  }
}

TEST(Measures, PushforwardShiftsAtoms) {
  AtomicMatrixMeasure<ExactReal> mu(1, 1);
  HermMatrix<ExactReal> one(1);
  one.set_diag(0, ExactReal(1));
  mu.add_atom({ExactReal(0)}, one);
  auto nu = pushforward(mu, {ExactReal(3)});
  ASSERT_EQ(nu.atoms().size(), 1u);
  EXPECT_EQ(nu.atoms()[0].t[0], ExactReal(3));
  // shifting by a then -a restores the measure
  auto back = pushforward(nu, {ExactReal(-3)});
  EXPECT_TRUE(back.moment({5}) == mu.moment({5}));
}

TEST(Measures, PushforwardBinomialCompatibility) {
  // first moment after shifting by 1 = first moment + total mass
  Rng rng(919);
  auto mu = random_positive_matrix_measure(rng, 1, 2, 3);
  auto nu = pushforward(mu, {ExactReal(1)});
  EXPECT_TRUE(nu.moment({1}) == mu.moment({1}) + mu.total_mass());
  // general binomial expansion at degree 3
  HermMatrix<ExactReal> want =
      mu.moment({3}) + mu.moment({2}) * ExactReal(3) + mu.moment({1}) * ExactReal(3) +
      mu.moment({0});
  EXPECT_TRUE(nu.moment({3}) == want);
}

TEST(Measures, TraceMeasureAndDensity) {
  Rng rng(121);
  auto mu = random_positive_matrix_measure(rng, 1, 2, 3);
  auto tau = trace_measure(mu);
  EXPECT_EQ(tau.mat_dim(), 1);
  // trace of each weight, at the same points
  ASSERT_EQ(tau.atoms().size(), mu.atoms().size());
  for (size_t k = 0; k < tau.atoms().size(); ++k)
    EXPECT_EQ(tau.atoms()[k].w.diag(0), mu.atoms()[k].w.trace());
  auto dens = rn_density(mu);
  ASSERT_EQ(dens.size(), mu.atoms().size());
  for (const auto& atom : dens) EXPECT_EQ(atom.w.trace(), ExactReal(1));
}

TEST(Measures, OperatorFromFamilyShift) {
  // constant family, single atom at t with the identity map: T p = p(x + t)
  AtomicOperatorMeasure<ExactReal> mu(1, 2);
  mu.add_atom({ExactReal(Rational(1, 2))}, LinMap<ExactReal>::identity(2));
  auto fam = MeasureFamily<ExactReal>::constant(mu);
  auto t = operator_from_family(fam, 3);
  for (const MultiIndex& beta : t.betas())
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        auto want = MatrixPoly<ExactReal>::monomial(1, beta, basis_element<ExactReal>(2, i, j))
                        .shift({ExactReal(Rational(1, 2))});
        EXPECT_EQ(max_coeff_dist(poly_to_double(t.action(i, j, beta)), poly_to_double(want)),
                  0.0);
      }
  // atom at 0 instead: the identity operator
  AtomicOperatorMeasure<ExactReal> mu0(1, 2);
  mu0.add_atom({ExactReal(0)}, LinMap<ExactReal>::identity(2));
  auto t0 = operator_from_family(MeasureFamily<ExactReal>::constant(mu0), 3);
  for (const MultiIndex& beta : t0.betas())
    EXPECT_EQ(max_coeff_dist(
                  poly_to_double(t0.action(0, 1, beta)),
                  poly_to_double(MatrixPoly<ExactReal>::monomial(
                      1, beta, basis_element<ExactReal>(2, 0, 1)))),
              0.0);
}

TEST(Measures, OperatorFromFamilyTraceMap) {
  // Phi(X) = <X, I2> I2 / 2 sends H_ij to (tr H_ij / 2) I2
  LinMap<ExactReal> phi(2);
  // coords of I2/2 are (1/2, 0, 0, 1/2); <H_ij, I2> = coords of H_ij against I2
  for (int col : {0, 3}) {
    phi.entry(0, col) = ExactReal(Rational(1, 2));
    phi.entry(3, col) = ExactReal(Rational(1, 2));
  }
  AtomicOperatorMeasure<ExactReal> mu(1, 2);
  mu.add_atom({ExactReal(0)}, phi);
  auto t = operator_from_family(MeasureFamily<ExactReal>::constant(mu), 2);
  // diagonal basis elements map to I2/2 x^beta; off-diagonal ones to 0
  for (const MultiIndex& beta : t.betas()) {
    auto img_diag = t.action(0, 0, beta);
    EXPECT_TRUE(img_diag.coeff(beta) ==
                herm_identity<ExactReal>(2) * ExactReal(Rational(1, 2)));
    EXPECT_TRUE(t.action(0, 1, beta).is_zero());
    EXPECT_TRUE(t.action(1, 0, beta).is_zero());
  }
}

TEST(Measures, FamilyMomentMatchesExtractedQ) {
  // Q_beta(M)(y) from the canonical rep of the built operator equals the
  // atomic moment sum of the family's measure at y, exactly
  Rng rng(232);
  for (int rep_i = 0; rep_i < 15; ++rep_i) {
    auto fam = corpus::random_positive_family(rng, 2, 2, 4);
    auto table = operator_from_family(fam, 3);
    auto rep = canonical_rep(table);
    std::vector<ExactReal> y{corpus::rat(rng), corpus::rat(rng)};
    auto mval = corpus::random_herm(rng, 2);
    auto mom = moments(fam.at(y), mval, 3);
    for (const MultiIndex& beta : rep.alphas()) {
      HermMatrix<ExactReal> got = rep.q_apply(beta, mval).evaluate(y);
      EXPECT_TRUE(got == mom.at(beta));
    }
  }
}

TEST(Measures, ConstantFamilyRejectsPolynomialWeights) {
  MeasureFamily<ExactReal> fam(1, 2, MeasureFamily<ExactReal>::Dependence::Constant);
  LinMapPoly<ExactReal> phi(1, 2);
  RealPoly<ExactReal> lin(1);
  lin.add_term({1}, ExactReal(1));
  phi.entry(0, 0) = lin;
  EXPECT_THROW(fam.add_atom({ExactReal(0)}, phi), ValidationError);
}
