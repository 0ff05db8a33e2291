#include <gtest/gtest.h>

#include <cmath>

#include "matpres/lognormal.hpp"
#include "matpres/spectral.hpp"

using namespace matpres;

TEST(Lognormal, QuadratureMassNormalized) {
  for (int nodes : {51, 501, 2001}) {
    QuadratureRule rule{10.0, nodes};
    EXPECT_NEAR(quadrature_mass(rule), 1.0, 1e-10) << nodes << " nodes";
  }
}

TEST(Lognormal, RuleValidation) {
  EXPECT_THROW((QuadratureRule{10.0, 50}), ValidationError);   // even
  EXPECT_THROW((QuadratureRule{10.0, 1}), ValidationError);    // too few
  EXPECT_THROW((QuadratureRule{0.0, 2001}), ValidationError);  // empty window
  EXPECT_NO_THROW((QuadratureRule{3.0, 51}));
}

TEST(Lognormal, MomentsMatchClosedForm) {
  // k-th moment of the standard log-normal is e^{k^2/2}
  EXPECT_NEAR(lognormal_moment(0), 1.0, 1e-9);
  EXPECT_NEAR(lognormal_moment(1), 1.6487212707001282, 1e-9);
  EXPECT_NEAR(lognormal_moment(2), 7.3890560989306495, 1e-8);
  for (int k = 0; k <= 12; ++k) {
    double ref = std::exp(0.5 * k * k);
    EXPECT_NEAR(lognormal_moment(k) / ref, 1.0, 1e-6) << "k=" << k;
  }
}

TEST(Lognormal, MomentOrderGuard) {
  EXPECT_THROW(lognormal_moment(13), DegreeError);
  EXPECT_THROW(lognormal_moment(-1), DegreeError);
  EXPECT_THROW(perturbed_moment(13), DegreeError);
}

TEST(Lognormal, PerturbedMomentsVanish) {
  // the sin(2 pi log x) perturbation is invisible to every integer moment
  EXPECT_NEAR(perturbed_moment(0), 0.0, 1e-6);
  EXPECT_NEAR(perturbed_moment(1), 0.0, 1e-6);
  EXPECT_NEAR(perturbed_moment(5), 0.0, 1e-5);
  for (int k = 0; k <= 8; ++k)
    EXPECT_NEAR(perturbed_moment(k), 0.0, 1e-5) << "k=" << k;
}

TEST(Lognormal, TailMatrixOracle) {
  // frozen high-precision values: I = int_0^inf phi(u) sin(2 pi u) du over
  // the unit-tail window gives offdiag 1/2 + 10 I
  auto tail = tail_matrix();
  EXPECT_NEAR(tail.diag(0), 0.5, 1e-8);
  EXPECT_NEAR(tail.diag(1), 0.5, 1e-8);
  EXPECT_NEAR(tail.at(0, 1).re, 1.1524328924651367, 5e-8);
  EXPECT_EQ(tail.at(0, 1).im, 0.0);
  double lo = min_eigenvalue(herm_to_double(tail));
  EXPECT_NEAR(lo, -0.65243289246513665, 5e-8);
  EXPECT_LT(lo, 0.0);
  EXPECT_FALSE(is_psd(herm_to_double(tail), 1e-9));
}

TEST(Lognormal, RunLabReproducesAtDefaults) {
  LabReport rep = run_lab();
  EXPECT_TRUE(rep.reproduced);
  EXPECT_EQ(rep.verdict(), "reproduced");
  EXPECT_TRUE(rep.gate_mass);
  EXPECT_TRUE(rep.gate_moments);
  EXPECT_TRUE(rep.gate_vanishing);
  EXPECT_TRUE(rep.gate_agreement);
  EXPECT_TRUE(rep.gate_tail);
  EXPECT_TRUE(rep.gate_convergence);
  EXPECT_TRUE(rep.tail_sign_stable);
  EXPECT_LT(rep.tail_min_eig, 0.0);
  ASSERT_EQ(rep.moments.size(), 9u);
  for (const auto& row : rep.moments) EXPECT_LE(row.rel_err, 1e-6);
  for (const auto& row : rep.vanishing) EXPECT_LE(std::abs(row.value), 1e-5);
  for (const auto& row : rep.agreement) EXPECT_LE(row.rel_diff, 1e-6);
  for (const auto& row : rep.convergence) EXPECT_LE(row.change, 1e-8);
  // the two-measure story: mu and nu share every functional yet nu's tail
  // matrix certifies they are different measures
  EXPECT_TRUE(rep.tail_not_psd);
}

TEST(Lognormal, CoarseGridFailsConvergenceGate) {
  LabReport rep = run_lab(QuadratureRule{10.0, 51});
  EXPECT_FALSE(rep.reproduced);
  EXPECT_FALSE(rep.gate_convergence);
  EXPECT_EQ(rep.verdict(), "failed");
}

TEST(Lognormal, NarrowWindowFails) {
  LabReport rep = run_lab(QuadratureRule{3.0, 2001});
  EXPECT_FALSE(rep.reproduced);
}

TEST(Lognormal, MomentExampleFromLabStory) {
  // moment of the matrix measure mu_{y,I2} at k = 2 doubles the scalar value
  double scalar = lognormal_moment(2);
  EXPECT_NEAR(2.0 * scalar, 2.0 * 7.3890560989306495, 1e-7);
}

TEST(Lognormal, Sin2PiExactAtIntegers) {
  // the reduced evaluation is exactly zero at integers, the core of the
  // vanishing mechanism
  for (int k = -20; k <= 20; ++k)
    EXPECT_EQ(static_cast<double>(lab_detail::sin2pi(static_cast<long double>(k))), 0.0);
  EXPECT_NEAR(static_cast<double>(lab_detail::sin2pi(0.25L)), 1.0, 1e-18);
}
