#include <gtest/gtest.h>

#include <stdexcept>

#include "matpres/multiindex.hpp"

using namespace matpres;

TEST(MultiIndex, DegreeAndOrdering) {
  EXPECT_EQ(mi_degree({0, 0}), 0);
  EXPECT_EQ(mi_degree({2, 3}), 5);
  // graded-lex: degree first
  EXPECT_TRUE(mi_less({0, 2}, {3, 0}));
  EXPECT_FALSE(mi_less({1, 1}, {1, 1}));
  // same degree: lexicographic tie-break is a strict total order
  EXPECT_NE(mi_less({2, 0}, {0, 2}), mi_less({0, 2}, {2, 0}));
}

TEST(MultiIndex, ComponentwiseOps) {
  MultiIndex a{2, 1}, b{1, 1};
  EXPECT_TRUE(mi_leq(b, a));
  EXPECT_FALSE(mi_leq(a, b));
  EXPECT_EQ(mi_add(a, b), (MultiIndex{3, 2}));
  EXPECT_EQ(mi_sub(a, b), (MultiIndex{1, 0}));
  EXPECT_THROW(mi_sub(b, a), std::domain_error);
}

TEST(MultiIndex, BinomialOracle) {
  // classical values
  EXPECT_EQ(binomial(0, 0), 1);
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(10, 5), 252);
  EXPECT_EQ(binomial(62, 31), 465428353255261088LL);
  EXPECT_EQ(binomial(4, 7), 0);
  EXPECT_THROW(binomial(63, 31), NumericError);
  // Pascal identity over a grid
  for (int n = 1; n <= 20; ++n)
    for (int k = 1; k <= n; ++k)
      EXPECT_EQ(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
}

TEST(MultiIndex, MultiBinomialFactors) {
  // product over coordinates
  EXPECT_EQ(mi_binomial({3, 2}, {1, 1}), 6);
  EXPECT_EQ(mi_binomial({4, 0}, {2, 0}), 6);
  EXPECT_EQ(mi_binomial({1, 1}, {2, 0}), 0);
}

TEST(MultiIndex, EnumerationCountsAndOrder) {
  // |{alpha : |alpha| <= d}| = C(n + d, n)
  auto all = multi_indices_up_to(2, 3);
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(all.front(), (MultiIndex{0, 0}));
  for (size_t k = 1; k < all.size(); ++k) EXPECT_TRUE(mi_less(all[k - 1], all[k]));

  auto all3 = multi_indices_up_to(3, 4);
  EXPECT_EQ(all3.size(), 35u);

  auto below = multi_indices_below({1, 2});
  EXPECT_EQ(below.size(), 6u);  // (1+1)*(2+1)
  for (const auto& a : below) EXPECT_TRUE(mi_leq(a, (MultiIndex{1, 2})));
}
