#include <gtest/gtest.h>

#include <cmath>

#include "seqfam/float_check.hpp"

using seqfam::ExactScalar;
using seqfam::FamilySpec;
using seqfam::IntRange;

namespace {

// L_k = p L_{k-1} - q L_{k-2}, L_0 = 0, L_1 = 1, in plain 128-bit integers
__int128 lucas_oracle(int k, int p, int q) {
  __int128 a = 0, b = 1;
  for (int i = 0; i < k; ++i) {
    __int128 c = p * b - q * a;
    a = b;
    b = c;
  }
  return a;
}

double fib(int n) { return static_cast<double>(lucas_oracle(n, 1, -1)); }
double pell(int n) { return static_cast<double>(lucas_oracle(n, 2, -1)); }

}  // namespace

TEST(FloatProduct, FibonacciTableEntry) {
  auto r = seqfam::float_product(FamilySpec::fibonacci(), 6, 1);
  EXPECT_EQ(r.exact, ExactScalar(13));
  EXPECT_LT(r.relative_error, 1e-12);
  EXPECT_LT(r.imaginary_residual, 1e-12);
  EXPECT_EQ(r.family, "lucas:-1");
}

TEST(FloatProduct, SingleFactorIsExact) {
  auto r = seqfam::float_product(FamilySpec::fibonacci(), 1, 5);
  EXPECT_EQ(r.exact, ExactScalar(5));
  EXPECT_EQ(r.float_product.real(), 5.0);
  EXPECT_EQ(r.float_product.imag(), 0.0);
}

TEST(FloatProduct, LucasTwoAgainstRecursion) {
  auto r = seqfam::float_product(FamilySpec::lucas(2), 4, 3);
  EXPECT_EQ(lucas_oracle(5, 3, 2), 31);
  EXPECT_EQ(r.exact, ExactScalar(31));
  EXPECT_LT(r.relative_error, 1e-12);
}

TEST(FloatProduct, ZeroExactUsesAbsoluteScale) {
  auto r = seqfam::float_product(FamilySpec::power(0), 3, 0);
  EXPECT_TRUE(r.exact.is_zero());
  EXPECT_EQ(r.relative_error, 0.0);
  auto lucas_zero = seqfam::float_product(FamilySpec::lucas(1), 1, 0);
  EXPECT_TRUE(lucas_zero.exact.is_zero());
  EXPECT_LT(lucas_zero.relative_error, 1e-15);
}

TEST(FloatProduct, NonLucasFamilies) {
  EXPECT_LT(seqfam::float_product(FamilySpec::pochhammer(), 10, -3).relative_error, 1e-15);
  EXPECT_LT(seqfam::float_product(FamilySpec::power(ExactScalar::fraction(1, 2)), 7, 2).relative_error, 1e-15);
}

TEST(ChebyshevZeroSum, VanishesForAllN) {
  EXPECT_EQ(seqfam::chebyshev_zero_sum(1), 0.0);
  EXPECT_LT(std::fabs(seqfam::chebyshev_zero_sum(2)), 1e-15);
  for (int n = 1; n <= 200; ++n) EXPECT_LT(std::fabs(seqfam::chebyshev_zero_sum(n)), 1e-12) << n;
  EXPECT_THROW(seqfam::chebyshev_zero_sum(0), seqfam::ContractError);
}

TEST(FloatSweep, LucasGridWithinTolerance) {
  for (int q : {-2, -1, 1, 2}) {
    auto r = seqfam::float_sweep(FamilySpec::lucas(q), IntRange{1, 25}, IntRange{-10, 10}, 1e-9);
    EXPECT_EQ(r.results.size(), 25u * 21u);
    EXPECT_TRUE(r.ok()) << "q=" << q << " max rel " << r.max_relative_error;
    EXPECT_LT(r.max_relative_error, 1e-9);
    EXPECT_LT(r.max_imaginary_residual, 1e-9);
  }
}

TEST(FloatSweep, ReportsPointsOverTolerance) {
  auto r = seqfam::float_sweep(FamilySpec::lucas(-1), IntRange{20, 22}, IntRange{3, 4}, 0.0);
  EXPECT_EQ(r.failures, r.results.size());
  auto j = seqfam::to_json(r);
  EXPECT_EQ(j["failures"].size(), r.results.size());
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(ClosedForms, FibonacciBothDisplayedProducts) {
  for (int n = 2; n <= 30; ++n) {
    const double f = fib(n);
    EXPECT_LT(std::fabs(seqfam::fibonacci_real_product(n) - f) / f, 1e-9) << n;
    const auto c = seqfam::fibonacci_complex_product(n);
    EXPECT_LT(std::fabs(c.real() - f) / f, 1e-9) << n;
    EXPECT_LT(std::fabs(c.imag()) / f, 1e-9) << n;
  }
}

TEST(ClosedForms, PellProduct) {
  for (int n = 1; n <= 30; ++n) EXPECT_LT(std::fabs(seqfam::pell_real_product(n) - pell(n)) / pell(n), 1e-9) << n;
}
