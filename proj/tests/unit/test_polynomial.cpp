#include <gtest/gtest.h>

#include "gsbound/error.hpp"
#include "gsbound/polynomial.hpp"

using namespace gsbound;

namespace {
RationalPolynomial poly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.emplace_back(x);
  return RationalPolynomial(std::move(v));
}
}  // namespace

TEST(Polynomial, ArithmeticAndEvaluation) {
  const auto p = poly({1, 2});   // 1 + 2x
  const auto q = poly({-1, 0, 1});  // x^2 - 1
  EXPECT_EQ((p * q).degree(), 3);
  EXPECT_EQ((p * q)(Rational(2)), Rational(15));
  EXPECT_EQ((q - q).degree(), -1);
  EXPECT_EQ(q.derivative(), poly({0, 2}));
  EXPECT_EQ(q.to_string(), "x^2 - 1");
  EXPECT_DOUBLE_EQ(q.eval(0.5), -0.75);
}

TEST(Polynomial, DivisionAndGcd) {
  const auto a = poly({-1, 0, 1});      // (x-1)(x+1)
  const auto b = poly({-1, 1});         // x - 1
  const auto [quo, rem] = divmod(a, b);
  EXPECT_EQ(quo, poly({1, 1}));
  EXPECT_TRUE(rem.is_zero());
  const auto c = poly({1, -2, 1});      // (x-1)^2
  EXPECT_EQ(gcd(a, c), b);
  EXPECT_EQ(squarefree(c * poly({2, 1})), poly({-2, 1, 1}));
  EXPECT_THROW(divmod(a, RationalPolynomial{}), ValidationError);
}

TEST(Polynomial, SturmCounts) {
  // (x - 1/4)(x - 1/2)(x - 3): two roots in (0, 1].
  const auto p = RationalPolynomial({Rational(-3, 8), Rational(1), Rational(0)}) ;
  const auto q = poly({-1, 4}) * poly({-1, 2}) * poly({-3, 1});
  EXPECT_EQ(count_roots(q, Rational(0), Rational(1)), 2);
  EXPECT_EQ(count_roots(q, Rational(0), Rational(5)), 3);
  EXPECT_EQ(count_roots(q * q, Rational(0), Rational(5)), 3);
  EXPECT_EQ(count_roots(p, Rational(0), Rational(1)), 1);
}

TEST(Polynomial, IsolationFindsRationalRootsExactly) {
  const auto q = poly({-1, 4}) * poly({-1, 2}) * poly({-2, 0, 1});  // 1/4, 1/2, +-sqrt(2)
  const auto roots = isolate_roots(q, Rational(0), Rational(2), Rational(1, 1 << 30));
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_TRUE(roots[0].exact());
  EXPECT_EQ(roots[0].lo, Rational(1, 4));
  EXPECT_EQ(roots[1].lo, Rational(1, 2));
  EXPECT_FALSE(roots[2].exact());
  EXPECT_LT(roots[2].lo * roots[2].lo, Rational(2));
  EXPECT_GT(roots[2].hi * roots[2].hi, Rational(2));
}

TEST(Polynomial, SimplestRational) {
  EXPECT_EQ(simplest_rational(Rational(3, 10), Rational(4, 10)), Rational(1, 3));
  EXPECT_EQ(simplest_rational(Rational(1, 2), Rational(1, 2)), Rational(1, 2));
  EXPECT_EQ(simplest_rational(Rational(1, 2), Rational(3, 2)), Rational(1));
}

TEST(Polynomial, SupAbs) {
  const auto p = poly({0, 1, -1});  // x - x^2, max 1/4 at 1/2
  const auto s = sup_abs(p, Rational(0), Rational(1));
  EXPECT_TRUE(s.exact());
  EXPECT_EQ(s.upper, Rational(1, 4));
  const auto c = poly({0, -3, 0, 1});  // x^3 - 3x on [0, 2]: |.| max 2 at x = 1 and x = 2
  EXPECT_EQ(sup_abs(c, Rational(0), Rational(2)).upper, Rational(2));
}
