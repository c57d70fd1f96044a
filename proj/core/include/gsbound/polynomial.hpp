#pragma once

#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gsbound {

using Rational = boost::multiprecision::cpp_rational;

// Univariate polynomial with exact rational coefficients, ascending powers.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coefficients);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coefficients() const { return c_; }
  Rational coefficient(int k) const;
  const Rational& leading() const { return c_.back(); }

  Rational operator()(const Rational& x) const;
  double eval(double x) const;
  RationalPolynomial derivative(int times = 1) const;

  friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b);
  friend RationalPolynomial operator*(const Rational& s, const RationalPolynomial& a);
  bool operator==(const RationalPolynomial& o) const { return c_ == o.c_; }

  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

// Quotient and remainder of a / b; b must be nonzero.
std::pair<RationalPolynomial, RationalPolynomial> divmod(const RationalPolynomial& a,
                                                         const RationalPolynomial& b);
// Monic greatest common divisor.
RationalPolynomial gcd(RationalPolynomial a, RationalPolynomial b);
// p / gcd(p, p'): same roots, all simple.
RationalPolynomial squarefree(const RationalPolynomial& p);

// Number of distinct real roots in (a, b], by Sturm's theorem.
int count_roots(const RationalPolynomial& p, const Rational& a, const Rational& b);

// Enclosure [lo, hi] of one real root; lo == hi when the root was found
// exactly.
struct RootInterval {
  Rational lo, hi;
  bool exact() const { return lo == hi; }
};

// Isolates every distinct real root in (a, b] to intervals narrower than
// `width`. Rational roots are returned exactly.
std::vector<RootInterval> isolate_roots(const RationalPolynomial& p, const Rational& a,
                                        const Rational& b, const Rational& width);

// Simplest rational (smallest denominator) in [a, b], 0 <= a <= b.
Rational simplest_rational(const Rational& a, const Rational& b);

// Certified enclosure of sup |p| over [a, b].
struct SupBound {
  Rational lower, upper;
  bool exact() const { return lower == upper; }
};
SupBound sup_abs(const RationalPolynomial& p, const Rational& a, const Rational& b);

}  // namespace gsbound
