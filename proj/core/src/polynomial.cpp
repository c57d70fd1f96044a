#include "gsbound/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "gsbound/error.hpp"

namespace gsbound {

namespace {

using boost::multiprecision::cpp_int;

int sign(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

Rational abs_r(const Rational& x) { return x < 0 ? Rational(-x) : x; }

cpp_int floor_r(const Rational& x) {
  const cpp_int num = boost::multiprecision::numerator(x);
  const cpp_int den = boost::multiprecision::denominator(x);
  cpp_int q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

std::vector<RationalPolynomial> sturm_chain(const RationalPolynomial& p) {
  std::vector<RationalPolynomial> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    auto r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(Rational(-1) * r);
  }
  return chain;
}

int sign_changes(const std::vector<RationalPolynomial>& chain, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& q : chain) {
    const int s = sign(q(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

RationalPolynomial::RationalPolynomial(std::vector<Rational> coefficients)
    : c_(std::move(coefficients)) {
  trim();
}

void RationalPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational RationalPolynomial::coefficient(int k) const {
  return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : Rational(0);
}

Rational RationalPolynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RationalPolynomial::eval(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->convert_to<double>();
  return acc;
}

RationalPolynomial RationalPolynomial::derivative(int times) const {
  std::vector<Rational> c = c_;
  for (int t = 0; t < times && !c.empty(); ++t) {
    std::vector<Rational> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<long>(k));
    c = std::move(d);
  }
  return RationalPolynomial(std::move(c));
}

RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = a.coefficient(static_cast<int>(i)) + b.coefficient(static_cast<int>(i));
  }
  return RationalPolynomial(std::move(c));
}

RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b) {
  return a + Rational(-1) * b;
}

RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return RationalPolynomial(std::move(c));
}

RationalPolynomial operator*(const Rational& s, const RationalPolynomial& a) {
  std::vector<Rational> c = a.c_;
  for (auto& x : c) x *= s;
  return RationalPolynomial(std::move(c));
}

std::string RationalPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& v = c_[static_cast<std::size_t>(k)];
    if (v == 0) continue;
    if (!first) out << (v < 0 ? " - " : " + ");
    else if (v < 0) out << '-';
    const Rational a = abs_r(v);
    if (a != 1 || k == 0) out << a;
    if (k >= 1) out << 'x';
    if (k >= 2) out << '^' << k;
    first = false;
  }
  return out.str();
}

std::pair<RationalPolynomial, RationalPolynomial> divmod(const RationalPolynomial& a,
                                                         const RationalPolynomial& b) {
  if (b.is_zero()) throw ValidationError("polynomial division by zero");
  std::vector<Rational> rem = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {RationalPolynomial{}, a};
  std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree() - db; k >= 0; --k) {
    const Rational f = rem[static_cast<std::size_t>(k + db)] / b.leading();
    quo[static_cast<std::size_t>(k)] = f;
    for (int j = 0; j <= db; ++j) {
      rem[static_cast<std::size_t>(k + j)] -= f * b.coefficient(j);
    }
  }
  return {RationalPolynomial(std::move(quo)), RationalPolynomial(std::move(rem))};
}

RationalPolynomial gcd(RationalPolynomial a, RationalPolynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return Rational(1) / a.leading() * a;
}

RationalPolynomial squarefree(const RationalPolynomial& p) {
  if (p.degree() < 1) return p;
  const auto g = gcd(p, p.derivative());
  return divmod(p, g).first;
}

int count_roots(const RationalPolynomial& p, const Rational& a, const Rational& b) {
  if (p.is_zero()) throw ValidationError("zero polynomial has infinitely many roots");
  if (p.degree() == 0 || !(a < b)) return 0;
  const auto chain = sturm_chain(squarefree(p));
  return sign_changes(chain, a) - sign_changes(chain, b);
}

Rational simplest_rational(const Rational& a, const Rational& b) {
  if (a < 0 || b < a) throw ValidationError("simplest_rational needs 0 <= a <= b");
  const cpp_int fa = floor_r(a);
  if (Rational(fa) == a) return a;
  if (Rational(fa + 1) <= b) return Rational(fa + 1);
  // a, b lie strictly inside (fa, fa + 1).
  return Rational(fa) + Rational(1) / simplest_rational(Rational(1) / (b - Rational(fa)),
                                                        Rational(1) / (a - Rational(fa)));
}

std::vector<RootInterval> isolate_roots(const RationalPolynomial& p, const Rational& a,
                                        const Rational& b, const Rational& width) {
  if (p.is_zero()) throw ValidationError("cannot isolate roots of the zero polynomial");
  std::vector<RootInterval> out;
  if (p.degree() == 0 || !(a < b)) return out;
  const RationalPolynomial sf = squarefree(p);
  const auto chain = sturm_chain(sf);
  auto count = [&](const Rational& lo, const Rational& hi) {
    return sign_changes(chain, lo) - sign_changes(chain, hi);
  };

  // Work list of half-open intervals (lo, hi] with their root counts.
  struct Item {
    Rational lo, hi;
    int roots;
  };
  std::vector<Item> work{{a, b, count(a, b)}};
  while (!work.empty()) {
    Item it = work.back();
    work.pop_back();
    if (it.roots == 0) continue;
    if (it.roots == 1) {
      Rational lo = it.lo, hi = it.hi;
      bool found = false;
      if (sf(hi) == 0) {
        out.push_back({hi, hi});
        continue;
      }
      while (hi - lo >= width) {
        const Rational mid = (lo + hi) / 2;
        if (sf(mid) == 0) {
          out.push_back({mid, mid});
          found = true;
          break;
        }
        if (count(lo, mid) == 1) hi = mid;
        else lo = mid;
      }
      if (found) continue;
      // A rational root with a small denominator is the simplest rational
      // in a narrow enclosure.
      if (lo >= 0) {
        const Rational r = simplest_rational(lo, hi);
        if (r > lo && sf(r) == 0) {
          out.push_back({r, r});
          continue;
        }
      }
      out.push_back({lo, hi});
      continue;
    }
    const Rational mid = (it.lo + it.hi) / 2;
    const int left = count(it.lo, mid);
    work.push_back({mid, it.hi, it.roots - left});
    work.push_back({it.lo, mid, left});
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& x, const RootInterval& y) { return x.lo < y.lo; });
  return out;
}

SupBound sup_abs(const RationalPolynomial& p, const Rational& a, const Rational& b) {
  if (b < a) throw ValidationError("sup_abs: empty interval");
  SupBound s;
  s.lower = std::max(abs_r(p(a)), abs_r(p(b)));
  s.upper = s.lower;
  const RationalPolynomial dp = p.derivative();
  if (dp.is_zero() || a == b) return s;
  // |p'| <= sum |c_k| R^k on [a, b] with R = max(|a|, |b|, 1).
  Rational radius = std::max({abs_r(a), abs_r(b), Rational(1)});
  Rational slope = 0, power = 1;
  for (const auto& c : dp.coefficients()) {
    slope += abs_r(c) * power;
    power *= radius;
  }
  const Rational width = Rational(1) / (cpp_int(1) << 64);
  for (const auto& r : isolate_roots(dp, a, b, width)) {
    if (r.exact()) {
      const Rational v = abs_r(p(r.lo));
      s.lower = std::max(s.lower, v);
      s.upper = std::max(s.upper, v);
    } else {
      const Rational edge = std::max(abs_r(p(r.lo)), abs_r(p(r.hi)));
      s.lower = std::max(s.lower, edge);
      s.upper = std::max(s.upper, Rational(edge + slope * (r.hi - r.lo)));
    }
  }
  return s;
}

}  // namespace gsbound
