#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace gsbound {

enum class Provenance { closed_form, monte_carlo };

// A scalar with its Monte Carlo standard error. Arithmetic propagates errors
// to first order, treating operands as independent.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  Provenance provenance = Provenance::closed_form;
  std::int64_t count = 0;

  static Estimate exact(double v) { return {v, 0.0, Provenance::closed_form, 0}; }
  static Estimate mc(double v, double se, std::int64_t n) {
    return {v, se, Provenance::monte_carlo, n};
  }
  bool is_mc() const { return provenance == Provenance::monte_carlo; }
  // value + k standard errors
  double upper(double k) const { return value + k * std_error; }
};

namespace detail {
inline Estimate combine(double v, double se, const Estimate& a, const Estimate& b) {
  Estimate r;
  r.value = v;
  r.std_error = se;
  r.provenance = (a.is_mc() || b.is_mc()) ? Provenance::monte_carlo : Provenance::closed_form;
  if (a.count == 0) r.count = b.count;
  else if (b.count == 0) r.count = a.count;
  else r.count = std::min(a.count, b.count);
  return r;
}
}  // namespace detail

inline Estimate operator+(const Estimate& a, const Estimate& b) {
  return detail::combine(a.value + b.value, std::hypot(a.std_error, b.std_error), a, b);
}

inline Estimate& operator+=(Estimate& a, const Estimate& b) { return a = a + b; }

inline Estimate operator*(double s, const Estimate& a) {
  Estimate r = a;
  r.value = s * a.value;
  r.std_error = std::abs(s) * a.std_error;
  return r;
}

inline Estimate operator*(const Estimate& a, const Estimate& b) {
  return detail::combine(a.value * b.value,
                         std::hypot(b.value * a.std_error, a.value * b.std_error), a, b);
}

inline Estimate sqrt(const Estimate& a) {
  Estimate r = a;
  const double v = std::max(a.value, 0.0);
  r.value = std::sqrt(v);
  // Near zero the first-order rule blows up; sqrt(v + se) - sqrt(v) bounds it.
  r.std_error = v > a.std_error ? a.std_error / (2.0 * r.value) : std::sqrt(v + a.std_error) - r.value;
  return r;
}

}  // namespace gsbound
