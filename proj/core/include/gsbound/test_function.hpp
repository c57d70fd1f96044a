#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsbound/types.hpp"

namespace gsbound {

// Certified sup-norms of a test function and its partial derivatives.
// d_k bounds |d^k h / dx_{i1} ... dx_{ik}| over all index tuples and all x.
struct HNorms {
  double sup = 0.0;
  double d1 = 0.0;
  std::optional<double> d2;
  std::optional<double> d3;
  // sup |h - E h(Z)|; falls back to 2 * sup when absent.
  std::optional<double> centered_sup;

  void validate() const;
  double centered() const { return centered_sup ? *centered_sup : 2.0 * sup; }
};

struct TestFunction {
  std::string name;
  int dim = 0;
  std::function<double(std::span<const double>)> eval;
  HNorms norms;
  // E h(Z) for Z ~ N(0, I_dim), when known in closed form.
  std::optional<double> normal_mean;

  double operator()(std::span<const double> x) const { return eval(x); }
};

// amplitude * cos(a'x + phase).
TestFunction cosine_test(const Vector& a, double amplitude = 1.0, double phase = 0.0);
// amplitude * prod_i cos(a_i x_i).
TestFunction product_cosine_test(const Vector& a, double amplitude = 1.0);
TestFunction constant_test(int dim, double value);

// Five fixed cosine test functions on R^q used for bound-domination checks.
std::vector<TestFunction> cosine_suite(int q);

}  // namespace gsbound
