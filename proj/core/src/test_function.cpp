#include "gsbound/test_function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gsbound/error.hpp"

namespace gsbound {

void HNorms::validate() const {
  auto bad = [](double v) { return !(v >= 0.0) || !std::isfinite(v); };
  if (bad(sup) || bad(d1) || (d2 && bad(*d2)) || (d3 && bad(*d3)) ||
      (centered_sup && bad(*centered_sup))) {
    throw ValidationError("test function norms must be finite and nonnegative");
  }
}

TestFunction cosine_test(const Vector& a, double amplitude, double phase) {
  if (a.size() < 1) throw ValidationError("cosine test function needs a frequency vector");
  TestFunction f;
  std::ostringstream name;
  name << "cos(a'x+" << phase << ")*" << amplitude;
  f.name = name.str();
  f.dim = static_cast<int>(a.size());
  f.eval = [a, amplitude, phase](std::span<const double> x) {
    double s = phase;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * x[static_cast<std::size_t>(i)];
    return amplitude * std::cos(s);
  };
  const double amp = std::abs(amplitude);
  const double m = a.cwiseAbs().maxCoeff();
  const double mean = amplitude * std::cos(phase) * std::exp(-0.5 * a.squaredNorm());
  f.norms.sup = amp;
  f.norms.d1 = amp * m;
  f.norms.d2 = amp * m * m;
  f.norms.d3 = amp * m * m * m;
  // a = 0 makes h constant, so h - E h(Z) vanishes.
  f.norms.centered_sup = m == 0.0 ? 0.0 : amp + std::abs(mean);
  f.normal_mean = mean;
  return f;
}

TestFunction product_cosine_test(const Vector& a, double amplitude) {
  if (a.size() < 1) throw ValidationError("product cosine test function needs frequencies");
  TestFunction f;
  f.name = "prod cos(a_i x_i)";
  f.dim = static_cast<int>(a.size());
  f.eval = [a, amplitude](std::span<const double> x) {
    double p = amplitude;
    for (Eigen::Index i = 0; i < a.size(); ++i) p *= std::cos(a[i] * x[static_cast<std::size_t>(i)]);
    return p;
  };
  const double amp = std::abs(amplitude);
  const double m = a.cwiseAbs().maxCoeff();
  double mean = amplitude;
  for (Eigen::Index i = 0; i < a.size(); ++i) mean *= std::exp(-0.5 * a[i] * a[i]);
  f.norms.sup = amp;
  f.norms.d1 = amp * m;
  f.norms.d2 = amp * m * m;
  f.norms.d3 = amp * m * m * m;
  f.norms.centered_sup = m == 0.0 ? 0.0 : amp + std::abs(mean);
  f.normal_mean = mean;
  return f;
}

TestFunction constant_test(int dim, double value) {
  TestFunction f;
  f.name = "constant";
  f.dim = dim;
  f.eval = [value](std::span<const double>) { return value; };
  f.norms.sup = std::abs(value);
  f.norms.d1 = 0.0;
  f.norms.d2 = 0.0;
  f.norms.d3 = 0.0;
  f.norms.centered_sup = 0.0;
  f.normal_mean = value;
  return f;
}

std::vector<TestFunction> cosine_suite(int q) {
  if (q < 1) throw ValidationError("cosine suite needs q >= 1");
  auto named = [](TestFunction f, const char* name) {
    f.name = name;
    return f;
  };
  std::vector<TestFunction> out;
  Vector e1 = Vector::Zero(q);
  e1[0] = 1.0;
  out.push_back(named(cosine_test(e1), "cos_x1"));
  out.push_back(named(cosine_test(e1, 1.0, -std::numbers::pi / 2), "sin_x1"));
  out.push_back(named(cosine_test(Vector::Constant(q, 1.0 / std::sqrt(static_cast<double>(q))), 1.0,
                                  -std::numbers::pi / 2),
                      "sin_mean"));
  Vector last = Vector::Zero(q);
  last[q - 1] = 0.7;
  out.push_back(named(cosine_test(last, 0.5, 0.3), "half_cos_last"));
  out.push_back(named(cosine_test(Vector::Constant(q, 0.5), 1.0, -1.0), "cos_half_sum"));
  return out;
}

}  // namespace gsbound
