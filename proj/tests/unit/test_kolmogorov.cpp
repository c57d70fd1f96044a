#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gsbound/bounds.hpp"
#include "gsbound/error.hpp"
#include "gsbound/kolmogorov.hpp"
#include "gsbound/model.hpp"
#include "gsbound/montecarlo.hpp"

using namespace gsbound;

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// sup over x of |P_n(W <= x) - Phi(x1) Phi(x2)|, by brute force: at every pair
// of grid values (with +inf appended) compare both the closed and the
// left-limit empirical CDF with the normal CDF.
double brute_force_2d(const Matrix& w) {
  const Eigen::Index n = w.rows();
  std::vector<double> g0(w.col(0).data(), w.col(0).data() + n);
  std::vector<double> g1(w.col(1).data(), w.col(1).data() + n);
  g0.push_back(INFINITY);
  g1.push_back(INFINITY);
  double sup = 0.0;
  for (double x : g0) {
    for (double y : g1) {
      const double f = phi(x) * phi(y);
      for (int sx = 0; sx < 2; ++sx) {
        for (int sy = 0; sy < 2; ++sy) {
          long c = 0;
          for (Eigen::Index i = 0; i < n; ++i) {
            const bool in_x = sx ? w(i, 0) < x : w(i, 0) <= x;
            const bool in_y = sy ? w(i, 1) < y : w(i, 1) <= y;
            c += in_x && in_y;
          }
          sup = std::max(sup, std::abs(static_cast<double>(c) / n - f));
        }
      }
    }
  }
  return sup;
}

}  // namespace

TEST(Smoother, ThirdOrderCoefficientsAndNorm) {
  const auto s = hermite_smoother(3);
  EXPECT_EQ(s.poly.degree(), 7);
  EXPECT_EQ(s.poly.coefficient(7), Rational(-20));
  EXPECT_EQ(s.poly.coefficient(6), Rational(70));
  EXPECT_EQ(s.poly.coefficient(5), Rational(-84));
  EXPECT_EQ(s.poly.coefficient(4), Rational(35));
  for (int k = 0; k < 4; ++k) EXPECT_EQ(s.poly.coefficient(k), Rational(0));
  EXPECT_TRUE(s.norm_exact());
  EXPECT_EQ(s.norm_upper, Rational(105, 2));
  EXPECT_EQ(s.poly(Rational(1, 2)), Rational(1, 2));
  EXPECT_EQ(s.poly.derivative(3)(Rational(1, 2)), Rational(-105, 2));
}

TEST(Smoother, BoundaryConditionsAllOrders) {
  for (int m = 1; m <= 8; ++m) {
    const auto s = hermite_smoother(m);
    EXPECT_EQ(s.poly(Rational(0)), Rational(0)) << m;
    EXPECT_EQ(s.poly(Rational(1)), Rational(1)) << m;
    for (int k = 1; k <= m; ++k) {
      EXPECT_EQ(s.poly.derivative(k)(Rational(0)), Rational(0)) << m << " " << k;
      EXPECT_EQ(s.poly.derivative(k)(Rational(1)), Rational(0)) << m << " " << k;
    }
    EXPECT_LE(s.norm_lower, s.norm_upper);
    EXPECT_GE(s.norm_lower, Rational(1));
    // Monotone on [0, 1]: the derivative has no root inside.
    EXPECT_EQ(count_roots(s.poly.derivative(), Rational(1, 1 << 20), Rational((1 << 20) - 1, 1 << 20)), 0);
  }
  EXPECT_EQ(hermite_smoother(1).norm_upper, Rational(3, 2));
  EXPECT_THROW(hermite_smoother(0), UnsupportedError);
  EXPECT_THROW(hermite_smoother(9), UnsupportedError);
}

TEST(Smoother, NormEnclosureIsTight) {
  for (int m : {2, 4, 6}) {
    const auto s = hermite_smoother(m);
    EXPECT_LT(((s.norm_upper - s.norm_lower) / s.norm_upper).convert_to<double>(), 1e-12) << m;
  }
}

TEST(Converter, ZeroDistance) {
  for (int p : {2, 3, 4}) EXPECT_EQ(kolmogorov_from_smooth_m3(0.0, p), 0.0);
}

TEST(Converter, MatchesGeneralForm) {
  for (int p : {2, 3, 4}) {
    const KolParams params{p, 3, std::pow(2 * std::numbers::pi, -0.5 * p), 52.5};
    for (double d : {1e-30, 1e-12, 1e-8, 1e-3, 0.5, 2.0}) {
      EXPECT_EQ(kolmogorov_from_smooth_m3(d, p), kolmogorov_from_smooth(d, params));
    }
  }
}

TEST(Converter, Arithmetic) {
  const KolParams params{2, 3, 1.0 / (2 * std::numbers::pi), 52.5};
  EXPECT_NEAR(kolmogorov_from_smooth_raw(1.0, params), 52.5 * 52.5 + 2 + 1 / (2 * std::numbers::pi), 1e-9);
  EXPECT_EQ(kolmogorov_from_smooth(1.0, params), 1.0);
  const double d = 1e-8;
  const double expect = std::pow(d, 0.25) * (52.5 * 52.5 + 2 + std::pow(d, 0.25) / (2 * std::numbers::pi));
  EXPECT_NEAR(kolmogorov_from_smooth_raw(d, params), expect, 1e-15 * expect);
}

TEST(Converter, Monotone) {
  const KolParams params{3, 2, 0.1, 5.0};
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = kolmogorov_from_smooth(std::pow(10.0, -20.0 + i * 0.1), params);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Converter, Validation) {
  EXPECT_THROW(kolmogorov_from_smooth(0.1, KolParams{1, 3, 1, 2}), ValidationError);
  EXPECT_THROW(kolmogorov_from_smooth(0.1, KolParams{2, 3, 0, 2}), ValidationError);
  EXPECT_THROW(kolmogorov_from_smooth(0.1, KolParams{2, 3, 1, 0.5}), ValidationError);
  EXPECT_THROW(kolmogorov_from_smooth(-0.1, KolParams{2, 3, 1, 2}), ValidationError);
}

TEST(EmpiricalKolmogorov, IdenticalSamples) {
  Matrix a(4, 2);
  a << 0.1, 0.2, -1, 3, 2, 2, 0.5, -0.5;
  EXPECT_EQ(empirical_kolmogorov(a, a), 0.0);
}

TEST(EmpiricalKolmogorov, OneDimensionalHandCase) {
  Matrix w(5, 1);
  w << 0.3, -1.1, 0.8, 2.0, -0.2;
  std::vector<double> s(w.data(), w.data() + 5);
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (int i = 0; i < 5; ++i) {
    ks = std::max({ks, (i + 1) / 5.0 - phi(s[static_cast<std::size_t>(i)]), phi(s[static_cast<std::size_t>(i)]) - i / 5.0});
  }
  const auto r = empirical_kolmogorov(w);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.value, ks, 1e-15);
}

TEST(EmpiricalKolmogorov, TwoDimensionalBruteForce) {
  std::mt19937 gen(31);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 5; ++t) {
    Matrix w(50, 2);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(gen) * (1.0 + 0.2 * t);
    EXPECT_NEAR(empirical_kolmogorov(w).value, brute_force_2d(w), 1e-12);
  }
}

TEST(EmpiricalKolmogorov, GridModeBrackets) {
  std::mt19937 gen(37);
  std::normal_distribution<double> nd;
  Matrix w(400, 2);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(gen);
  const double exact = empirical_kolmogorov(w).value;
  const auto g = empirical_kolmogorov(w, {}, KolMode::grid, 40);
  EXPECT_FALSE(g.exact);
  EXPECT_LE(g.lower, exact + 1e-15);
  EXPECT_GE(g.upper, exact - 1e-15);
}

TEST(EmpiricalKolmogorov, CorrelatedReference) {
  std::mt19937 gen(41);
  std::normal_distribution<double> nd;
  Matrix cov(2, 2);
  cov << 1, 0.6, 0.6, 1;
  const Eigen::LLT<Matrix> llt(cov);
  Matrix w(300, 2);
  for (Eigen::Index i = 0; i < 300; ++i) {
    Vector z(2);
    z << nd(gen), nd(gen);
    w.row(i) = (llt.matrixL() * z).transpose();
  }
  NormalReference ref;
  ref.covariance = cov;
  ref.mc_draws = 100000;
  const auto r = empirical_kolmogorov(w, ref);
  EXPECT_GT(r.reference_std_error, 0.0);
  EXPECT_LT(r.value, 0.1);
  // Against an independent reference the same sample is visibly further off.
  EXPECT_GT(empirical_kolmogorov(w).value, r.value);
}

TEST(EmpiricalKolmogorov, Errors) {
  EXPECT_THROW(empirical_kolmogorov(Matrix(0, 2)), DomainError);
  NormalReference ref;
  ref.covariance = Matrix::Identity(3, 3);
  EXPECT_THROW(empirical_kolmogorov(Matrix::Zero(3, 2), ref), ValidationError);
}

TEST(EmpiricalKolmogorov, ConvertedBoundDominatesExponentialPipeline) {
  const auto design = equal_groups(1, 100, 2);
  HNorms norms;
  norms.sup = norms.d1 = 1.0;
  norms.d2 = norms.d3 = 1.0;
  const auto bound = exponential_closed_bound(design, 1.0, 0.5, norms);
  const double kol_bound = kolmogorov_from_smooth_m3(bound.total, design.stacked_dim());

  McConfig cfg;
  cfg.replications = 100000;
  cfg.seed = 515;
  const auto x = simulate_standardized(*make_model("exponential"), design, Vector::Ones(1), cfg);
  ASSERT_EQ(x.rows(), cfg.replications);
  const auto emp = empirical_kolmogorov(x, {}, KolMode::grid);
  const double se = 0.5 / std::sqrt(static_cast<double>(x.rows()));
  EXPECT_GT(emp.upper, 0.0);
  EXPECT_LE(emp.upper + 3.0 * se, kol_bound);
}
