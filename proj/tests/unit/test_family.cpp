#include <gtest/gtest.h>

#include <cmath>

#include "gsbound/error.hpp"
#include "gsbound/family.hpp"
#include "gsbound/rng.hpp"

using namespace gsbound;

namespace {
Vector v1(double x) { return Vector::Constant(1, x); }
}  // namespace

TEST(Family, ExponentialCumulants) {
  const auto f = make_family("exponential");
  EXPECT_NEAR(cumulant_derivative(*f, v1(1.0), {0, 0, 0}), -2.0, 1e-12);
  EXPECT_NEAR(cumulant_derivative(*f, v1(2.0), {0}), -0.5, 1e-12);
  EXPECT_NEAR(mean_function(*f, v1(2.0))(0), -0.5, 1e-12);
  EXPECT_NEAR(suff_stat_covariance(*f, v1(2.0))(0, 0), 0.25, 1e-12);
  EXPECT_NEAR(fourth_cumulant(*f, v1(1.0), 0, 0, 0, 0), 6.0, 1e-9);
}

TEST(Family, NormalCumulants) {
  const auto f = make_family("normal");
  EXPECT_NEAR(cumulant_derivative(*f, v1(3.0), {0}), 3.0, 1e-12);
  EXPECT_NEAR(cumulant_derivative(*f, v1(0.3), {0, 0, 0}), 0.0, 1e-12);
}

TEST(Family, ThirdDerivativeMatchesFiniteDifference) {
  for (const char* name : {"exponential", "normal", "bernoulli"}) {
    const auto f = make_family(name);
    const Vector eta = v1(std::string(name) == "exponential" ? 1.3 : 0.4);
    const double exact = cumulant_derivative(*f, eta, {0, 0, 0});
    const int idx[] = {0, 0, 0};
    const double fd = central_difference([&](const Vector& e) { return f->log_partition(e); },
                                         eta, idx, 1e-3);
    EXPECT_LT(std::abs(fd - exact), 1e-4 * std::max(1.0, std::abs(exact))) << name;
  }
  const auto f = make_family("normal2");
  Vector eta(2);
  eta << 0.5, -0.7;
  for (auto idx : {std::array<int, 3>{0, 0, 1}, std::array<int, 3>{0, 1, 1}, std::array<int, 3>{1, 1, 1}}) {
    const double exact = cumulant_derivative(*f, eta, idx);
    const double fd = central_difference([&](const Vector& e) { return f->log_partition(e); },
                                         eta, idx, 1e-3);
    EXPECT_LT(std::abs(fd - exact), 1e-4 * std::max(1.0, std::abs(exact)));
  }
}

TEST(Family, MuEpsilon) {
  const auto e = make_family("exponential");
  EXPECT_NEAR(mu_epsilon(*e, {v1(1.0), 0.5}, 0, 0, 0), 16.0, 1e-9);
  EXPECT_NEAR(mu_epsilon(*e, {v1(1.0), 0.0}, 0, 0, 0), 2.0, 1e-9);
  const auto n = make_family("normal");
  EXPECT_EQ(mu_epsilon(*n, {v1(0.0), 3.0}, 0, 0, 0), 0.0);
  EXPECT_THROW(mu_epsilon(*e, {v1(1.0), 1.0}, 0, 0, 0), DomainError);
}

TEST(Family, MeanFunctionJacobianIsCovariance) {
  const auto f = make_family("normal2");
  Vector eta(2);
  eta << 0.2, -1.1;
  const Matrix v = suff_stat_covariance(*f, eta);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vector up = eta, dn = eta;
    up(j) += h;
    dn(j) -= h;
    const Vector col = (mean_function(*f, up) - mean_function(*f, dn)) / (2 * h);
    EXPECT_NEAR(col(0), v(0, j), 1e-5);
    EXPECT_NEAR(col(1), v(1, j), 1e-5);
  }
  EXPECT_GT(v.determinant(), 0.0);
}

TEST(Family, InverseMeanRoundTrip) {
  for (const char* name : {"exponential", "normal", "bernoulli"}) {
    const auto f = make_family(name);
    const Vector eta = v1(std::string(name) == "exponential" ? 0.7 : -0.3);
    const auto back = f->inverse_mean(mean_function(*f, eta));
    ASSERT_TRUE(back.has_value());
    EXPECT_NEAR((*back)(0), eta(0), 1e-10) << name;
  }
}

TEST(Family, SampledSuffStatMean) {
  for (const char* name : {"exponential", "normal", "bernoulli"}) {
    const auto f = make_family(name);
    const Vector eta = v1(std::string(name) == "exponential" ? 1.0 : 0.4);
    const double mean = mean_function(*f, eta)(0);
    const double sd = std::sqrt(suff_stat_covariance(*f, eta)(0, 0));
    Rng rng(11, 0);
    const int n = 1000000;
    double s = 0, y = 0;
    for (int i = 0; i < n; ++i) {
      f->sample(eta, rng, std::span<double>(&y, 1));
      s += f->suff_stat(std::span<const double>(&y, 1))(0);
    }
    EXPECT_NEAR(s / n, mean, 4 * sd / std::sqrt(n)) << name;
  }
}

TEST(Family, GroupSumSamplerMoments) {
  for (const char* name : {"exponential", "normal", "bernoulli"}) {
    const auto f = make_family(name);
    const Vector eta = v1(std::string(name) == "exponential" ? 1.5 : 0.4);
    const long count = 7;
    const double mean = count * mean_function(*f, eta)(0);
    const double var = count * suff_stat_covariance(*f, eta)(0, 0);
    Rng rng(12, 0);
    const int reps = 200000;
    double s1 = 0, s2 = 0;
    for (int r = 0; r < reps; ++r) {
      double t = 0;
      ASSERT_TRUE(f->sample_suff_sum(eta, count, rng, &t));
      s1 += t;
      s2 += (t - mean) * (t - mean);
    }
    EXPECT_NEAR(s1 / reps, mean, 4 * std::sqrt(var / reps)) << name;
    EXPECT_NEAR(s2 / reps / var, 1.0, 0.03) << name;
  }
}

TEST(Family, AdmissibilityAndSupport) {
  const auto e = make_family("exponential");
  EXPECT_FALSE(e->admissible(v1(0.0)));
  EXPECT_FALSE(e->admissible(v1(-1.0)));
  const double neg = -1.0, pos = 2.0;
  EXPECT_FALSE(e->in_support(std::span<const double>(&neg, 1)));
  EXPECT_TRUE(e->in_support(std::span<const double>(&pos, 1)));
  EXPECT_THROW(make_family("nope"), ValidationError);
}

TEST(Family, DensityIntegratesToOne) {
  const auto e = make_family("exponential");
  double s = 0;
  const double h = 1e-3;
  for (double y = h / 2; y < 40; y += h) s += std::exp(log_density(*e, std::span<const double>(&y, 1), v1(1.3))) * h;
  EXPECT_NEAR(s, 1.0, 1e-6);
}
