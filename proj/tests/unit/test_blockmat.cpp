#include <gtest/gtest.h>

#include <random>

#include "gsbound/blockmat.hpp"
#include "gsbound/error.hpp"

using namespace gsbound;

namespace {
Vector v1(double x) { return Vector::Constant(1, x); }
}  // namespace

TEST(Blockmat, ExponentialGroupInformation) {
  const auto f = make_family("exponential");
  const auto info = info_bar(*f, make_design(1, {5, 10}), v1(2.0));
  EXPECT_NEAR(info.per_group[0](0, 0), 0.125, 1e-15);
  EXPECT_NEAR(info.per_analysis[1](0, 0), 0.25, 1e-15);
}

TEST(Blockmat, NormalGroupInformation) {
  const auto f = make_family("normal");
  const auto info = info_bar(*f, make_design(1, {3, 10}), v1(0.0));
  EXPECT_NEAR(info.per_group[0](0, 0), 0.3, 1e-15);
  EXPECT_NEAR(info.per_group[1](0, 0), 0.7, 1e-15);
}

TEST(Blockmat, TwoByTwoHandCase) {
  const auto design = make_design(1, {5, 10});
  const auto info = info_from_per_observation(Matrix::Identity(1, 1), design);
  const auto b = build_blocks(info, design);
  Matrix sigma(2, 2), a(2, 2), jt(2, 2), j(2, 2);
  sigma << 0.5, 0, 0, 0.5;
  a << 1, 0, 1, 1;
  jt << 0.5, 0.5, 0.5, 1;
  j << 2, 1, 1, 1;
  EXPECT_LT((b.sigma - sigma).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((b.a - a).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((b.j_tilde - jt).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((b.j - j).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((b.j_star * b.j * b.j_star - jt).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Blockmat, SingleBlock) {
  const auto design = make_design(2, {10});
  Matrix i(2, 2);
  i << 2, 0.5, 0.5, 1;
  const auto b = build_blocks(info_from_per_observation(i, design), design);
  EXPECT_LT((b.a - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((b.j_tilde - i).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Blockmat, SpdSqrt) {
  EXPECT_LT((spd_sqrt(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  const Matrix r = spd_sqrt(d);
  EXPECT_NEAR(r(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(r(1, 1), 3.0, 1e-15);
  EXPECT_NEAR(spd_sqrt(d, true)(1, 1), 1.0 / 3.0, 1e-15);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1;
  EXPECT_THROW(spd_sqrt(bad), NumericalError);
}

TEST(Blockmat, SpdSqrtRandom) {
  std::mt19937 gen(17);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Matrix g(6, 6);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(gen);
    const Matrix m = g * g.transpose() + 0.5 * Matrix::Identity(6, 6);
    const Matrix r = spd_sqrt(m);
    EXPECT_LT((r * r - m).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Blockmat, CFactor) {
  const auto f = make_family("exponential");
  EXPECT_NEAR(c_factor(info_bar(*f, equal_groups(1, 100, 2), v1(1.0))), std::sqrt(2.0), 1e-12);
  const auto n = make_family("normal");
  EXPECT_NEAR(c_factor(info_bar(*n, equal_groups(1, 100, 1), v1(0.0))), 1.0, 1e-15);
  // Doubling T quadruples the information and halves c.
  const auto design = equal_groups(1, 100, 2);
  const double c1 = c_factor(info_from_per_observation(Matrix::Constant(1, 1, 0.7), design));
  const double c2 = c_factor(info_from_per_observation(Matrix::Constant(1, 1, 2.8), design));
  EXPECT_NEAR(c2, c1 / 2, 1e-14);
}

TEST(Blockmat, WhiteningAndBandStructure) {
  std::mt19937 gen(23);
  std::normal_distribution<double> nd;
  const auto design = make_design(2, {10, 25, 30});
  Matrix g(2, 2);
  for (Eigen::Index i = 0; i < 4; ++i) g.data()[i] = nd(gen);
  const Matrix info = g * g.transpose() + Matrix::Identity(2, 2);
  const auto b = build_blocks(info_from_per_observation(info, design), design);
  const Matrix w = b.j_tilde_inv_sqrt;
  EXPECT_LT((w * b.j_tilde * w.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((b.j_inv_sqrt * b.j * b.j_inv_sqrt.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(w.block(4, 0, 2, 2).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(w.block(0, 2, 2, 4).cwiseAbs().maxCoeff(), 1e-12);
}
