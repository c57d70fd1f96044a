#include "gsbound/blockmat.hpp"

#include <cmath>
#include <ostream>

#include "gsbound/error.hpp"
#include "gsbound/rng.hpp"
#include "gsbound/stats.hpp"

namespace gsbound {

InfoSet info_from_per_observation(const Matrix& info, const GroupDesign& design) {
  if (info.rows() != design.dim() || info.cols() != design.dim()) {
    throw ValidationError("information matrix does not match the design dimension");
  }
  InfoSet out;
  out.per_observation = info;
  const double n = static_cast<double>(design.total());
  for (int k = 0; k < design.analyses(); ++k) {
    out.per_analysis.push_back(info * (static_cast<double>(design.cumulative(k)) / n));
    out.per_group.push_back(info * (static_cast<double>(design.group_size(k)) / n));
  }
  return out;
}

InfoSet info_bar(const ExponentialFamily& family, const GroupDesign& design, const Vector& eta) {
  if (design.dim() != family.dim()) throw ValidationError("design dimension mismatch");
  return info_from_per_observation(suff_stat_covariance(family, eta), design);
}

InfoSet info_bar(const ParametricModel& model, const GroupDesign& design, const Vector& theta,
                 long replications, std::uint64_t seed) {
  if (design.dim() != model.dim_param()) throw ValidationError("design dimension mismatch");
  if (!model.admissible(theta)) throw DomainError("information requested at an inadmissible parameter");
  if (auto closed = model.fisher_information(theta)) {
    return info_from_per_observation(*closed, design);
  }
  if (replications < 2) throw ValidationError("information estimate needs at least 2 draws");
  const int d = model.dim_param();
  std::vector<PowerSums> acc(static_cast<std::size_t>(d * d));
  std::vector<double> y(static_cast<std::size_t>(model.dim_obs()));
  Rng rng(seed, 0, 7);
  for (long r = 0; r < replications; ++r) {
    model.sample(theta, rng, y);
    const Matrix h = model.hessian(y, theta);
    for (int i = 0; i < d * d; ++i) acc[static_cast<std::size_t>(i)].add(-h(i % d, i / d));
  }
  Matrix mean(d, d), se(d, d);
  for (int i = 0; i < d * d; ++i) {
    mean(i % d, i / d) = acc[static_cast<std::size_t>(i)].mean();
    se(i % d, i / d) = acc[static_cast<std::size_t>(i)].mean_std_error();
  }
  InfoSet out = info_from_per_observation(0.5 * (mean + mean.transpose()), design);
  out.per_observation_std_error = se;
  return out;
}

Matrix spd_sqrt(const Matrix& m, bool invert) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("spd_sqrt: matrix must be square");
  if (!m.allFinite()) throw NumericalError("spd_sqrt: non-finite entries");
  const double scale = std::max(1.0, sup_norm(m));
  if (sup_norm(m - m.transpose()) > 1e-10 * scale) {
    throw NumericalError("spd_sqrt: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("spd_sqrt: eigendecomposition failed");
  const Vector& ev = eig.eigenvalues();
  const double hi = ev.maxCoeff();
  if (!(ev.minCoeff() > 0.0) || ev.minCoeff() <= 1e-14 * hi) {
    throw NumericalError("spd_sqrt: matrix is not positive definite");
  }
  const Vector root = invert ? Vector(ev.cwiseSqrt().cwiseInverse()) : Vector(ev.cwiseSqrt());
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

BlockMatrixSet build_blocks(const InfoSet& info, const GroupDesign& design) {
  const int d = design.dim();
  const int K = design.analyses();
  const int q = d * K;
  if (q > kMaxStackedDim) {
    throw ValidationError("stacked dimension " + std::to_string(q) + " exceeds the supported maximum " +
                          std::to_string(kMaxStackedDim));
  }
  if (static_cast<int>(info.per_analysis.size()) != K ||
      static_cast<int>(info.per_group.size()) != K) {
    throw ValidationError("information set does not match the design");
  }

  BlockMatrixSet b;
  b.d = d;
  b.analyses = K;
  b.j = Matrix::Zero(q, q);
  b.j_star = Matrix::Zero(q, q);
  b.a = Matrix::Zero(q, q);
  b.sigma = Matrix::Zero(q, q);
  b.sigma_sqrt = Matrix::Zero(q, q);
  b.sigma_inv_sqrt = Matrix::Zero(q, q);
  b.j_tilde_inv_sqrt = Matrix::Zero(q, q);
  const Matrix id = Matrix::Identity(d, d);

  std::vector<Matrix> g_inv_sqrt, analysis_inv;
  for (int k = 0; k < K; ++k) {
    Eigen::LLT<Matrix> llt(info.per_analysis[k]);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("information at analysis " + std::to_string(k + 1) +
                           " is not positive definite");
    }
    analysis_inv.push_back(llt.solve(id));
  }
  for (int k = 0; k < K; ++k) {
    const Matrix& g = info.per_group[k];
    b.j_star.block(k * d, k * d, d, d) = info.per_analysis[k];
    b.sigma.block(k * d, k * d, d, d) = g;
    b.sigma_sqrt.block(k * d, k * d, d, d) = spd_sqrt(g, false);
    g_inv_sqrt.push_back(spd_sqrt(g, true));
    b.sigma_inv_sqrt.block(k * d, k * d, d, d) = g_inv_sqrt.back();
    for (int l = 0; l < K; ++l) {
      b.j.block(k * d, l * d, d, d) = analysis_inv[std::max(k, l)];
      if (l <= k) b.a.block(k * d, l * d, d, d) = id;
    }
  }
  b.j_tilde = b.a * b.sigma * b.a.transpose();
  // a^{-1} is block bidiagonal (I on the diagonal, -I below it), so the
  // whitening root has the same band structure.
  for (int k = 0; k < K; ++k) {
    b.j_tilde_inv_sqrt.block(k * d, k * d, d, d) = g_inv_sqrt[k];
    if (k > 0) b.j_tilde_inv_sqrt.block(k * d, (k - 1) * d, d, d) = -g_inv_sqrt[k];
  }
  b.j_inv_sqrt = b.j_tilde_inv_sqrt * b.j_star;
  return b;
}

double c_factor(const InfoSet& info) {
  double c = 0.0;
  for (const Matrix& g : info.per_group) c = std::max(c, sup_norm(spd_sqrt(g, true)));
  return c;
}

Vector standardize(const BlockMatrixSet& blocks, long n, const Vector& stacked_error) {
  return std::sqrt(static_cast<double>(n)) * (blocks.j_inv_sqrt * stacked_error);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace gsbound
