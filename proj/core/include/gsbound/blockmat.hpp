#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "gsbound/design.hpp"
#include "gsbound/family.hpp"
#include "gsbound/model.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

// Averaged information for a group design, all d x d:
//   per_analysis[k] = (n_k / n) I(theta),  per_group[k] = (|G_k| / n) I(theta).
struct InfoSet {
  std::vector<Matrix> per_analysis;
  std::vector<Matrix> per_group;
  // Present when the per-observation information was estimated by simulation.
  std::optional<Matrix> per_observation_std_error;
  Matrix per_observation;
};

// Information from a known per-observation matrix.
InfoSet info_from_per_observation(const Matrix& info, const GroupDesign& design);
InfoSet info_bar(const ExponentialFamily& family, const GroupDesign& design, const Vector& eta);
// Uses the model's closed form when available; otherwise averages minus the
// Hessian over `replications` draws at theta (seeded, deterministic).
InfoSet info_bar(const ParametricModel& model, const GroupDesign& design, const Vector& theta,
                 long replications = 200000, std::uint64_t seed = 0x5eed);

// Symmetric square root (or inverse square root) of a symmetric positive
// definite matrix via eigendecomposition. Throws NumericalError when the
// matrix is not positive definite.
Matrix spd_sqrt(const Matrix& m, bool invert = false);

// Block matrices of dimension q = dK.
//   j        block (k, m) = inverse(per_analysis[max(k, m)]); the limiting
//            covariance of the stacked MLE
//   j_star   block-diagonal of per_analysis
//   a        lower block-triangular of identities
//   sigma    block-diagonal of per_group
//   j_tilde  = a * sigma * a' = j_star * j * j_star
// Roots:
//   j_tilde_inv_sqrt = sigma^{-1/2} a^{-1}   (a whitening root: M j_tilde M' = I)
//   j_inv_sqrt       = j_tilde_inv_sqrt * j_star  (M j M' = I)
// sigma_sqrt and sigma_inv_sqrt are blockwise symmetric roots.
struct BlockMatrixSet {
  int d = 0;
  int analyses = 0;
  Matrix j, j_star, a, sigma, j_tilde;
  Matrix j_inv_sqrt, j_tilde_inv_sqrt, sigma_sqrt, sigma_inv_sqrt;
};

// Largest supported q = dK.
inline constexpr int kMaxStackedDim = 64;

BlockMatrixSet build_blocks(const InfoSet& info, const GroupDesign& design);

// max over k of the sup-norm of the inverse symmetric root of per_group[k].
double c_factor(const InfoSet& info);

// Whitened, scaled error: sqrt(n) * j_inv_sqrt * (theta_hat - theta0).
Vector standardize(const BlockMatrixSet& blocks, long n, const Vector& stacked_error);

// Row-major plain text, one matrix row per line.
void write_matrix(std::ostream& out, const Matrix& m);

}  // namespace gsbound
