#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsbound/design.hpp"
#include "gsbound/family.hpp"
#include "gsbound/model.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

struct MleOptions {
  // Sup-norm tolerance on the mean score (1/n_k times the score sum).
  double tolerance = 1e-10;
  int max_iterations = 100;
  // Newton steps are replaced by gradient steps beyond this condition number.
  double max_condition = 1e12;
};

struct MleResult {
  std::vector<Vector> estimates;
  std::vector<bool> converged;
  std::vector<int> iterations;
  std::vector<double> gradient_norms;
  std::vector<std::string> messages;

  bool all_converged() const;
  StackedVector stacked() const;
};

// MLE at each interim analysis: maximiser of the log-likelihood of the first
// n_k observations, warm-started across analyses. Failures are flagged per
// analysis rather than thrown.
MleResult group_sequential_mles(const ParametricModel& model, const SequentialDataset& data,
                                const std::optional<Vector>& init = std::nullopt,
                                const MleOptions& options = {});

// Solve tau(eta) = suff_mean by damped Newton on the concave log-likelihood.
// Throws MleExistenceError when suff_mean is outside the interior of the mean
// space and NumericalError on non-convergence.
Vector ef_mle(const ExponentialFamily& family, const Vector& suff_mean,
              const std::optional<Vector>& init = std::nullopt, const MleOptions& options = {},
              int* iterations = nullptr);

}  // namespace gsbound
