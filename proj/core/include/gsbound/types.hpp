#pragma once

#include <Eigen/Dense>

namespace gsbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Largest absolute entry; zero for empty input.
inline double sup_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace gsbound
