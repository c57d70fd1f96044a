#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsbound/design.hpp"
#include "gsbound/estimate.hpp"
#include "gsbound/family.hpp"
#include "gsbound/model.hpp"
#include "gsbound/montecarlo.hpp"
#include "gsbound/test_function.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

// ---- exchangeable-pair bound ----------------------------------------------

// A, B, C of the exchangeable-pair bound with the lambda weights already
// applied.
struct PairMoments {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

enum class PairVariant {
  classic,   // needs ||h||_1..||h||_3
  improved,  // needs ||h||, ||h||_1, ||h||_2 and the centred sup norm
};

// classic:  ||h||_2/4 A + ||h||_3/12 B + (||h||_1 + d |S|^{1/2} ||h||_2 / 2) C
// improved: d^{1/2} |S^{-1/2}| ( ||h||_1/sqrt(pi) A + ||h||_2 sqrt(2 pi)/8 B
//             + (sqrt(pi/2) ||h - Eh|| + 2d/sqrt(pi) |S|^{1/2} ||h||) C )
// where |M| is the largest absolute entry of M.
double exchangeable_pair_bound(int d, const Matrix& sigma, const PairMoments& m,
                               const HNorms& norms, PairVariant variant);

// ---- group sequential MLE bounds -------------------------------------------

struct KTerms {
  Estimate k1, k2, k3;
  Estimate eq2;  // E sum_j Q_j^2
  double c = 0.0;

  // Throws NumericalError unless every term is finite and nonnegative.
  void validate() const;
};

enum class Derivatives {
  three,  // ||h||_1, ||h||_2, ||h||_3
  two,    // ||h||_1, ||h||_2
};

struct BoundReport {
  // three_derivative, two_derivative, exp_family or exponential_closed.
  std::string variant;
  std::optional<GroupDesign> design;
  Vector theta0;
  double epsilon = 0.0;
  HNorms norms;
  long n = 0;
  int q = 0;
  KTerms terms;
  std::array<Estimate, 4> summands{};
  // Sum of the four summands at point estimates.
  double total = 0.0;
  // Same with every Monte Carlo term raised by two standard errors.
  double total_conservative = 0.0;
  std::optional<double> acceptance_rate;
  std::vector<std::string> warnings;
  // Additional named quantities, emitted after the standard keys.
  std::vector<std::pair<std::string, double>> extras;
};

// Generic K terms from simulated moments. sqrt(E[M^2 | event]) uses the
// model's envelope directly when it does not depend on the data.
KTerms k_terms_generic(const ParametricModel& model, const GroupDesign& design,
                       const Vector& theta0, double epsilon, const MomentEstimates& mc);

// total = ||h||_1/sqrt(n) K1 + a2 K2 + a3 K3 + 2 ||h|| / eps^2 EQ2 with
//   three: a2 = q^2 c^2 ||h||_2 / 4,           a3 = q^3 c^3 ||h||_3 / 12
//   two:   a2 = q^{3/2} c^2 ||h||_1 / sqrt(pi), a3 = sqrt(2 pi) q^{5/2} c^3 ||h||_2 / 8
BoundReport total_bound(const KTerms& terms, const HNorms& norms, int q, long n, double epsilon,
                        Derivatives derivatives);

// k_terms_generic followed by total_bound, with inputs echoed and a warning
// when the conditioning event max|Q| < eps accepted under 10% of replicates.
BoundReport generic_bound(const ParametricModel& model, const GroupDesign& design,
                          const Vector& theta0, double epsilon, const HNorms& norms,
                          const MomentEstimates& mc, Derivatives derivatives = Derivatives::three);

// Exponential-family K terms: K1 from mu^eps and simulated fourth moments of
// the MLE, K2 and K3 from cumulants of T, c from Var^{-1/2} T.
KTerms exp_family_k_terms(const ExponentialFamily& family, const GroupDesign& design,
                          const Vector& eta0, double epsilon, const MomentEstimates& mc);
BoundReport exp_family_bound(const ExponentialFamily& family, const GroupDesign& design,
                             const Vector& eta0, double epsilon, const HNorms& norms,
                             const MomentEstimates& mc);

// Fully closed form for i.i.d. Exp(eta0) observations. Needs every n_k >= 5
// and 0 < eps < eta0.
BoundReport exponential_closed_bound(const GroupDesign& design, double eta0, double epsilon,
                                     const HNorms& norms);

struct EpsilonChoice {
  double epsilon = 0.0;
  double total = 0.0;
};

// Minimises bound(eps) over [lo, hi]: 64-point log grid, then golden section
// on the bracket around the best grid point. Evaluations that throw or are
// not finite count as +inf.
EpsilonChoice optimize_epsilon(const std::function<double(double)>& bound, double lo, double hi);

}  // namespace gsbound
