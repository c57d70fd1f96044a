#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsbound/design.hpp"
#include "gsbound/estimate.hpp"
#include "gsbound/estimator.hpp"
#include "gsbound/model.hpp"
#include "gsbound/test_function.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

struct McConfig {
  std::int64_t replications = 10000;
  std::uint64_t seed = 20240101;
  // 0 means hardware concurrency.
  int workers = 0;
  // Largest tolerated fraction of replicates whose MLE fails.
  double discard_threshold = 1e-3;
  // Draw group sums of T from their exact law when the family provides one.
  // Replicate r then no longer matches simulate_dataset(r) draw for draw.
  bool aggregate = true;
  MleOptions mle;

  void validate() const;
};

// Replicate r of the experiment. A pure function of (cfg.seed, r).
SequentialDataset simulate_dataset(const ParametricModel& model, const GroupDesign& design,
                                   const Vector& theta0, std::int64_t replicate,
                                   const McConfig& cfg);

// Moment estimates feeding the generic bound. Q = theta_hat^K - theta0^K.
// Per-observation score quantities use independent draws at theta0.
struct MomentEstimates {
  GroupDesign design;
  Vector theta0;
  double epsilon = 0.0;
  std::int64_t used = 0;
  std::int64_t discarded = 0;

  Estimate eq2;                  // E sum_j Q_j^2
  std::vector<Estimate> second;  // [k d + i]           E Q_{k,i}^2
  std::vector<Estimate> fourth;  // [(k d + i) d + u]   E Q_{k,i}^2 Q_{k,u}^2

  std::vector<Estimate> score_sq_var;     // [j]        Var S_j^2
  std::vector<Estimate> score_cross_var;  // [i d + j]  Var S_i S_j
  Estimate abs_diff_cube;                 // E (sum_j |S_j(Y') - S_j(Y)|)^3
  std::vector<Estimate> hessian_var;      // [i d + l]  Var d2 log f / dtheta_i dtheta_l

  // E[(M^k_{iul})^2 | max|Q| < eps], index ((k d + i) d + u) d + l. Only for
  // models whose envelope depends on the data.
  std::optional<std::vector<Estimate>> envelope_sq;

  // Sorted max_j |Q_j| over used replicates.
  std::vector<double> q_max;

  // Fraction of used replicates with max|Q| < eps.
  double acceptance_rate(double eps) const;
  int dim() const { return design.dim(); }
};

MomentEstimates estimate_moments(const ParametricModel& model, const GroupDesign& design,
                                 const Vector& theta0, double epsilon, const McConfig& cfg);

struct SmoothDistance {
  std::string name;
  // |mean h(X) - E h(Z)| with the standard error of the mean.
  Estimate distance;
  double signed_difference = 0.0;
  std::int64_t used = 0;
  std::int64_t discarded = 0;
};

// X = sqrt(n) J_n^{-1/2} (theta_hat^K - theta0^K). When E h(Z) is not known
// in closed form every replicate is paired with an independent Z.
// `replicate_csv` receives one row per used replicate:
//   replicate, theta_hat entries, h(X) values.
std::vector<SmoothDistance> empirical_smooth_distance(
    const ParametricModel& model, const GroupDesign& design, const Vector& theta0,
    const std::vector<TestFunction>& tests, const McConfig& cfg,
    std::ostream* replicate_csv = nullptr);

SmoothDistance empirical_smooth_distance(const ParametricModel& model,
                                         const GroupDesign& design, const Vector& theta0,
                                         const TestFunction& test, const McConfig& cfg);

// Standardized X for every used replicate, one row each, in replicate order.
Matrix simulate_standardized(const ParametricModel& model, const GroupDesign& design,
                             const Vector& theta0, const McConfig& cfg);

// Group score sums W_[k] = n^{-1/2} sum_{i in G_k} S(Y_i; theta0).
Vector pair_statistic(const ParametricModel& model, const SequentialDataset& data,
                      const Vector& theta0);

// || mean over I of E[W' - W | W, I] + W / n ||_inf with E S(Y') = 0 used
// analytically. Zero up to rounding.
double exchangeable_pair_residual(const ParametricModel& model, const SequentialDataset& data,
                                  const Vector& theta0);

// Same with E[W' - W | W] estimated from `resamples` draws of (I, Y'_I).
double exchangeable_pair_residual_mc(const ParametricModel& model,
                                     const SequentialDataset& data, const Vector& theta0,
                                     std::int64_t resamples, std::uint64_t seed,
                                     int workers = 0);

// Least-squares slope of log(value) on log(n). Needs at least three points.
double slope_fit(const std::vector<double>& ns, const std::vector<double>& values);

}  // namespace gsbound
