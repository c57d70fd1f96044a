#pragma once

#include <cstdint>

#include "gsbound/polynomial.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

// S_m(x) = x^{m+1} sum_k C(m+k, k) C(2m+1, m-k) (-x)^k on [0, 1], extended by
// 0 to the left and 1 to the right. Its norm is max_{k <= m} sup |S_m^{(k)}|.
struct Smoother {
  int m = 0;
  RationalPolynomial poly;
  // Certified enclosure of the norm; the two agree whenever every extremum
  // sits at a rational point (m = 3 among them).
  Rational norm_lower, norm_upper;

  bool norm_exact() const { return norm_lower == norm_upper; }
  // Upper end of the enclosure, rounded to double.
  double norm() const { return norm_upper.convert_to<double>(); }
};

// 1 <= m <= 8, UnsupportedError otherwise.
Smoother hermite_smoother(int m);

struct KolParams {
  int p = 2;
  int m = 3;
  double c1 = 0.0;  // bound on the density of the limit
  double c2 = 1.0;  // smoother norm
  void validate() const;
};

// d^{(p-1)/(m+p-1)} (C2^p + p + C1 d^{1/(m+p-1)}), unclipped.
double kolmogorov_from_smooth_raw(double d_smooth, const KolParams& params);
// The same, clipped to [0, 1].
double kolmogorov_from_smooth(double d_smooth, const KolParams& params);
// m = 3, C2 = 52.5, C1 = (2 pi)^{-p/2}.
double kolmogorov_from_smooth_m3(double d_smooth, int p);

// ---- empirical Kolmogorov distance -----------------------------------------

// Centred normal reference. Diagonal covariances use products of univariate
// CDFs; anything else is estimated from `mc_draws` reference draws.
struct NormalReference {
  Matrix covariance;  // empty means the identity
  std::int64_t mc_draws = 200000;
  std::uint64_t seed = 20240101;
};

enum class KolMode {
  exact,  // every per-coordinate sample value is a grid line
  grid,   // per-coordinate quantile grid; returns a bracket
};

struct KolmogorovResult {
  double value = 0.0;  // exact: the distance; grid: lower end of the bracket
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  // Standard error from a Monte Carlo reference CDF; zero otherwise.
  double reference_std_error = 0.0;
  std::int64_t cells = 0;
};

// sup_x |P_n(W <= x) - P(Z <= x)| for the rows of `samples`. `grid_points` is
// per coordinate in grid mode, 0 for a size-based default.
KolmogorovResult empirical_kolmogorov(const Matrix& samples, const NormalReference& reference = {},
                                      KolMode mode = KolMode::exact, int grid_points = 0);

// Two-sample version: sup_x |P_n(W <= x) - P_m(V <= x)|.
double empirical_kolmogorov(const Matrix& samples, const Matrix& second);

}  // namespace gsbound
