#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsbound/rng.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

// Canonical exponential family
//   f(y; eta) = exp(eta' T(y) - A(eta) + S(y)).
// Derived quantities (mean function, cumulants) are free functions below.
class ExponentialFamily {
 public:
  virtual ~ExponentialFamily() = default;

  virtual std::string name() const = 0;
  // Dimension d of eta and T.
  virtual int dim() const = 0;
  // Dimension t of one observation.
  virtual int obs_dim() const { return 1; }

  virtual Vector suff_stat(std::span<const double> y) const = 0;
  // acc[0..d) += T(y) without allocating.
  virtual void add_suff_stat(std::span<const double> y, double* acc) const;
  virtual double log_partition(const Vector& eta) const = 0;
  virtual double carrier(std::span<const double> y) const = 0;
  virtual bool in_support(std::span<const double> y) const = 0;
  virtual bool admissible(const Vector& eta) const = 0;
  // Interior of the convex hull of T's support. An MLE exists iff the mean
  // sufficient statistic lies here.
  virtual bool mean_interior(const Vector& /*t*/) const { return true; }
  virtual void sample(const Vector& eta, Rng& rng, std::span<double> y) const = 0;
  // Draws sum_{s<count} T(Y_s) directly from its exact law when that law is
  // known. Returns false when not available; callers then sample observations.
  virtual bool sample_suff_sum(const Vector& /*eta*/, long /*count*/, Rng& /*rng*/,
                               double* /*out*/) const {
    return false;
  }

  // E[T_{i1} ... T_{ik}] for k <= 4, when available in closed form.
  virtual bool has_raw_moments() const { return false; }
  virtual double raw_moment(const Vector& eta, std::span<const int> idx) const;

  // Closed-form inverse of the mean function, if any.
  virtual std::optional<Vector> inverse_mean(const Vector& /*t*/) const { return std::nullopt; }
  // Joint cumulant of T of order 1..4 over `idx`, when known in closed form.
  virtual std::optional<double> cumulant(const Vector& /*eta*/, std::span<const int> /*idx*/) const {
    return std::nullopt;
  }

  // E[(sum_j |T_j(Y') - T_j(Y)|)^3] for independent Y, Y'.
  virtual std::optional<double> abs_diff_cube_moment(const Vector& /*eta*/) const {
    return std::nullopt;
  }
};

using FamilyPtr = std::shared_ptr<const ExponentialFamily>;

// Exp(rate eta), T(y) = -y.
class ExponentialDistribution final : public ExponentialFamily {
 public:
  std::string name() const override { return "exponential"; }
  int dim() const override { return 1; }
  Vector suff_stat(std::span<const double> y) const override;
  void add_suff_stat(std::span<const double> y, double* acc) const override { acc[0] -= y[0]; }
  double log_partition(const Vector& eta) const override;
  double carrier(std::span<const double>) const override { return 0.0; }
  bool in_support(std::span<const double> y) const override;
  bool admissible(const Vector& eta) const override;
  bool mean_interior(const Vector& t) const override;
  void sample(const Vector& eta, Rng& rng, std::span<double> y) const override;
  bool sample_suff_sum(const Vector& eta, long count, Rng& rng, double* out) const override;
  bool has_raw_moments() const override { return true; }
  double raw_moment(const Vector& eta, std::span<const int> idx) const override;
  std::optional<Vector> inverse_mean(const Vector& t) const override;
  std::optional<double> cumulant(const Vector& eta, std::span<const int> idx) const override;
  std::optional<double> abs_diff_cube_moment(const Vector& eta) const override;
};

// N(sigma^2 eta, sigma^2) with sigma known, T(y) = y.
class NormalKnownVariance final : public ExponentialFamily {
 public:
  explicit NormalKnownVariance(double sigma = 1.0);
  std::string name() const override { return "normal"; }
  int dim() const override { return 1; }
  Vector suff_stat(std::span<const double> y) const override;
  void add_suff_stat(std::span<const double> y, double* acc) const override { acc[0] += y[0]; }
  double log_partition(const Vector& eta) const override;
  double carrier(std::span<const double> y) const override;
  bool in_support(std::span<const double> y) const override;
  bool admissible(const Vector& eta) const override;
  void sample(const Vector& eta, Rng& rng, std::span<double> y) const override;
  bool sample_suff_sum(const Vector& eta, long count, Rng& rng, double* out) const override;
  bool has_raw_moments() const override { return true; }
  double raw_moment(const Vector& eta, std::span<const int> idx) const override;
  std::optional<Vector> inverse_mean(const Vector& t) const override;
  std::optional<double> cumulant(const Vector& eta, std::span<const int> idx) const override;
  std::optional<double> abs_diff_cube_moment(const Vector& eta) const override;

 private:
  double sigma_;
};

// Bernoulli with logit parameter, T(y) = y.
class BernoulliLogit final : public ExponentialFamily {
 public:
  std::string name() const override { return "bernoulli"; }
  int dim() const override { return 1; }
  Vector suff_stat(std::span<const double> y) const override;
  void add_suff_stat(std::span<const double> y, double* acc) const override { acc[0] += y[0]; }
  double log_partition(const Vector& eta) const override;
  double carrier(std::span<const double>) const override { return 0.0; }
  bool in_support(std::span<const double> y) const override;
  bool admissible(const Vector& eta) const override;
  bool mean_interior(const Vector& t) const override;
  void sample(const Vector& eta, Rng& rng, std::span<double> y) const override;
  bool sample_suff_sum(const Vector& eta, long count, Rng& rng, double* out) const override;
  bool has_raw_moments() const override { return true; }
  double raw_moment(const Vector& eta, std::span<const int> idx) const override;
  std::optional<Vector> inverse_mean(const Vector& t) const override;
  std::optional<double> abs_diff_cube_moment(const Vector& eta) const override;
};

// N(mu, s^2) with both unknown. T(y) = (y, y^2),
// eta = (mu / s^2, -1 / (2 s^2)).
class NormalMeanVariance final : public ExponentialFamily {
 public:
  std::string name() const override { return "normal2"; }
  int dim() const override { return 2; }
  Vector suff_stat(std::span<const double> y) const override;
  void add_suff_stat(std::span<const double> y, double* acc) const override {
    acc[0] += y[0];
    acc[1] += y[0] * y[0];
  }
  double log_partition(const Vector& eta) const override;
  double carrier(std::span<const double> y) const override;
  bool in_support(std::span<const double> y) const override;
  bool admissible(const Vector& eta) const override;
  bool mean_interior(const Vector& t) const override;
  void sample(const Vector& eta, Rng& rng, std::span<double> y) const override;
  bool sample_suff_sum(const Vector& eta, long count, Rng& rng, double* out) const override;
  bool has_raw_moments() const override { return true; }
  double raw_moment(const Vector& eta, std::span<const int> idx) const override;
  std::optional<Vector> inverse_mean(const Vector& t) const override;
};

// Family assembled from callables. Derivatives of A fall back to finite
// differences unless raw moments are supplied.
struct CustomFamilySpec {
  std::string name;
  int dim = 1;
  int obs_dim = 1;
  std::function<Vector(std::span<const double>)> suff_stat;
  std::function<double(const Vector&)> log_partition;
  std::function<double(std::span<const double>)> carrier;
  std::function<bool(std::span<const double>)> in_support;
  std::function<bool(const Vector&)> admissible;
  std::function<bool(const Vector&)> mean_interior;
  std::function<void(const Vector&, Rng&, std::span<double>)> sample;
  std::function<double(const Vector&, std::span<const int>)> raw_moment;
};

class CustomFamily final : public ExponentialFamily {
 public:
  explicit CustomFamily(CustomFamilySpec spec);
  std::string name() const override { return spec_.name; }
  int dim() const override { return spec_.dim; }
  int obs_dim() const override { return spec_.obs_dim; }
  Vector suff_stat(std::span<const double> y) const override { return spec_.suff_stat(y); }
  double log_partition(const Vector& eta) const override { return spec_.log_partition(eta); }
  double carrier(std::span<const double> y) const override {
    return spec_.carrier ? spec_.carrier(y) : 0.0;
  }
  bool in_support(std::span<const double> y) const override {
    return spec_.in_support ? spec_.in_support(y) : true;
  }
  bool admissible(const Vector& eta) const override {
    return spec_.admissible ? spec_.admissible(eta) : true;
  }
  bool mean_interior(const Vector& t) const override {
    return spec_.mean_interior ? spec_.mean_interior(t) : true;
  }
  void sample(const Vector& eta, Rng& rng, std::span<double> y) const override;
  bool has_raw_moments() const override { return static_cast<bool>(spec_.raw_moment); }
  double raw_moment(const Vector& eta, std::span<const int> idx) const override;

 private:
  CustomFamilySpec spec_;
};

// ---- derived quantities ----------------------------------------------------

// log f(y; eta).
double log_density(const ExponentialFamily& fam, std::span<const double> y, const Vector& eta);

// Partial derivative of A at eta of order 1..3 over the given indices. Uses
// the moment polynomial when raw moments exist, central differences of A
// otherwise.
double cumulant_derivative(const ExponentialFamily& fam, const Vector& eta,
                           std::span<const int> indices);
double cumulant_derivative(const ExponentialFamily& fam, const Vector& eta,
                           std::initializer_list<int> indices);

// Fourth-order joint cumulant of T.
double fourth_cumulant(const ExponentialFamily& fam, const Vector& eta, int i, int j, int k,
                       int l);

// tau(eta) = grad A(eta) = E_eta T.
Vector mean_function(const ExponentialFamily& fam, const Vector& eta);

// Var_eta T = Hessian of A.
Matrix suff_stat_covariance(const ExponentialFamily& fam, const Vector& eta);

struct MomentBox {
  Vector center;
  double radius = 0.0;
};

// max over the closed sup-norm box of |third cumulant (i, u, l)|.
double mu_epsilon(const ExponentialFamily& fam, const MomentBox& box, int i, int u, int l);

// Tensor-product central difference of f at x, step h_j = rel * max(1, |x_j|).
double central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                          std::span<const int> indices, double rel);

// ---- registry --------------------------------------------------------------

using FamilyFactory = std::function<FamilyPtr()>;

// Known names: exponential, normal, bernoulli, normal2.
FamilyPtr make_family(std::string_view name);
void register_family(const std::string& name, FamilyFactory factory);
std::vector<std::string> registered_families();

}  // namespace gsbound
