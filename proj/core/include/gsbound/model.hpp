#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsbound/family.hpp"
#include "gsbound/rng.hpp"
#include "gsbound/types.hpp"

namespace gsbound {

// I.i.d. parametric model f(y; theta), theta in R^d, y in R^t.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual std::string name() const = 0;
  virtual int dim_param() const = 0;
  virtual int dim_obs() const { return 1; }

  virtual double log_density(std::span<const double> y, const Vector& theta) const = 0;
  virtual Vector score(std::span<const double> y, const Vector& theta) const = 0;
  virtual Matrix hessian(std::span<const double> y, const Vector& theta) const = 0;
  virtual void sample(const Vector& theta, Rng& rng, std::span<double> y) const = 0;
  virtual bool in_support(std::span<const double> y) const = 0;
  virtual bool admissible(const Vector& theta) const = 0;

  // Rows of `out` receive the scores of `count` consecutive observations.
  virtual void scores(std::span<const double> obs, long count, const Vector& theta,
                      Eigen::Ref<Matrix> out) const;
  // Sum of Hessians over `count` consecutive observations.
  virtual Matrix hessian_sum(std::span<const double> obs, long count, const Vector& theta) const;

  // Per-observation Fisher information, if known in closed form.
  virtual std::optional<Matrix> fisher_information(const Vector& /*theta*/) const {
    return std::nullopt;
  }

  // Bound m(y) on |d^3 log f(y; theta) / d theta_i d theta_u d theta_j| over
  // the box |theta - theta0|_inf <= eps. nullopt when no envelope is known.
  virtual std::optional<double> third_derivative_envelope(std::span<const double> /*y*/,
                                                          const Vector& /*theta0*/,
                                                          double /*eps*/, int /*i*/,
                                                          int /*u*/, int /*j*/) const {
    return std::nullopt;
  }
  // True when the envelope does not depend on y.
  virtual bool envelope_data_independent() const { return false; }

  // Starting point for likelihood maximisation on the first n observations.
  virtual Vector initial_guess(std::span<const double> obs, long count) const;

  // Whether a finite MLE exists for the first n observations, when checkable.
  virtual bool mle_exists(std::span<const double> /*obs*/, long /*count*/) const { return true; }

  virtual const ExponentialFamily* exp_family() const { return nullptr; }
};

using ModelPtr = std::shared_ptr<const ParametricModel>;

// Exponential family in its natural parametrisation.
class ExpFamilyModel final : public ParametricModel {
 public:
  explicit ExpFamilyModel(FamilyPtr family);

  std::string name() const override { return family_->name(); }
  int dim_param() const override { return family_->dim(); }
  int dim_obs() const override { return family_->obs_dim(); }
  double log_density(std::span<const double> y, const Vector& theta) const override;
  Vector score(std::span<const double> y, const Vector& theta) const override;
  Matrix hessian(std::span<const double> y, const Vector& theta) const override;
  void sample(const Vector& theta, Rng& rng, std::span<double> y) const override;
  bool in_support(std::span<const double> y) const override { return family_->in_support(y); }
  bool admissible(const Vector& theta) const override;
  void scores(std::span<const double> obs, long count, const Vector& theta,
              Eigen::Ref<Matrix> out) const override;
  Matrix hessian_sum(std::span<const double> obs, long count,
                     const Vector& theta) const override;
  std::optional<Matrix> fisher_information(const Vector& theta) const override;
  std::optional<double> third_derivative_envelope(std::span<const double> y,
                                                  const Vector& theta0, double eps, int i,
                                                  int u, int j) const override;
  bool envelope_data_independent() const override { return true; }
  Vector initial_guess(std::span<const double> obs, long count) const override;
  bool mle_exists(std::span<const double> obs, long count) const override;
  const ExponentialFamily* exp_family() const override { return family_.get(); }

  const FamilyPtr& family() const { return family_; }

 private:
  Vector mean_suff_stat(std::span<const double> obs, long count) const;

  struct EnvelopeKey {
    std::vector<double> theta0;
    double eps;
    int i, u, j;
    bool operator<(const EnvelopeKey& o) const;
  };

  FamilyPtr family_;
  mutable std::mutex cache_mutex_;
  mutable std::map<EnvelopeKey, double> envelope_cache_;
};

// Logistic location model, f(y; theta) = e^{-z} / (1 + e^{-z})^2, z = y - theta.
class LogisticLocationModel final : public ParametricModel {
 public:
  std::string name() const override { return "logistic"; }
  int dim_param() const override { return 1; }
  double log_density(std::span<const double> y, const Vector& theta) const override;
  Vector score(std::span<const double> y, const Vector& theta) const override;
  Matrix hessian(std::span<const double> y, const Vector& theta) const override;
  void sample(const Vector& theta, Rng& rng, std::span<double> y) const override;
  bool in_support(std::span<const double> y) const override;
  bool admissible(const Vector& theta) const override;
  std::optional<Matrix> fisher_information(const Vector& theta) const override;
  std::optional<double> third_derivative_envelope(std::span<const double> y,
                                                  const Vector& theta0, double eps, int i,
                                                  int u, int j) const override;
  bool envelope_data_independent() const override { return true; }
  Vector initial_guess(std::span<const double> obs, long count) const override;
};

// Family names resolve to ExpFamilyModel; "logistic" to LogisticLocationModel.
ModelPtr make_model(std::string_view name);
std::vector<std::string> registered_models();

}  // namespace gsbound
