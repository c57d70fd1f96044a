#include "gsbound/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "gsbound/error.hpp"

namespace gsbound {

void ParametricModel::scores(std::span<const double> obs, long count, const Vector& theta,
                             Eigen::Ref<Matrix> out) const {
  const int t = dim_obs();
  for (long s = 0; s < count; ++s) {
    out.row(s) = score(obs.subspan(static_cast<std::size_t>(s * t), t), theta).transpose();
  }
}

Matrix ParametricModel::hessian_sum(std::span<const double> obs, long count,
                                    const Vector& theta) const {
  const int t = dim_obs();
  Matrix h = Matrix::Zero(dim_param(), dim_param());
  for (long s = 0; s < count; ++s) {
    h += hessian(obs.subspan(static_cast<std::size_t>(s * t), t), theta);
  }
  return h;
}

Vector ParametricModel::initial_guess(std::span<const double>, long) const {
  return Vector::Zero(dim_param());
}

// ---- exponential family adapter --------------------------------------------

bool ExpFamilyModel::EnvelopeKey::operator<(const EnvelopeKey& o) const {
  return std::tie(theta0, eps, i, u, j) < std::tie(o.theta0, o.eps, o.i, o.u, o.j);
}

ExpFamilyModel::ExpFamilyModel(FamilyPtr family) : family_(std::move(family)) {
  if (!family_) throw ValidationError("null exponential family");
}

bool ExpFamilyModel::admissible(const Vector& theta) const {
  return theta.size() == family_->dim() && theta.allFinite() && family_->admissible(theta);
}

double ExpFamilyModel::log_density(std::span<const double> y, const Vector& theta) const {
  return gsbound::log_density(*family_, y, theta);
}

Vector ExpFamilyModel::score(std::span<const double> y, const Vector& theta) const {
  return family_->suff_stat(y) - mean_function(*family_, theta);
}

Matrix ExpFamilyModel::hessian(std::span<const double>, const Vector& theta) const {
  return -suff_stat_covariance(*family_, theta);
}

void ExpFamilyModel::sample(const Vector& theta, Rng& rng, std::span<double> y) const {
  family_->sample(theta, rng, y);
}

void ExpFamilyModel::scores(std::span<const double> obs, long count, const Vector& theta,
                            Eigen::Ref<Matrix> out) const {
  const Vector tau = mean_function(*family_, theta);
  const int t = dim_obs();
  for (long s = 0; s < count; ++s) {
    out.row(s) =
        (family_->suff_stat(obs.subspan(static_cast<std::size_t>(s * t), t)) - tau).transpose();
  }
}

Matrix ExpFamilyModel::hessian_sum(std::span<const double>, long count,
                                   const Vector& theta) const {
  return -static_cast<double>(count) * suff_stat_covariance(*family_, theta);
}

std::optional<Matrix> ExpFamilyModel::fisher_information(const Vector& theta) const {
  return suff_stat_covariance(*family_, theta);
}

std::optional<double> ExpFamilyModel::third_derivative_envelope(std::span<const double>,
                                                                const Vector& theta0,
                                                                double eps, int i, int u,
                                                                int j) const {
  EnvelopeKey key{std::vector<double>(theta0.data(), theta0.data() + theta0.size()), eps, i, u,
                  j};
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = envelope_cache_.find(key); it != envelope_cache_.end()) return it->second;
  }
  // Memoised: the value depends only on (theta0, eps, i, u, j).
  const double v = mu_epsilon(*family_, MomentBox{theta0, eps}, i, u, j);
  std::lock_guard lock(cache_mutex_);
  envelope_cache_[key] = v;
  return v;
}

Vector ExpFamilyModel::mean_suff_stat(std::span<const double> obs, long count) const {
  const int t = dim_obs();
  Vector acc = Vector::Zero(family_->dim());
  for (long s = 0; s < count; ++s) {
    acc += family_->suff_stat(obs.subspan(static_cast<std::size_t>(s * t), t));
  }
  return acc / static_cast<double>(count);
}

Vector ExpFamilyModel::initial_guess(std::span<const double> obs, long count) const {
  if (count > 0) {
    if (auto eta = family_->inverse_mean(mean_suff_stat(obs, count))) return *eta;
  }
  return ParametricModel::initial_guess(obs, count);
}

bool ExpFamilyModel::mle_exists(std::span<const double> obs, long count) const {
  return count > 0 && family_->mean_interior(mean_suff_stat(obs, count));
}

// ---- logistic location -----------------------------------------------------

namespace {

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

double LogisticLocationModel::log_density(std::span<const double> y, const Vector& theta) const {
  const double z = y[0] - theta[0];
  // -z - 2 log(1 + e^{-z}), written to avoid overflow for large |z|.
  const double a = std::abs(z);
  return -a - 2.0 * std::log1p(std::exp(-a));
}

Vector LogisticLocationModel::score(std::span<const double> y, const Vector& theta) const {
  return Vector::Constant(1, 2.0 * sigmoid(y[0] - theta[0]) - 1.0);
}

Matrix LogisticLocationModel::hessian(std::span<const double> y, const Vector& theta) const {
  const double s = sigmoid(y[0] - theta[0]);
  return Matrix::Constant(1, 1, -2.0 * s * (1.0 - s));
}

void LogisticLocationModel::sample(const Vector& theta, Rng& rng, std::span<double> y) const {
  const double u = rng.uniform();
  y[0] = theta[0] + std::log(u / (1.0 - u));
}

bool LogisticLocationModel::in_support(std::span<const double> y) const {
  return y.size() == 1 && std::isfinite(y[0]);
}

bool LogisticLocationModel::admissible(const Vector& theta) const {
  return theta.size() == 1 && std::isfinite(theta[0]);
}

std::optional<Matrix> LogisticLocationModel::fisher_information(const Vector&) const {
  return Matrix::Constant(1, 1, 1.0 / 3.0);
}

std::optional<double> LogisticLocationModel::third_derivative_envelope(
    std::span<const double>, const Vector&, double, int, int, int) const {
  // sup |2 s (1 - s)(1 - 2 s)| over s in [0, 1].
  return 1.0 / (3.0 * std::sqrt(3.0));
}

Vector LogisticLocationModel::initial_guess(std::span<const double> obs, long count) const {
  double m = 0.0;
  for (long s = 0; s < count; ++s) m += obs[static_cast<std::size_t>(s)];
  return Vector::Constant(1, count > 0 ? m / static_cast<double>(count) : 0.0);
}

// ---- registry --------------------------------------------------------------

ModelPtr make_model(std::string_view name) {
  if (name == "logistic") return std::make_shared<LogisticLocationModel>();
  return std::make_shared<ExpFamilyModel>(make_family(name));
}

std::vector<std::string> registered_models() {
  auto names = registered_families();
  names.push_back("logistic");
  return names;
}

}  // namespace gsbound
