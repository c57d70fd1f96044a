#include "gsbound/estimator.hpp"

#include <cmath>
#include <limits>

#include "gsbound/error.hpp"

namespace gsbound {

bool MleResult::all_converged() const {
  for (bool c : converged) {
    if (!c) return false;
  }
  return !converged.empty();
}

StackedVector MleResult::stacked() const { return StackedVector::from_blocks(estimates); }

namespace {

constexpr int kMaxHalvings = 60;

bool accept_step(double f_new, double f_old, double grad_new, double grad_old) {
  if (!std::isfinite(f_new)) return false;
  return f_new >= f_old - 1e-13 * (1.0 + std::abs(f_old)) || grad_new < grad_old;
}

}  // namespace

Vector ef_mle(const ExponentialFamily& family, const Vector& suff_mean,
              const std::optional<Vector>& init, const MleOptions& options, int* iterations) {
  if (suff_mean.size() != family.dim()) throw ValidationError("ef_mle: dimension mismatch");
  if (!suff_mean.allFinite() || !family.mean_interior(suff_mean)) {
    throw MleExistenceError(family.name() +
                            ": mean sufficient statistic is on the boundary; no finite MLE");
  }
  Vector eta;
  if (init) {
    eta = *init;
  } else if (auto closed = family.inverse_mean(suff_mean)) {
    eta = *closed;
  } else {
    eta = Vector::Zero(family.dim());
  }
  if (eta.size() != family.dim() || !eta.allFinite() || !family.admissible(eta)) {
    throw ValidationError(family.name() + ": ef_mle needs an admissible starting point");
  }

  const double tol = options.tolerance * std::max(1.0, suff_mean.cwiseAbs().maxCoeff());
  auto objective = [&](const Vector& e) { return e.dot(suff_mean) - family.log_partition(e); };

  for (int it = 0; it <= options.max_iterations; ++it) {
    const Vector grad = suff_mean - mean_function(family, eta);
    const double gnorm = grad.cwiseAbs().maxCoeff();
    if (gnorm < tol) {
      if (iterations) *iterations = it;
      return eta;
    }
    if (it == options.max_iterations) break;
    const Matrix cov = suff_stat_covariance(family, eta);
    Eigen::LLT<Matrix> llt(cov);
    const Vector dir = llt.info() == Eigen::Success ? Vector(llt.solve(grad)) : grad;
    const double f0 = objective(eta);
    double step = 1.0;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      const Vector cand = eta + step * dir;
      if (!cand.allFinite() || !family.admissible(cand)) continue;
      const double gn = (suff_mean - mean_function(family, cand)).cwiseAbs().maxCoeff();
      if (accept_step(objective(cand), f0, gn, gnorm)) {
        eta = cand;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  throw NumericalError(family.name() + ": Newton iteration for the MLE did not converge");
}

namespace {

struct LikelihoodPiece {
  double value;
  Vector grad;
  Matrix hess;
};

LikelihoodPiece mean_loglik(const ParametricModel& model, const SequentialDataset& data,
                            long count, const Vector& theta, bool derivatives) {
  const int d = model.dim_param();
  LikelihoodPiece p{0.0, Vector::Zero(d), Matrix::Zero(d, d)};
  const double inv = 1.0 / static_cast<double>(count);
  for (long s = 0; s < count; ++s) {
    auto y = data.observation(s);
    p.value += model.log_density(y, theta);
    if (derivatives) {
      p.grad += model.score(y, theta);
      p.hess += model.hessian(y, theta);
    }
  }
  p.value *= inv;
  p.grad *= inv;
  p.hess *= inv;
  return p;
}

// Damped Newton with a gradient-ascent fallback for ill-conditioned Hessians.
bool newton_generic(const ParametricModel& model, const SequentialDataset& data, long count,
                    Vector& theta, const MleOptions& opt, int& iters, double& gnorm,
                    std::string& message) {
  for (int it = 0; it <= opt.max_iterations; ++it) {
    const LikelihoodPiece cur = mean_loglik(model, data, count, theta, true);
    gnorm = cur.grad.cwiseAbs().maxCoeff();
    iters = it;
    if (!std::isfinite(cur.value) || !std::isfinite(gnorm)) {
      message = "non-finite likelihood";
      return false;
    }
    if (gnorm < opt.tolerance) return true;
    if (it == opt.max_iterations) break;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(-cur.hess);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const bool newton = lo > 0.0 && hi / lo <= opt.max_condition;
    const Vector dir = newton ? Vector(eig.eigenvectors() *
                                       (eig.eigenvalues().cwiseInverse().asDiagonal() *
                                        (eig.eigenvectors().transpose() * cur.grad)))
                              : cur.grad;
    const double slope = cur.grad.dot(dir);
    double step = 1.0;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      const Vector cand = theta + step * dir;
      if (!cand.allFinite() || !model.admissible(cand)) continue;
      const double f = mean_loglik(model, data, count, cand, false).value;
      const bool ok = newton ? std::isfinite(f) &&
                                   f >= cur.value - 1e-13 * (1.0 + std::abs(cur.value))
                             : std::isfinite(f) && f >= cur.value + 1e-4 * step * slope;
      if (ok) {
        theta = cand;
        moved = true;
        break;
      }
    }
    if (!moved) {
      message = "line search failed";
      return false;
    }
  }
  message = "iteration limit reached";
  return false;
}

}  // namespace

MleResult group_sequential_mles(const ParametricModel& model, const SequentialDataset& data,
                                const std::optional<Vector>& init, const MleOptions& options) {
  data.validate();
  const GroupDesign& design = data.design;
  if (design.dim() != model.dim_param()) {
    throw ValidationError("design dimension does not match the model parameter dimension");
  }
  if (data.obs_dim != model.dim_obs()) {
    throw ValidationError("observation dimension does not match the model");
  }
  for (long s = 0; s < data.size(); ++s) {
    if (!model.in_support(data.observation(s))) {
      throw DomainError("observation " + std::to_string(s + 1) + " is outside the support of " +
                        model.name());
    }
  }
  if (init && (init->size() != model.dim_param() || !model.admissible(*init))) {
    throw ValidationError("initial value is not an admissible parameter");
  }

  const int K = design.analyses();
  const int d = model.dim_param();
  MleResult res;
  res.estimates.assign(K, Vector::Constant(d, std::numeric_limits<double>::quiet_NaN()));
  res.converged.assign(K, false);
  res.iterations.assign(K, 0);
  res.gradient_norms.assign(K, std::numeric_limits<double>::infinity());
  res.messages.assign(K, "");

  const ExponentialFamily* fam = model.exp_family();
  std::optional<Vector> warm = init;
  Vector tsum = Vector::Zero(fam ? fam->dim() : 0);
  for (int k = 0; k < K; ++k) {
    const long nk = design.cumulative(k);
    if (fam) {
      for (long s = design.group_begin(k); s < nk; ++s) tsum += fam->suff_stat(data.observation(s));
      const Vector tbar = tsum / static_cast<double>(nk);
      try {
        int it = 0;
        const std::optional<Vector> start =
            fam->inverse_mean(tbar) ? std::nullopt : warm;
        const Vector eta = ef_mle(*fam, tbar, start, options, &it);
        res.estimates[k] = eta;
        res.iterations[k] = it;
        res.gradient_norms[k] = (tbar - mean_function(*fam, eta)).cwiseAbs().maxCoeff();
        res.converged[k] = true;
        warm = eta;
      } catch (const MleExistenceError& e) {
        res.messages[k] = e.what();
      } catch (const NumericalError& e) {
        res.messages[k] = e.what();
      }
      continue;
    }
    if (!model.mle_exists(data.all(), nk)) {
      res.messages[k] = "no finite MLE for this prefix";
      continue;
    }
    Vector theta = warm ? *warm : model.initial_guess(data.all(), nk);
    if (!model.admissible(theta)) theta = model.initial_guess(data.all(), nk);
    int it = 0;
    double gnorm = 0.0;
    std::string msg;
    const bool ok = newton_generic(model, data, nk, theta, options, it, gnorm, msg);
    res.estimates[k] = theta;
    res.iterations[k] = it;
    res.gradient_norms[k] = gnorm;
    res.converged[k] = ok;
    res.messages[k] = msg;
    if (ok) warm = theta;
  }
  return res;
}

}  // namespace gsbound
