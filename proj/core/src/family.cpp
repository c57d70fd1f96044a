#include "gsbound/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>

#include "gsbound/error.hpp"

namespace gsbound {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// E[Y^p] for Y ~ N(m, v).
double normal_raw_moment(double m, double v, int p) {
  double prev2 = 1.0, prev1 = m;
  if (p == 0) return 1.0;
  for (int k = 2; k <= p; ++k) {
    const double cur = m * prev1 + (k - 1) * v * prev2;
    prev2 = prev1;
    prev1 = cur;
  }
  return prev1;
}

double logistic(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void require_dim(const ExponentialFamily& fam, const Vector& eta) {
  if (eta.size() != fam.dim()) {
    throw ValidationError(fam.name() + ": parameter has dimension " +
                          std::to_string(eta.size()) + ", expected " +
                          std::to_string(fam.dim()));
  }
}

void require_admissible(const ExponentialFamily& fam, const Vector& eta) {
  require_dim(fam, eta);
  if (!eta.allFinite() || !fam.admissible(eta)) {
    throw DomainError(fam.name() + ": parameter outside the natural parameter space");
  }
}

}  // namespace

void ExponentialFamily::add_suff_stat(std::span<const double> y, double* acc) const {
  const Vector t = suff_stat(y);
  for (Eigen::Index i = 0; i < t.size(); ++i) acc[i] += t[i];
}

double ExponentialFamily::raw_moment(const Vector&, std::span<const int>) const {
  throw UnsupportedError(name() + ": no closed-form raw moments");
}

// ---- exponential -----------------------------------------------------------

Vector ExponentialDistribution::suff_stat(std::span<const double> y) const {
  return Vector::Constant(1, -y[0]);
}

double ExponentialDistribution::log_partition(const Vector& eta) const {
  return -std::log(eta[0]);
}

bool ExponentialDistribution::in_support(std::span<const double> y) const {
  return y.size() == 1 && std::isfinite(y[0]) && y[0] >= 0.0;
}

bool ExponentialDistribution::admissible(const Vector& eta) const { return eta[0] > 0.0; }

bool ExponentialDistribution::mean_interior(const Vector& t) const { return t[0] < 0.0; }

void ExponentialDistribution::sample(const Vector& eta, Rng& rng, std::span<double> y) const {
  y[0] = rng.exponential(eta[0]);
}

bool ExponentialDistribution::sample_suff_sum(const Vector& eta, long count, Rng& rng,
                                              double* out) const {
  boost::random::gamma_distribution<double> g(static_cast<double>(count), 1.0 / eta[0]);
  out[0] = -g(rng);
  return true;
}

double ExponentialDistribution::raw_moment(const Vector& eta, std::span<const int> idx) const {
  const int k = static_cast<int>(idx.size());
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * factorial(k) / std::pow(eta[0], k);
}

std::optional<Vector> ExponentialDistribution::inverse_mean(const Vector& t) const {
  if (!mean_interior(t)) return std::nullopt;
  return Vector::Constant(1, -1.0 / t[0]);
}

std::optional<double> ExponentialDistribution::cumulant(const Vector& eta,
                                                        std::span<const int> idx) const {
  // kappa_r(-Y) = (-1)^r (r - 1)! / eta^r.
  const int r = static_cast<int>(idx.size());
  if (r < 1 || r > 4) return std::nullopt;
  const double fact[] = {1.0, 1.0, 2.0, 6.0};
  return (r % 2 == 0 ? 1.0 : -1.0) * fact[r - 1] / std::pow(eta[0], r);
}

std::optional<double> ExponentialDistribution::abs_diff_cube_moment(const Vector& eta) const {
  return 6.0 / std::pow(eta[0], 3);
}

// ---- normal, known variance ------------------------------------------------

NormalKnownVariance::NormalKnownVariance(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("normal: sigma must be positive");
  }
}

Vector NormalKnownVariance::suff_stat(std::span<const double> y) const {
  return Vector::Constant(1, y[0]);
}

double NormalKnownVariance::log_partition(const Vector& eta) const {
  return 0.5 * sigma_ * sigma_ * eta[0] * eta[0];
}

double NormalKnownVariance::carrier(std::span<const double> y) const {
  const double s2 = sigma_ * sigma_;
  return -0.5 * y[0] * y[0] / s2 - 0.5 * std::log(2.0 * std::numbers::pi * s2);
}

bool NormalKnownVariance::in_support(std::span<const double> y) const {
  return y.size() == 1 && std::isfinite(y[0]);
}

bool NormalKnownVariance::admissible(const Vector& eta) const { return std::isfinite(eta[0]); }

void NormalKnownVariance::sample(const Vector& eta, Rng& rng, std::span<double> y) const {
  y[0] = sigma_ * sigma_ * eta[0] + sigma_ * rng.normal();
}

bool NormalKnownVariance::sample_suff_sum(const Vector& eta, long count, Rng& rng,
                                          double* out) const {
  const double n = static_cast<double>(count);
  out[0] = n * sigma_ * sigma_ * eta[0] + sigma_ * std::sqrt(n) * rng.normal();
  return true;
}

double NormalKnownVariance::raw_moment(const Vector& eta, std::span<const int> idx) const {
  const double s2 = sigma_ * sigma_;
  return normal_raw_moment(s2 * eta[0], s2, static_cast<int>(idx.size()));
}

std::optional<Vector> NormalKnownVariance::inverse_mean(const Vector& t) const {
  return Vector::Constant(1, t[0] / (sigma_ * sigma_));
}

std::optional<double> NormalKnownVariance::cumulant(const Vector& eta,
                                                    std::span<const int> idx) const {
  switch (idx.size()) {
    case 1: return sigma_ * sigma_ * eta[0];
    case 2: return sigma_ * sigma_;
    default: return 0.0;
  }
}

std::optional<double> NormalKnownVariance::abs_diff_cube_moment(const Vector&) const {
  // Y - Y' ~ N(0, 2 sigma^2); E|N(0,1)|^3 = 2 sqrt(2/pi).
  return std::pow(sigma_, 3) * 8.0 / std::sqrt(std::numbers::pi);
}

// ---- bernoulli -------------------------------------------------------------

Vector BernoulliLogit::suff_stat(std::span<const double> y) const {
  return Vector::Constant(1, y[0]);
}

double BernoulliLogit::log_partition(const Vector& eta) const {
  const double x = eta[0];
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

bool BernoulliLogit::in_support(std::span<const double> y) const {
  return y.size() == 1 && (y[0] == 0.0 || y[0] == 1.0);
}

bool BernoulliLogit::admissible(const Vector& eta) const { return std::isfinite(eta[0]); }

bool BernoulliLogit::mean_interior(const Vector& t) const { return t[0] > 0.0 && t[0] < 1.0; }

void BernoulliLogit::sample(const Vector& eta, Rng& rng, std::span<double> y) const {
  y[0] = rng.bernoulli(logistic(eta[0])) ? 1.0 : 0.0;
}

bool BernoulliLogit::sample_suff_sum(const Vector& eta, long count, Rng& rng,
                                     double* out) const {
  boost::random::binomial_distribution<long> b(count, logistic(eta[0]));
  out[0] = static_cast<double>(b(rng));
  return true;
}

double BernoulliLogit::raw_moment(const Vector& eta, std::span<const int> idx) const {
  return idx.empty() ? 1.0 : logistic(eta[0]);
}

std::optional<Vector> BernoulliLogit::inverse_mean(const Vector& t) const {
  if (!mean_interior(t)) return std::nullopt;
  return Vector::Constant(1, std::log(t[0] / (1.0 - t[0])));
}

std::optional<double> BernoulliLogit::abs_diff_cube_moment(const Vector& eta) const {
  const double p = logistic(eta[0]);
  return 2.0 * p * (1.0 - p);
}

// ---- normal, mean and variance ---------------------------------------------

Vector NormalMeanVariance::suff_stat(std::span<const double> y) const {
  Vector t(2);
  t << y[0], y[0] * y[0];
  return t;
}

double NormalMeanVariance::log_partition(const Vector& eta) const {
  return -eta[0] * eta[0] / (4.0 * eta[1]) - 0.5 * std::log(-2.0 * eta[1]);
}

double NormalMeanVariance::carrier(std::span<const double>) const {
  return -0.5 * std::log(2.0 * std::numbers::pi);
}

bool NormalMeanVariance::in_support(std::span<const double> y) const {
  return y.size() == 1 && std::isfinite(y[0]);
}

bool NormalMeanVariance::admissible(const Vector& eta) const {
  return std::isfinite(eta[0]) && eta[1] < 0.0;
}

bool NormalMeanVariance::mean_interior(const Vector& t) const {
  return t[1] - t[0] * t[0] > 0.0;
}

void NormalMeanVariance::sample(const Vector& eta, Rng& rng, std::span<double> y) const {
  const double v = -0.5 / eta[1];
  y[0] = eta[0] * v + std::sqrt(v) * rng.normal();
}

// Sum of y is n * mean; the centred sum of squares is v * chi^2_{n-1}.
bool NormalMeanVariance::sample_suff_sum(const Vector& eta, long count, Rng& rng,
                                         double* out) const {
  const double v = -0.5 / eta[1];
  const double n = static_cast<double>(count);
  const double mean = eta[0] * v + std::sqrt(v / n) * rng.normal();
  double ss = 0.0;
  if (count > 1) {
    boost::random::gamma_distribution<double> g(0.5 * (n - 1.0), 2.0 * v);
    ss = g(rng);
  }
  out[0] = n * mean;
  out[1] = ss + n * mean * mean;
  return true;
}

double NormalMeanVariance::raw_moment(const Vector& eta, std::span<const int> idx) const {
  const double v = -0.5 / eta[1];
  int power = 0;
  for (int i : idx) power += i + 1;
  return normal_raw_moment(eta[0] * v, v, power);
}

std::optional<Vector> NormalMeanVariance::inverse_mean(const Vector& t) const {
  if (!mean_interior(t)) return std::nullopt;
  const double v = t[1] - t[0] * t[0];
  Vector eta(2);
  eta << t[0] / v, -0.5 / v;
  return eta;
}

// ---- custom ----------------------------------------------------------------

CustomFamily::CustomFamily(CustomFamilySpec spec) : spec_(std::move(spec)) {
  if (spec_.dim < 1 || spec_.obs_dim < 1) throw ValidationError("custom family: bad dimensions");
  if (!spec_.suff_stat || !spec_.log_partition) {
    throw ValidationError("custom family: suff_stat and log_partition are required");
  }
}

void CustomFamily::sample(const Vector& eta, Rng& rng, std::span<double> y) const {
  if (!spec_.sample) throw UnsupportedError(spec_.name + ": no sampler");
  spec_.sample(eta, rng, y);
}

double CustomFamily::raw_moment(const Vector& eta, std::span<const int> idx) const {
  if (!spec_.raw_moment) return ExponentialFamily::raw_moment(eta, idx);
  return spec_.raw_moment(eta, idx);
}

// ---- derived quantities ----------------------------------------------------

double log_density(const ExponentialFamily& fam, std::span<const double> y, const Vector& eta) {
  require_admissible(fam, eta);
  if (!fam.in_support(y)) return -std::numeric_limits<double>::infinity();
  return eta.dot(fam.suff_stat(y)) - fam.log_partition(eta) + fam.carrier(y);
}

double central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                          std::span<const int> indices, double rel) {
  const int k = static_cast<int>(indices.size());
  if (k == 0) return f(x);
  double denom = 1.0;
  for (int i : indices) denom *= 2.0 * rel * std::max(1.0, std::abs(x[i]));
  double acc = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vector p = x;
    double sign = 1.0;
    for (int r = 0; r < k; ++r) {
      const int i = indices[r];
      const double h = rel * std::max(1.0, std::abs(x[i]));
      if (mask & (1 << r)) {
        p[i] -= h;
        sign = -sign;
      } else {
        p[i] += h;
      }
    }
    acc += sign * f(p);
  }
  return acc / denom;
}

namespace {

struct MomentCache {
  const ExponentialFamily& fam;
  const Vector& eta;
  double operator()(std::vector<int> idx) const {
    std::sort(idx.begin(), idx.end());
    return fam.raw_moment(eta, idx);
  }
};

double fd_cumulant(const ExponentialFamily& fam, const Vector& eta, std::span<const int> idx) {
  const double eps = std::numeric_limits<double>::epsilon();
  double rel;
  switch (idx.size()) {
    case 1:
    case 2: rel = std::cbrt(eps); break;
    case 3: rel = std::pow(eps, 0.25); break;
    default: rel = std::pow(eps, 1.0 / 6.0); break;
  }
  auto a = [&fam](const Vector& e) { return fam.log_partition(e); };
  return central_difference(a, eta, idx, rel);
}

}  // namespace

double cumulant_derivative(const ExponentialFamily& fam, const Vector& eta,
                           std::span<const int> idx) {
  require_admissible(fam, eta);
  const int order = static_cast<int>(idx.size());
  if (order < 1 || order > 3) {
    throw UnsupportedError("cumulant derivatives are available for orders 1 to 3");
  }
  for (int i : idx) {
    if (i < 0 || i >= fam.dim()) throw ValidationError("cumulant index out of range");
  }
  if (auto exact = fam.cumulant(eta, idx)) return *exact;
  if (!fam.has_raw_moments()) return fd_cumulant(fam, eta, idx);

  MomentCache mu{fam, eta};
  if (order == 1) return mu({idx[0]});
  const int i = idx[0], j = idx[1];
  if (order == 2) return mu({i, j}) - mu({i}) * mu({j});
  const int k = idx[2];
  return mu({i, j, k}) - mu({i, j}) * mu({k}) - mu({i, k}) * mu({j}) - mu({j, k}) * mu({i}) +
         2.0 * mu({i}) * mu({j}) * mu({k});
}

double cumulant_derivative(const ExponentialFamily& fam, const Vector& eta,
                           std::initializer_list<int> indices) {
  return cumulant_derivative(fam, eta, std::span<const int>(indices.begin(), indices.size()));
}

double fourth_cumulant(const ExponentialFamily& fam, const Vector& eta, int i, int j, int k,
                       int l) {
  require_admissible(fam, eta);
  {
    const int idx[4] = {i, j, k, l};
    if (auto exact = fam.cumulant(eta, idx)) return *exact;
  }
  if (!fam.has_raw_moments()) {
    const int idx[4] = {i, j, k, l};
    return fd_cumulant(fam, eta, idx);
  }
  MomentCache mu{fam, eta};
  const double mi = mu({i}), mj = mu({j}), mk = mu({k}), ml = mu({l});
  const double mij = mu({i, j}), mik = mu({i, k}), mil = mu({i, l});
  const double mjk = mu({j, k}), mjl = mu({j, l}), mkl = mu({k, l});
  return mu({i, j, k, l}) -
         (mu({i, j, k}) * ml + mu({i, j, l}) * mk + mu({i, k, l}) * mj + mu({j, k, l}) * mi) -
         (mij * mkl + mik * mjl + mil * mjk) +
         2.0 * (mij * mk * ml + mik * mj * ml + mil * mj * mk + mjk * mi * ml + mjl * mi * mk +
                mkl * mi * mj) -
         6.0 * mi * mj * mk * ml;
}

Vector mean_function(const ExponentialFamily& fam, const Vector& eta) {
  const int d = fam.dim();
  Vector tau(d);
  for (int i = 0; i < d; ++i) tau[i] = cumulant_derivative(fam, eta, {i});
  return tau;
}

Matrix suff_stat_covariance(const ExponentialFamily& fam, const Vector& eta) {
  const int d = fam.dim();
  Matrix v(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      v(i, j) = v(j, i) = cumulant_derivative(fam, eta, {i, j});
    }
  }
  return v;
}

namespace {

constexpr int kGridPoints = 33;

template <class F>
double golden_max(F&& f, double a, double b, double& xbest) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    xbest = c;
    return fc;
  }
  xbest = d;
  return fd;
}

}  // namespace

double mu_epsilon(const ExponentialFamily& fam, const MomentBox& box, int i, int u, int l) {
  const int d = fam.dim();
  require_admissible(fam, box.center);
  if (!(box.radius >= 0.0) || !std::isfinite(box.radius)) {
    throw DomainError("moment box radius must be finite and nonnegative");
  }
  const int idx[3] = {i, u, l};
  auto objective = [&](const Vector& e) { return std::abs(cumulant_derivative(fam, e, idx)); };
  if (box.radius == 0.0) return objective(box.center);

  if (d <= 16) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vector corner = box.center;
      for (int j = 0; j < d; ++j) corner[j] += (mask & (1 << j)) ? box.radius : -box.radius;
      if (!fam.admissible(corner)) {
        throw DomainError(fam.name() + ": moment box leaves the natural parameter space");
      }
    }
  }

  const double lo_off = -box.radius;
  const double step = 2.0 * box.radius / (kGridPoints - 1);
  auto coord = [&](int j, int g) {
    return g == kGridPoints - 1 ? box.center[j] + box.radius : box.center[j] + lo_off + g * step;
  };

  Vector best = box.center;
  double best_val = objective(best);
  if (d <= 3) {
    int total = 1;
    for (int j = 0; j < d; ++j) total *= kGridPoints;
    Vector p(d);
    for (int flat = 0; flat < total; ++flat) {
      int rem = flat;
      for (int j = 0; j < d; ++j) {
        p[j] = coord(j, rem % kGridPoints);
        rem /= kGridPoints;
      }
      const double v = objective(p);
      if (v > best_val) {
        best_val = v;
        best = p;
      }
    }
  } else {
    for (int sweep = 0; sweep < 5; ++sweep) {
      for (int j = 0; j < d; ++j) {
        Vector p = best;
        for (int g = 0; g < kGridPoints; ++g) {
          p[j] = coord(j, g);
          const double v = objective(p);
          if (v > best_val) {
            best_val = v;
            best = p;
          }
        }
      }
    }
  }

  // Coordinatewise golden-section polish around the best grid point.
  for (int j = 0; j < d; ++j) {
    const double a = std::max(box.center[j] - box.radius, best[j] - step);
    const double b = std::min(box.center[j] + box.radius, best[j] + step);
    if (!(b > a)) continue;
    Vector p = best;
    double xj = best[j];
    const double v = golden_max(
        [&](double x) {
          p[j] = x;
          return objective(p);
        },
        a, b, xj);
    if (v > best_val) {
      best_val = v;
      best[j] = xj;
    }
  }
  return best_val;
}

// ---- registry --------------------------------------------------------------

namespace {

std::map<std::string, FamilyFactory>& registry() {
  static std::map<std::string, FamilyFactory> r = {
      {"exponential", [] { return std::make_shared<ExponentialDistribution>(); }},
      {"normal", [] { return std::make_shared<NormalKnownVariance>(1.0); }},
      {"bernoulli", [] { return std::make_shared<BernoulliLogit>(); }},
      {"normal2", [] { return std::make_shared<NormalMeanVariance>(); }},
  };
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FamilyPtr make_family(std::string_view name) {
  std::lock_guard lock(registry_mutex());
  auto it = registry().find(std::string(name));
  if (it == registry().end()) {
    throw ValidationError("unknown exponential family '" + std::string(name) + "'");
  }
  return it->second();
}

void register_family(const std::string& name, FamilyFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::vector<std::string> registered_families() {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

}  // namespace gsbound
