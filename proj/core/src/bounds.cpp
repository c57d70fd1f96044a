#include "gsbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gsbound/blockmat.hpp"
#include "gsbound/error.hpp"

namespace gsbound {

namespace {

constexpr double kPi = std::numbers::pi;

void require_norms(const HNorms& norms, bool d2, bool d3, const char* what) {
  norms.validate();
  if (d2 && !norms.d2) throw ValidationError(std::string(what) + " needs a certified ||h||_2");
  if (d3 && !norms.d3) throw ValidationError(std::string(what) + " needs a certified ||h||_3");
}

bool finite_nonneg(const Estimate& e) {
  return std::isfinite(e.value) && e.value >= 0.0 && std::isfinite(e.std_error) &&
         e.std_error >= 0.0;
}

double fraction(const GroupDesign& design, int k) { return design.fraction(k); }

}  // namespace

double exchangeable_pair_bound(int d, const Matrix& sigma, const PairMoments& m,
                               const HNorms& norms, PairVariant variant) {
  if (d < 1 || sigma.rows() != d || sigma.cols() != d) {
    throw ValidationError("pair bound: covariance must be d x d");
  }
  if (!(m.a >= 0.0) || !(m.b >= 0.0) || !(m.c >= 0.0)) {
    throw ValidationError("pair bound: A, B, C must be nonnegative");
  }
  const double dd = static_cast<double>(d);
  const double sig_half = std::sqrt(sup_norm(sigma));
  if (variant == PairVariant::classic) {
    require_norms(norms, true, true, "classic pair bound");
    return *norms.d2 / 4.0 * m.a + *norms.d3 / 12.0 * m.b +
           (norms.d1 + 0.5 * dd * sig_half * *norms.d2) * m.c;
  }
  require_norms(norms, true, false, "improved pair bound");
  const double inv_half = sup_norm(spd_sqrt(sigma, true));
  return std::sqrt(dd) * inv_half *
         (norms.d1 / std::sqrt(kPi) * m.a + *norms.d2 * std::sqrt(2.0 * kPi) / 8.0 * m.b +
          (std::sqrt(kPi / 2.0) * norms.centered() + 2.0 * dd / std::sqrt(kPi) * sig_half * norms.sup) *
              m.c);
}

void KTerms::validate() const {
  if (!finite_nonneg(k1) || !finite_nonneg(k2) || !finite_nonneg(k3) || !finite_nonneg(eq2) ||
      !std::isfinite(c) || c < 0.0) {
    std::ostringstream msg;
    msg << "K terms are not finite and nonnegative: k1=" << k1.value << " k2=" << k2.value
        << " k3=" << k3.value << " eq2=" << eq2.value << " c=" << c;
    throw NumericalError(msg.str());
  }
}

namespace {

void check_moments(bool needs_envelope, const GroupDesign& design, const Vector& theta0,
                   const MomentEstimates& mc) {
  if (!(mc.design == design)) throw ValidationError("moment estimates were made for another design");
  if (mc.theta0.size() != theta0.size() || mc.theta0 != theta0) {
    throw ValidationError("moment estimates were made at another theta0");
  }
  const auto d = static_cast<std::size_t>(design.dim());
  const auto k = static_cast<std::size_t>(design.analyses());
  std::vector<std::string> missing;
  if (mc.second.size() != k * d) missing.push_back("second moments");
  if (mc.fourth.size() != k * d * d) missing.push_back("fourth moments");
  if (mc.score_sq_var.size() != d) missing.push_back("score square variances");
  if (mc.score_cross_var.size() != d * d) missing.push_back("score cross variances");
  if (mc.hessian_var.size() != d * d) missing.push_back("Hessian variances");
  if (needs_envelope && !mc.envelope_sq) {
    missing.push_back("conditional envelope moments");
  }
  if (!missing.empty()) {
    std::string msg = "moment estimates incomplete:";
    for (const auto& m : missing) msg += " [" + m + "]";
    throw ValidationError(msg);
  }
}

// Sum over k2 in {k1, k1 + 1} (within range) of sum_j |R_{k2}|_{lj}.
std::vector<double> row_weights(const std::vector<Matrix>& roots, int k1) {
  const int kk = static_cast<int>(roots.size());
  const Eigen::Index d = roots.front().rows();
  std::vector<double> w(static_cast<std::size_t>(d), 0.0);
  for (int k2 = k1; k2 <= std::min(k1 + 1, kk - 1); ++k2) {
    for (Eigen::Index l = 0; l < d; ++l) {
      w[static_cast<std::size_t>(l)] += roots[static_cast<std::size_t>(k2)].row(l).cwiseAbs().sum();
    }
  }
  return w;
}

}  // namespace

KTerms k_terms_generic(const ParametricModel& model, const GroupDesign& design,
                       const Vector& theta0, double epsilon, const MomentEstimates& mc) {
  const bool data_envelope = !model.envelope_data_independent();
  check_moments(data_envelope, design, theta0, mc);
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (data_envelope && mc.epsilon != epsilon) {
    std::ostringstream msg;
    msg << "conditional envelope moments were estimated at epsilon " << mc.epsilon
        << ", not " << epsilon;
    throw ValidationError(msg.str());
  }
  const int d = design.dim();
  const int kk = design.analyses();
  const double n = static_cast<double>(design.total());

  const InfoSet info = info_bar(model, design, theta0);
  std::vector<Matrix> roots;
  for (const auto& g : info.per_group) roots.push_back(spd_sqrt(g, true));

  // Per-observation envelope, used when it does not depend on y.
  std::vector<double> env;
  if (!data_envelope) {
    const std::vector<double> y(static_cast<std::size_t>(model.dim_obs()), 0.0);
    env.resize(static_cast<std::size_t>(d * d * d));
    for (int i = 0; i < d; ++i) {
      for (int u = 0; u < d; ++u) {
        for (int l = 0; l < d; ++l) {
          const auto m = model.third_derivative_envelope(y, theta0, epsilon, i, u, l);
          if (!m) throw UnsupportedError(model.name() + ": no third-derivative envelope");
          env[static_cast<std::size_t>((i * d + u) * d + l)] = *m;
        }
      }
    }
  }

  KTerms t;
  t.k1 = Estimate::exact(0.0);
  for (int k1 = 0; k1 < kk; ++k1) {
    const double nk = static_cast<double>(design.cumulative(k1));
    const auto w = row_weights(roots, k1);
    for (int l = 0; l < d; ++l) {
      Estimate bracket = Estimate::exact(0.0);
      for (int i = 0; i < d; ++i) {
        // E(H_{k1,il} + n_k1 I_il)^2 = n_k1 Var h_il for i.i.d. data.
        const Estimate hv = nk * mc.hessian_var[static_cast<std::size_t>(i * d + l)];
        bracket += sqrt(mc.second[static_cast<std::size_t>(k1 * d + i)] * hv);
        for (int u = 0; u < d; ++u) {
          const Estimate q4 = sqrt(mc.fourth[static_cast<std::size_t>((k1 * d + i) * d + u)]);
          Estimate m;
          if (data_envelope) {
            m = sqrt((*mc.envelope_sq)[static_cast<std::size_t>(((k1 * d + i) * d + u) * d + l)]);
          } else {
            m = Estimate::exact(nk * env[static_cast<std::size_t>((i * d + u) * d + l)]);
          }
          bracket += 0.5 * (q4 * m);
        }
      }
      t.k1 += w[static_cast<std::size_t>(l)] * bracket;
    }
  }

  Estimate per_obs = Estimate::exact(0.0);
  for (int j = 0; j < d; ++j) per_obs += sqrt(mc.score_sq_var[static_cast<std::size_t>(j)]);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      per_obs += 2.0 * sqrt(mc.score_cross_var[static_cast<std::size_t>(i * d + j)]);
    }
  }
  double group_weight = 0.0;
  for (int k = 0; k < kk; ++k) group_weight += std::sqrt(fraction(design, k));
  t.k2 = (group_weight / std::sqrt(n)) * per_obs;
  t.k3 = (1.0 / std::sqrt(n)) * mc.abs_diff_cube;
  t.c = c_factor(info);
  t.eq2 = mc.eq2;
  t.validate();
  return t;
}

BoundReport total_bound(const KTerms& terms, const HNorms& norms, int q, long n, double epsilon,
                        Derivatives derivatives) {
  terms.validate();
  if (q < 1 || n < 1) throw ValidationError("q and n must be positive");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive");
  const bool three = derivatives == Derivatives::three;
  require_norms(norms, true, three, three ? "three-derivative bound" : "two-derivative bound");

  const double qd = static_cast<double>(q);
  const double c = terms.c;
  std::array<double, 4> coef{};
  coef[0] = norms.d1 / std::sqrt(static_cast<double>(n));
  if (three) {
    coef[1] = qd * qd * c * c * *norms.d2 / 4.0;
    coef[2] = qd * qd * qd * c * c * c * *norms.d3 / 12.0;
  } else {
    coef[1] = std::pow(qd, 1.5) * c * c * norms.d1 / std::sqrt(kPi);
    coef[2] = std::sqrt(2.0 * kPi) * std::pow(qd, 2.5) * c * c * c * *norms.d2 / 8.0;
  }
  coef[3] = 2.0 * norms.sup / (epsilon * epsilon);
  const std::array<const Estimate*, 4> k{&terms.k1, &terms.k2, &terms.k3, &terms.eq2};

  BoundReport r;
  r.variant = three ? "three_derivative" : "two_derivative";
  r.epsilon = epsilon;
  r.norms = norms;
  r.n = n;
  r.q = q;
  r.terms = terms;
  r.total = 0.0;
  r.total_conservative = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    r.summands[i] = coef[i] * *k[i];
    r.total += r.summands[i].value;
    r.total_conservative += coef[i] * (k[i]->is_mc() ? k[i]->upper(2.0) : k[i]->value);
  }
  return r;
}

BoundReport generic_bound(const ParametricModel& model, const GroupDesign& design,
                          const Vector& theta0, double epsilon, const HNorms& norms,
                          const MomentEstimates& mc, Derivatives derivatives) {
  const KTerms t = k_terms_generic(model, design, theta0, epsilon, mc);
  BoundReport r = total_bound(t, norms, design.stacked_dim(), design.total(), epsilon, derivatives);
  r.design = design;
  r.theta0 = theta0;
  r.acceptance_rate = mc.acceptance_rate(epsilon);
  if (*r.acceptance_rate < 0.1) {
    std::ostringstream msg;
    msg << "conditioning event max|Q| < epsilon accepted only " << *r.acceptance_rate
        << " of replicates";
    r.warnings.push_back(msg.str());
  }
  return r;
}

KTerms exp_family_k_terms(const ExponentialFamily& family, const GroupDesign& design,
                          const Vector& eta0, double epsilon, const MomentEstimates& mc) {
  if (design.dim() != family.dim()) throw ValidationError("design dimension mismatch");
  check_moments(false, design, eta0, mc);
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const int d = design.dim();
  const int kk = design.analyses();
  const double n = static_cast<double>(design.total());

  const Matrix var = suff_stat_covariance(family, eta0);
  const Matrix vis = spd_sqrt(var, true);
  const MomentBox box{eta0, epsilon};
  std::vector<double> mu(static_cast<std::size_t>(d * d * d));
  for (int i = 0; i < d; ++i) {
    for (int u = 0; u < d; ++u) {
      for (int l = 0; l < d; ++l) mu[static_cast<std::size_t>((i * d + u) * d + l)] = mu_epsilon(family, box, i, u, l);
    }
  }

  KTerms t;
  t.k1 = Estimate::exact(0.0);
  for (int k1 = 0; k1 < kk; ++k1) {
    double scale = 0.0;
    for (int k2 = k1; k2 <= std::min(k1 + 1, kk - 1); ++k2) scale += 1.0 / std::sqrt(fraction(design, k2));
    scale *= 0.5 * static_cast<double>(design.cumulative(k1));
    for (int l = 0; l < d; ++l) {
      const double row = vis.row(l).cwiseAbs().sum();
      Estimate inner = Estimate::exact(0.0);
      for (int i = 0; i < d; ++i) {
        for (int u = 0; u < d; ++u) {
          inner += mu[static_cast<std::size_t>((i * d + u) * d + l)] *
                   sqrt(mc.fourth[static_cast<std::size_t>((k1 * d + i) * d + u)]);
        }
      }
      t.k1 += (scale * row) * inner;
    }
  }

  // Var (T_j - mu_j)^2 = k_jjjj + 2 k_jj^2;
  // Var (T_i - mu_i)(T_j - mu_j) = k_iijj + k_ii k_jj + k_ij^2.
  double per_obs = 0.0;
  for (int j = 0; j < d; ++j) {
    per_obs += std::sqrt(std::max(0.0, fourth_cumulant(family, eta0, j, j, j, j) + 2.0 * var(j, j) * var(j, j)));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double v = fourth_cumulant(family, eta0, i, i, j, j) + var(i, i) * var(j, j) + var(i, j) * var(i, j);
      per_obs += 2.0 * std::sqrt(std::max(0.0, v));
    }
  }
  double group_weight = 0.0;
  double max_inv = 0.0;
  for (int k = 0; k < kk; ++k) {
    group_weight += std::sqrt(fraction(design, k));
    max_inv = std::max(max_inv, 1.0 / std::sqrt(fraction(design, k)));
  }
  t.k2 = Estimate::exact(group_weight * per_obs / std::sqrt(n));
  if (auto cube = family.abs_diff_cube_moment(eta0)) {
    t.k3 = Estimate::exact(*cube / std::sqrt(n));
  } else {
    t.k3 = (1.0 / std::sqrt(n)) * mc.abs_diff_cube;
  }
  t.c = sup_norm(vis) * max_inv;
  t.eq2 = mc.eq2;
  t.validate();
  return t;
}

BoundReport exp_family_bound(const ExponentialFamily& family, const GroupDesign& design,
                             const Vector& eta0, double epsilon, const HNorms& norms,
                             const MomentEstimates& mc) {
  const KTerms t = exp_family_k_terms(family, design, eta0, epsilon, mc);
  BoundReport r =
      total_bound(t, norms, design.stacked_dim(), design.total(), epsilon, Derivatives::three);
  r.variant = "exp_family";
  r.design = design;
  r.theta0 = eta0;
  r.acceptance_rate = mc.acceptance_rate(epsilon);
  return r;
}

BoundReport exponential_closed_bound(const GroupDesign& design, double eta0, double epsilon,
                                     const HNorms& norms) {
  if (design.dim() != 1) throw ValidationError("exponential closed form needs d = 1");
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw DomainError("eta0 must be positive");
  if (!(epsilon > 0.0) || !(epsilon < eta0)) {
    throw DomainError("epsilon must lie in (0, eta0) for the exponential closed form");
  }
  for (int k = 0; k < design.analyses(); ++k) {
    if (design.cumulative(k) < 5) {
      throw DomainError("exponential closed form needs n_k >= 5 at every analysis");
    }
  }
  require_norms(norms, true, true, "exponential closed form");
  const int kk = design.analyses();
  const double n = static_cast<double>(design.total());
  const double kd = static_cast<double>(kk);

  double k1 = 0.0, k2 = 0.0, c = 0.0, eq2 = 0.0;
  for (int a = 0; a < kk; ++a) {
    const double m = static_cast<double>(design.cumulative(a));
    const double ratio = (m * m * m * m + (46.0 / 3.0) * m * m * m + 8.0 * m * m) /
                         ((m - 1.0) * (m - 2.0) * (m - 3.0) * (m - 4.0));
    for (int b = a; b <= std::min(a + 1, kk - 1); ++b) k1 += std::sqrt(ratio / fraction(design, b));
    k2 += std::sqrt(fraction(design, a));
    c = std::max(c, 1.0 / std::sqrt(fraction(design, a)));
    eq2 += eta0 * eta0 * (m + 2.0) / ((m - 1.0) * (m - 2.0));
  }
  const double shrink = eta0 / (eta0 - epsilon);
  k1 *= std::sqrt(3.0) * shrink * shrink * shrink;

  KTerms t;
  t.k1 = Estimate::exact(k1);
  t.k2 = Estimate::exact(k2);
  t.k3 = Estimate::exact(6.0 / std::sqrt(n));
  t.eq2 = Estimate::exact(eq2);
  t.c = c;
  t.validate();

  const double term1 = norms.d1 / std::sqrt(n) * k1;
  // Evaluating the exponential-family K2, K3 and c for Exp(eta0) gives these
  // coefficients on k2 and on 1 / sqrt(n); eta0 cancels in both.
  const double term2 = std::sqrt(2.0) / 2.0 * kd * kd * c * c * *norms.d2 * k2 / std::sqrt(n);
  const double term3 = kd * kd * kd * c * c * c * *norms.d3 / (2.0 * std::sqrt(n));
  const double term4 = 2.0 * norms.sup / (epsilon * epsilon) * eq2;

  BoundReport r;
  r.variant = "exponential_closed";
  r.design = design;
  r.theta0 = Vector::Constant(1, eta0);
  r.epsilon = epsilon;
  r.norms = norms;
  r.n = design.total();
  r.q = kk;
  r.terms = t;
  r.summands = {Estimate::exact(term1), Estimate::exact(term2), Estimate::exact(term3),
                Estimate::exact(term4)};
  r.total = term1 + term2 + term3 + term4;
  r.total_conservative = r.total;

  // The shortened three-term display: 2 K^2 c^2 ||h||_2 / (eta0^2 sqrt(n)) on
  // k2 and no separate third-derivative term.
  const double term2_display = 2.0 * kd * kd * c * c * *norms.d2 / (eta0 * eta0 * std::sqrt(n)) * k2;
  r.extras.emplace_back("term2_as_displayed", term2_display);
  r.extras.emplace_back("total_as_displayed", term1 + term2_display + term4);
  r.warnings.push_back(
      "second-term constant differs between the direct evaluation (sqrt(2)/2 K^2 c^2 ||h||_2 "
      "plus a separate K3 term) and the shortened display (2 K^2 c^2 ||h||_2 / eta0^2); "
      "see term2_as_displayed and total_as_displayed");
  return r;
}

EpsilonChoice optimize_epsilon(const std::function<double(double)>& bound, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw ValidationError("epsilon range must satisfy 0 < lo < hi < inf");
  }
  auto eval = [&](double e) {
    try {
      const double v = bound(e);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  constexpr int kGrid = 64;
  std::vector<double> grid(kGrid), val(kGrid);
  const double step = std::log(hi / lo) / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i) {
    grid[static_cast<std::size_t>(i)] = i == kGrid - 1 ? hi : lo * std::exp(step * i);
    val[static_cast<std::size_t>(i)] = eval(grid[static_cast<std::size_t>(i)]);
  }
  const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  if (!std::isfinite(val[best])) throw DomainError("bound is infinite over the whole epsilon range");

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min<std::size_t>(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * b; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }
  EpsilonChoice out{grid[best], val[best]};
  const double xm = f1 <= f2 ? x1 : x2;
  const double fm = std::min(f1, f2);
  if (fm < out.total) out = {xm, fm};
  return out;
}

}  // namespace gsbound
