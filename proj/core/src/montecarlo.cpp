#include "gsbound/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "gsbound/blockmat.hpp"
#include "gsbound/error.hpp"
#include "gsbound/parallel.hpp"
#include "gsbound/rng.hpp"
#include "gsbound/stats.hpp"

namespace gsbound {

namespace {

// RNG stream ids. Stream 0 is the replicate data itself.
constexpr std::uint32_t kStreamData = 0;
constexpr std::uint32_t kStreamReference = 3;
constexpr std::uint32_t kStreamScores = 5;
constexpr std::uint32_t kStreamPair = 11;

void check_inputs(const ParametricModel& model, const GroupDesign& design, const Vector& theta0) {
  if (design.analyses() == 0) throw ValidationError("empty design");
  if (design.dim() != model.dim_param()) {
    throw ValidationError("design dimension " + std::to_string(design.dim()) +
                          " does not match model dimension " +
                          std::to_string(model.dim_param()));
  }
  if (theta0.size() != model.dim_param() || !model.admissible(theta0)) {
    throw DomainError(model.name() + ": theta0 is not an admissible parameter");
  }
}

void check_discards(std::int64_t used, std::int64_t discarded, const McConfig& cfg) {
  const std::int64_t total = used + discarded;
  const double frac = total > 0 ? static_cast<double>(discarded) / static_cast<double>(total) : 1.0;
  if (used == 0 || frac > cfg.discard_threshold) {
    std::ostringstream msg;
    msg << "MLE failed in " << discarded << " of " << total << " replicates (fraction " << frac
        << " exceeds threshold " << cfg.discard_threshold << ")";
    throw McThresholdError(msg.str());
  }
}

// Simulates replicate r and fits the K MLEs. One instance per chunk.
class ReplicateFitter {
 public:
  ReplicateFitter(const ParametricModel& model, const GroupDesign& design, const Vector& theta0,
                  const McConfig& cfg, bool need_data)
      : model_(model), design_(design), theta0_(theta0), cfg_(cfg) {
    fam_ = need_data ? nullptr : model.exp_family();
    const int d = design.dim();
    est_ = Vector::Zero(design.stacked_dim());
    err_ = Vector::Zero(design.stacked_dim());
    y_.assign(static_cast<std::size_t>(model.dim_obs()), 0.0);
    if (fam_) {
      sum_ = Vector::Zero(d);
      tmp_.assign(static_cast<std::size_t>(d), 0.0);
      has_inverse_ = fam_->inverse_mean(mean_function(*fam_, theta0)).has_value();
    } else {
      data_.design = design;
      data_.obs_dim = model.dim_obs();
      data_.values.assign(static_cast<std::size_t>(design.total() * model.dim_obs()), 0.0);
    }
  }

  bool fit(std::int64_t r) {
    Rng rng(cfg_.seed, static_cast<std::uint64_t>(r), kStreamData);
    return fam_ ? fit_family(rng) : fit_generic(rng);
  }

  const Vector& estimate() const { return est_; }
  const Vector& error() const { return err_; }
  std::span<const double> data() const { return data_.values; }

 private:
  bool fit_family(Rng& rng) {
    const int d = design_.dim();
    sum_.setZero();
    std::optional<Vector> init;
    for (int k = 0; k < design_.analyses(); ++k) {
      const long count = design_.group_size(k);
      if (!(cfg_.aggregate && fam_->sample_suff_sum(theta0_, count, rng, tmp_.data()))) {
        std::fill(tmp_.begin(), tmp_.end(), 0.0);
        for (long s = 0; s < count; ++s) {
          fam_->sample(theta0_, rng, y_);
          fam_->add_suff_stat(y_, tmp_.data());
        }
      }
      for (int j = 0; j < d; ++j) sum_[j] += tmp_[static_cast<std::size_t>(j)];
      const Vector mean = sum_ / static_cast<double>(design_.cumulative(k));
      if (!mean.allFinite() || !fam_->mean_interior(mean)) return false;
      if (!has_inverse_) init = k == 0 ? theta0_ : Vector(est_.segment((k - 1) * d, d));
      try {
        est_.segment(k * d, d) = ef_mle(*fam_, mean, init, cfg_.mle);
      } catch (const Error&) {
        return false;
      }
    }
    err_ = est_ - theta0_.replicate(design_.analyses(), 1);
    return true;
  }

  bool fit_generic(Rng& rng) {
    const int t = model_.dim_obs();
    for (long i = 0; i < design_.total(); ++i) {
      model_.sample(theta0_, rng,
                    std::span<double>(data_.values).subspan(static_cast<std::size_t>(i * t),
                                                            static_cast<std::size_t>(t)));
    }
    MleResult res;
    try {
      res = group_sequential_mles(model_, data_, theta0_, cfg_.mle);
    } catch (const Error&) {
      return false;
    }
    if (!res.all_converged()) return false;
    const int d = design_.dim();
    for (int k = 0; k < design_.analyses(); ++k) est_.segment(k * d, d) = res.estimates[k];
    if (!est_.allFinite()) return false;
    err_ = est_ - theta0_.replicate(design_.analyses(), 1);
    return true;
  }

  const ParametricModel& model_;
  const GroupDesign& design_;
  const Vector& theta0_;
  const McConfig& cfg_;
  const ExponentialFamily* fam_ = nullptr;
  bool has_inverse_ = false;
  Vector sum_, est_, err_;
  std::vector<double> tmp_, y_;
  SequentialDataset data_;
};

Estimate mean_estimate(const PowerSums& p) {
  return Estimate::mc(p.mean(), p.mean_std_error(), p.count());
}

Estimate variance_estimate(const PowerSums& p) {
  return Estimate::mc(p.variance(), p.variance_std_error(), p.count());
}

void merge_all(std::vector<PowerSums>& a, const std::vector<PowerSums>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
}

struct MomentAcc {
  PowerSums eq2;
  std::vector<PowerSums> second, fourth, envelope;
  std::vector<double> q_max;
  std::int64_t used = 0, discarded = 0;

  void merge(const MomentAcc& o) {
    eq2.merge(o.eq2);
    merge_all(second, o.second);
    merge_all(fourth, o.fourth);
    merge_all(envelope, o.envelope);
    q_max.insert(q_max.end(), o.q_max.begin(), o.q_max.end());
    used += o.used;
    discarded += o.discarded;
  }
};

struct ScoreAcc {
  std::vector<PowerSums> sq, cross, hess;
  std::vector<double> hmin, hmax;
  PowerSums cube;

  void merge(const ScoreAcc& o) {
    merge_all(sq, o.sq);
    merge_all(cross, o.cross);
    merge_all(hess, o.hess);
    for (std::size_t i = 0; i < hmin.size(); ++i) {
      hmin[i] = std::min(hmin[i], o.hmin[i]);
      hmax[i] = std::max(hmax[i], o.hmax[i]);
    }
    cube.merge(o.cube);
  }
};

}  // namespace

void McConfig::validate() const {
  if (replications < 1) throw ValidationError("replications must be at least 1");
  if (!(discard_threshold >= 0.0 && discard_threshold <= 1.0)) {
    throw ValidationError("discard threshold must lie in [0, 1]");
  }
}

SequentialDataset simulate_dataset(const ParametricModel& model, const GroupDesign& design,
                                   const Vector& theta0, std::int64_t replicate,
                                   const McConfig& cfg) {
  check_inputs(model, design, theta0);
  SequentialDataset ds;
  ds.design = design;
  ds.obs_dim = model.dim_obs();
  ds.theta0 = theta0;
  ds.seed = cfg.seed;
  const int t = ds.obs_dim;
  ds.values.assign(static_cast<std::size_t>(design.total() * t), 0.0);
  Rng rng(cfg.seed, static_cast<std::uint64_t>(replicate), kStreamData);
  for (long i = 0; i < design.total(); ++i) {
    model.sample(theta0, rng,
                 std::span<double>(ds.values).subspan(static_cast<std::size_t>(i * t),
                                                      static_cast<std::size_t>(t)));
  }
  return ds;
}

double MomentEstimates::acceptance_rate(double eps) const {
  if (q_max.empty()) return 0.0;
  const auto it = std::lower_bound(q_max.begin(), q_max.end(), eps);
  return static_cast<double>(it - q_max.begin()) / static_cast<double>(q_max.size());
}

MomentEstimates estimate_moments(const ParametricModel& model, const GroupDesign& design,
                                 const Vector& theta0, double epsilon, const McConfig& cfg) {
  check_inputs(model, design, theta0);
  cfg.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive");
  const int d = design.dim();
  const int kk = design.analyses();
  const auto du = static_cast<std::size_t>(d);
  const auto ku = static_cast<std::size_t>(kk);
  const bool data_envelope = !model.envelope_data_independent();
  if (data_envelope) {
    std::vector<double> probe(static_cast<std::size_t>(model.dim_obs()), 0.0);
    // A model without any envelope cannot support the K1 term at all.
    Rng rng(cfg.seed, 0, kStreamData);
    model.sample(theta0, rng, probe);
    if (!model.third_derivative_envelope(probe, theta0, epsilon, 0, 0, 0)) {
      throw UnsupportedError(model.name() + ": no third-derivative envelope");
    }
  }

  auto make = [&] {
    MomentAcc a;
    a.second.resize(ku * du);
    a.fourth.resize(ku * du * du);
    if (data_envelope) a.envelope.resize(ku * du * du * du);
    return a;
  };
  auto body = [&](std::int64_t begin, std::int64_t end, MomentAcc& acc) {
    ReplicateFitter fitter(model, design, theta0, cfg, data_envelope);
    const int t = model.dim_obs();
    for (std::int64_t r = begin; r < end; ++r) {
      if (!fitter.fit(r)) {
        ++acc.discarded;
        continue;
      }
      ++acc.used;
      const Vector& e = fitter.error();
      acc.eq2.add(e.squaredNorm());
      for (int k = 0; k < kk; ++k) {
        for (int i = 0; i < d; ++i) {
          const double ei2 = e[k * d + i] * e[k * d + i];
          acc.second[static_cast<std::size_t>(k * d + i)].add(ei2);
          for (int u = 0; u < d; ++u) {
            const double eu2 = e[k * d + u] * e[k * d + u];
            acc.fourth[static_cast<std::size_t>((k * d + i) * d + u)].add(ei2 * eu2);
          }
        }
      }
      const double qm = e.cwiseAbs().maxCoeff();
      acc.q_max.push_back(qm);
      if (data_envelope && qm < epsilon) {
        const auto data = fitter.data();
        for (int k = 0; k < kk; ++k) {
          for (int i = 0; i < d; ++i) {
            for (int u = 0; u < d; ++u) {
              for (int l = 0; l < d; ++l) {
                double m = 0.0;
                for (long s = 0; s < design.cumulative(k); ++s) {
                  m += *model.third_derivative_envelope(
                      data.subspan(static_cast<std::size_t>(s * t), static_cast<std::size_t>(t)),
                      theta0, epsilon, i, u, l);
                }
                acc.envelope[static_cast<std::size_t>(((k * d + i) * d + u) * d + l)].add(m * m);
              }
            }
          }
        }
      }
    }
  };
  MomentAcc acc = parallel_reduce<MomentAcc>(cfg.replications, cfg.workers, make, body);
  check_discards(acc.used, acc.discarded, cfg);

  MomentEstimates out;
  out.design = design;
  out.theta0 = theta0;
  out.epsilon = epsilon;
  out.used = acc.used;
  out.discarded = acc.discarded;
  out.eq2 = mean_estimate(acc.eq2);
  for (const auto& p : acc.second) out.second.push_back(mean_estimate(p));
  for (const auto& p : acc.fourth) out.fourth.push_back(mean_estimate(p));
  if (data_envelope) {
    std::vector<Estimate> env;
    for (const auto& p : acc.envelope) {
      if (p.count() == 0) {
        throw McThresholdError("no replicate satisfied max|Q| < epsilon; conditional envelope "
                               "moments are undefined");
      }
      env.push_back(mean_estimate(p));
    }
    out.envelope_sq = std::move(env);
  }
  out.q_max = std::move(acc.q_max);
  std::sort(out.q_max.begin(), out.q_max.end());

  // Per-observation score quantities at theta0.
  auto make_scores = [&] {
    ScoreAcc a;
    a.sq.resize(du);
    a.cross.resize(du * du);
    a.hess.resize(du * du);
    a.hmin.assign(du * du, HUGE_VAL);
    a.hmax.assign(du * du, -HUGE_VAL);
    return a;
  };
  auto score_body = [&](std::int64_t begin, std::int64_t end, ScoreAcc& acc2) {
    std::vector<double> y(static_cast<std::size_t>(model.dim_obs()));
    std::vector<double> y2(y.size());
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(r), kStreamScores);
      model.sample(theta0, rng, y);
      model.sample(theta0, rng, y2);
      const Vector s = model.score(y, theta0);
      const Vector s2 = model.score(y2, theta0);
      const Matrix h = model.hessian(y, theta0);
      for (int j = 0; j < d; ++j) {
        acc2.sq[static_cast<std::size_t>(j)].add(s[j] * s[j]);
        for (int i = 0; i < d; ++i) {
          const auto idx = static_cast<std::size_t>(i * d + j);
          if (i < j) acc2.cross[idx].add(s[i] * s[j]);
          acc2.hess[idx].add(h(i, j));
          acc2.hmin[idx] = std::min(acc2.hmin[idx], h(i, j));
          acc2.hmax[idx] = std::max(acc2.hmax[idx], h(i, j));
        }
      }
      const double a = (s2 - s).cwiseAbs().sum();
      acc2.cube.add(a * a * a);
    }
  };
  ScoreAcc sc = parallel_reduce<ScoreAcc>(cfg.replications, cfg.workers, make_scores, score_body);
  for (const auto& p : sc.sq) out.score_sq_var.push_back(variance_estimate(p));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const auto idx = static_cast<std::size_t>(i * d + j);
      out.score_cross_var.push_back(i < j ? variance_estimate(sc.cross[idx]) : Estimate::exact(0.0));
      // A Hessian that never varies has variance exactly zero.
      out.hessian_var.push_back(sc.hmin[idx] == sc.hmax[idx] ? Estimate::exact(0.0)
                                                             : variance_estimate(sc.hess[idx]));
    }
  }
  out.abs_diff_cube = mean_estimate(sc.cube);
  return out;
}

namespace {

struct DistanceAcc {
  std::vector<PowerSums> diff;
  std::string csv;
  std::int64_t used = 0, discarded = 0;

  void merge(const DistanceAcc& o) {
    merge_all(diff, o.diff);
    csv += o.csv;
    used += o.used;
    discarded += o.discarded;
  }
};

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::vector<SmoothDistance> empirical_smooth_distance(const ParametricModel& model,
                                                      const GroupDesign& design,
                                                      const Vector& theta0,
                                                      const std::vector<TestFunction>& tests,
                                                      const McConfig& cfg,
                                                      std::ostream* replicate_csv) {
  check_inputs(model, design, theta0);
  cfg.validate();
  const int q = design.stacked_dim();
  for (const auto& t : tests) {
    if (t.dim != q || !t.eval) {
      throw ValidationError("test function '" + t.name + "' has dimension " +
                            std::to_string(t.dim) + ", expected " + std::to_string(q));
    }
  }
  const BlockMatrixSet blocks = build_blocks(info_bar(model, design, theta0), design);
  const long n = design.total();
  const bool want_csv = replicate_csv != nullptr;
  bool need_reference = false;
  for (const auto& t : tests) need_reference = need_reference || !t.normal_mean;

  auto make = [&] {
    DistanceAcc a;
    a.diff.resize(tests.size());
    return a;
  };
  auto body = [&](std::int64_t begin, std::int64_t end, DistanceAcc& acc) {
    ReplicateFitter fitter(model, design, theta0, cfg, false);
    Vector z(q);
    for (std::int64_t r = begin; r < end; ++r) {
      if (!fitter.fit(r)) {
        ++acc.discarded;
        continue;
      }
      ++acc.used;
      const Vector x = standardize(blocks, n, fitter.error());
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(q));
      if (need_reference) {
        Rng zr(cfg.seed, static_cast<std::uint64_t>(r), kStreamReference);
        for (int i = 0; i < q; ++i) z[i] = zr.normal();
      }
      if (want_csv) {
        acc.csv += std::to_string(r);
        for (Eigen::Index i = 0; i < q; ++i) {
          acc.csv += ',';
          append_number(acc.csv, fitter.estimate()[i]);
        }
      }
      for (std::size_t f = 0; f < tests.size(); ++f) {
        const double hx = tests[f](xs);
        const double ref = tests[f].normal_mean
                               ? *tests[f].normal_mean
                               : tests[f](std::span<const double>(z.data(), static_cast<std::size_t>(q)));
        acc.diff[f].add(hx - ref);
        if (want_csv) {
          acc.csv += ',';
          append_number(acc.csv, hx);
        }
      }
      if (want_csv) acc.csv += '\n';
    }
  };
  DistanceAcc acc = parallel_reduce<DistanceAcc>(cfg.replications, cfg.workers, make, body);
  check_discards(acc.used, acc.discarded, cfg);

  if (want_csv) {
    *replicate_csv << "replicate";
    for (int k = 0; k < design.analyses(); ++k) {
      for (int i = 0; i < design.dim(); ++i) *replicate_csv << ",theta_hat_" << k + 1 << '_' << i + 1;
    }
    for (std::size_t f = 0; f < tests.size(); ++f) *replicate_csv << ",h" << f + 1;
    *replicate_csv << '\n' << acc.csv;
  }

  std::vector<SmoothDistance> out;
  for (std::size_t f = 0; f < tests.size(); ++f) {
    SmoothDistance sd;
    sd.name = tests[f].name;
    sd.signed_difference = acc.diff[f].mean();
    sd.distance = Estimate::mc(std::abs(sd.signed_difference), acc.diff[f].mean_std_error(),
                               acc.diff[f].count());
    sd.used = acc.used;
    sd.discarded = acc.discarded;
    out.push_back(sd);
  }
  return out;
}

SmoothDistance empirical_smooth_distance(const ParametricModel& model, const GroupDesign& design,
                                         const Vector& theta0, const TestFunction& test,
                                         const McConfig& cfg) {
  return empirical_smooth_distance(model, design, theta0, std::vector<TestFunction>{test}, cfg)
      .front();
}

namespace {

struct RowsAcc {
  std::vector<double> rows;
  std::int64_t used = 0, discarded = 0;
  void merge(const RowsAcc& o) {
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
    used += o.used;
    discarded += o.discarded;
  }
};

}  // namespace

Matrix simulate_standardized(const ParametricModel& model, const GroupDesign& design,
                             const Vector& theta0, const McConfig& cfg) {
  check_inputs(model, design, theta0);
  cfg.validate();
  const BlockMatrixSet blocks = build_blocks(info_bar(model, design, theta0), design);
  const int q = design.stacked_dim();
  auto body = [&](std::int64_t begin, std::int64_t end, RowsAcc& acc) {
    ReplicateFitter fitter(model, design, theta0, cfg, false);
    for (std::int64_t r = begin; r < end; ++r) {
      if (!fitter.fit(r)) {
        ++acc.discarded;
        continue;
      }
      ++acc.used;
      const Vector x = standardize(blocks, design.total(), fitter.error());
      acc.rows.insert(acc.rows.end(), x.data(), x.data() + q);
    }
  };
  RowsAcc acc = parallel_reduce<RowsAcc>(cfg.replications, cfg.workers,
                                         [] { return RowsAcc{}; }, body);
  check_discards(acc.used, acc.discarded, cfg);
  Matrix out(acc.used, q);
  for (std::int64_t r = 0; r < acc.used; ++r) {
    for (int j = 0; j < q; ++j) out(r, j) = acc.rows[static_cast<std::size_t>(r * q + j)];
  }
  return out;
}

Vector pair_statistic(const ParametricModel& model, const SequentialDataset& data,
                      const Vector& theta0) {
  data.validate();
  const GroupDesign& design = data.design;
  if (design.dim() != model.dim_param()) throw ValidationError("design dimension mismatch");
  const int d = design.dim();
  const double root_n = std::sqrt(static_cast<double>(design.total()));
  Vector w = Vector::Zero(design.stacked_dim());
  for (int k = 0; k < design.analyses(); ++k) {
    for (long i = design.group_begin(k); i < design.group_end(k); ++i) {
      const auto y = data.observation(i);
      if (!model.in_support(y)) throw DomainError(model.name() + ": observation outside support");
      w.segment(k * d, d) += model.score(y, theta0) / root_n;
    }
  }
  return w;
}

double exchangeable_pair_residual(const ParametricModel& model, const SequentialDataset& data,
                                  const Vector& theta0) {
  const Vector w = pair_statistic(model, data, theta0);
  const GroupDesign& design = data.design;
  const int d = design.dim();
  const double n = static_cast<double>(design.total());
  const double root_n = std::sqrt(n);
  // Given I = i in G_k, W' - W changes block k by (S(Y'_i) - S(Y_i)) / sqrt(n);
  // E S(Y'_i) = 0 and P(I = i) = 1 / n.
  Vector mean_step = Vector::Zero(design.stacked_dim());
  for (int k = 0; k < design.analyses(); ++k) {
    for (long i = design.group_begin(k); i < design.group_end(k); ++i) {
      mean_step.segment(k * d, d) -= model.score(data.observation(i), theta0) / root_n / n;
    }
  }
  return (mean_step + w / n).cwiseAbs().maxCoeff();
}

namespace {

struct VectorSumAcc {
  std::vector<CompensatedSum> sums;
  void merge(const VectorSumAcc& o) {
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i].merge(o.sums[i]);
  }
};

}  // namespace

double exchangeable_pair_residual_mc(const ParametricModel& model,
                                     const SequentialDataset& data, const Vector& theta0,
                                     std::int64_t resamples, std::uint64_t seed, int workers) {
  if (resamples < 1) throw ValidationError("resamples must be at least 1");
  const Vector w = pair_statistic(model, data, theta0);
  const GroupDesign& design = data.design;
  const int d = design.dim();
  const long n = design.total();
  const double root_n = std::sqrt(static_cast<double>(n));
  Matrix s(n, d);
  model.scores(data.all(), n, theta0, s);

  auto make = [&] {
    VectorSumAcc a;
    a.sums.resize(static_cast<std::size_t>(design.stacked_dim()));
    return a;
  };
  auto body = [&](std::int64_t begin, std::int64_t end, VectorSumAcc& acc) {
    Rng rng(seed, static_cast<std::uint64_t>(begin / kChunkSize), kStreamPair);
    std::vector<double> y(static_cast<std::size_t>(model.dim_obs()));
    for (std::int64_t r = begin; r < end; ++r) {
      const long i = std::min<long>(static_cast<long>(rng.uniform() * static_cast<double>(n)), n - 1);
      model.sample(theta0, rng, y);
      const Vector delta = (model.score(y, theta0) - s.row(i).transpose()) / root_n;
      const int k = design.group_of(i);
      for (int j = 0; j < d; ++j) acc.sums[static_cast<std::size_t>(k * d + j)].add(delta[j]);
    }
  };
  const VectorSumAcc acc = parallel_reduce<VectorSumAcc>(resamples, workers, make, body);
  double worst = 0.0;
  for (int c = 0; c < design.stacked_dim(); ++c) {
    const double est = acc.sums[static_cast<std::size_t>(c)].value() / static_cast<double>(resamples);
    worst = std::max(worst, std::abs(est + w[c] / static_cast<double>(n)));
  }
  return worst;
}

double slope_fit(const std::vector<double>& ns, const std::vector<double>& values) {
  if (ns.size() != values.size()) throw ValidationError("slope_fit: length mismatch");
  if (ns.size() < 3) throw ValidationError("slope_fit: needs at least three points");
  const std::size_t m = ns.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(ns[i] > 0.0) || !(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw DomainError("slope_fit: sizes and values must be positive and finite");
    }
    mx += std::log(ns[i]);
    my += std::log(values[i]);
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(ns[i]) - mx;
    sxy += dx * (std::log(values[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("slope_fit: sizes must not all be equal");
  return sxy / sxx;
}

}  // namespace gsbound
