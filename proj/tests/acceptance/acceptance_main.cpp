// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure. Criteria 4-7 record their numeric outputs so that criterion 9 can
// rerun them with a different worker count and compare bit for bit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "gsbound/blockmat.hpp"
#include "gsbound/bounds.hpp"
#include "gsbound/kolmogorov.hpp"
#include "gsbound/montecarlo.hpp"

using namespace gsbound;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Trace = std::vector<double>;

Vector v1(double x) { return Vector::Constant(1, x); }

HNorms unit_norms() { return HNorms{1.0, 1.0, 1.0, 1.0, std::nullopt}; }

McConfig mc_config(std::int64_t reps, std::uint64_t seed, int workers) {
  McConfig c;
  c.replications = reps;
  c.seed = seed;
  c.workers = workers;
  return c;
}

void push(Trace& t, const Estimate& e) {
  t.push_back(e.value);
  t.push_back(e.std_error);
}

// ---- 1 ---------------------------------------------------------------------

void closed_form(Outcome& out) {
  using F = boost::multiprecision::cpp_dec_float_50;
  const F n = 10, eta = 1, eps = F(1) / 2;
  const F ratio = (n * n * n * n + F(46) / 3 * n * n * n + 8 * n * n) /
                  ((n - 1) * (n - 2) * (n - 3) * (n - 4));
  // K = 1: a single full group, fraction 1.
  const F shrink = eta / (eta - eps);
  const F k1_oracle = sqrt(F(3)) * shrink * shrink * shrink * sqrt(ratio);
  const F eq2_oracle = eta * eta * (n + 2) / ((n - 1) * (n - 2));
  // Three-derivative total with Exp(eta) ingredients: Var S^2 = 8 / eta^4,
  // E|S' - S|^3 = 6 / eta^3, c = eta.
  const F c = eta;
  const F k2_thm = sqrt(F(8)) / (eta * eta) / sqrt(n);
  const F k3_thm = F(6) / (eta * eta * eta) / sqrt(n);
  const F total_oracle = k1_oracle / sqrt(n) + c * c * k2_thm / 4 + c * c * c * k3_thm / 12 +
                         2 / (eps * eps) * eq2_oracle;

  const auto r = exponential_closed_bound(equal_groups(1, 10, 1), 1.0, 0.5, unit_norms());
  const double dk1 = std::abs(r.terms.k1.value - k1_oracle.convert_to<double>());
  const double deq = std::abs(r.terms.eq2.value - eq2_oracle.convert_to<double>());
  const double dtot = std::abs(r.total - total_oracle.convert_to<double>());
  out.detail.precision(10);
  out.detail << "K1=" << r.terms.k1.value << " (oracle " << k1_oracle.convert_to<double>()
             << ") K2=" << r.terms.k2.value << " c=" << r.terms.c << " EQ2=" << r.terms.eq2.value
             << " total=" << r.total << " (oracle " << total_oracle.convert_to<double>() << ")";
  out.require(dk1 < 1e-6, "K1 within 1e-6");
  out.require(r.terms.k2.value == 1.0, "K2 = 1");
  out.require(r.terms.c == 1.0, "c = 1");
  out.require(deq < 1e-6 && std::abs(r.terms.eq2.value - 1.0 / 6.0) < 1e-15, "EQ2 = 1/6");
  out.require(dtot < 1e-6, "total within 1e-6");
  out.require(std::abs(r.total - 14.596) < 5e-4, "total ~ 14.596");
}

// ---- 2 ---------------------------------------------------------------------

void smoother(Outcome& out) {
  const auto s = hermite_smoother(3);
  const std::vector<Rational> expect{0, 0, 0, 0, 35, -84, 70, -20};
  out.require(s.poly.coefficients() == expect, "coefficients (35, -84, 70, -20)");
  out.require(s.norm_exact() && s.norm_upper == Rational(105, 2), "norm exactly 105/2");
  for (int k = 1; k <= 3; ++k) {
    const auto dk = s.poly.derivative(k);
    out.require(dk(Rational(0)) == 0 && dk(Rational(1)) == 0, "S3^(k)(0) = S3^(k)(1) = 0");
  }
  out.detail << "S3(x) = " << s.poly.to_string() << ", norm = " << s.norm_upper;
}

// ---- 3 ---------------------------------------------------------------------

void block_identities(Outcome& out) {
  std::mt19937_64 gen(20240103);
  std::uniform_int_distribution<int> dim(1, 3), analyses(1, 4), size(1, 30);
  std::normal_distribution<double> nd;
  double e1 = 0, e2 = 0, e3 = 0, e4 = 0, e5 = 0;
  for (int t = 0; t < 500; ++t) {
    const int d = dim(gen), kk = analyses(gen);
    std::vector<long> cum;
    long acc = 0;
    for (int k = 0; k < kk; ++k) cum.push_back(acc += size(gen));
    const auto design = make_design(d, cum);
    InfoSet info;
    Matrix running = Matrix::Zero(d, d);
    for (int k = 0; k < kk; ++k) {
      Matrix b(d, d);
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = nd(gen);
      const Matrix g = (b * b.transpose() + 0.1 * Matrix::Identity(d, d)) * design.fraction(k);
      running += g;
      info.per_group.push_back(g);
      info.per_analysis.push_back(running);
    }
    info.per_observation = info.per_analysis.back();
    const auto bl = build_blocks(info, design);
    const int q = d * kk;
    // J tilde from its definition: block (k, m) = Ibar(min(k, m)).
    Matrix jt(q, q);
    for (int k = 0; k < kk; ++k) {
      for (int m = 0; m < kk; ++m) jt.block(k * d, m * d, d, d) = info.per_analysis[static_cast<std::size_t>(std::min(k, m))];
    }
    const Matrix id = Matrix::Identity(q, q);
    e1 = std::max(e1, sup_norm(bl.a * bl.sigma * bl.a.transpose() - jt));
    e2 = std::max(e2, sup_norm(bl.j_tilde_inv_sqrt * bl.a * bl.sigma_sqrt - id));
    e3 = std::max(e3, sup_norm(bl.j_star * bl.j * bl.j_star - jt));
    e5 = std::max(e5, sup_norm(bl.j_tilde_inv_sqrt * jt * bl.j_tilde_inv_sqrt.transpose() - id));
    for (int k = 0; k < kk; ++k) {
      for (int m = 0; m < kk; ++m) {
        if (m == k || m == k - 1) continue;
        e4 = std::max(e4, sup_norm(bl.j_tilde_inv_sqrt.block(k * d, m * d, d, d)));
      }
    }
  }
  out.detail << std::scientific;
  out.detail.precision(2);
  out.detail << "max |A S A' - Jt| = " << e1 << ", |Jt^-1/2 A S^1/2 - I| = " << e2
             << ", |J* J J* - Jt| = " << e3 << ", off-band = " << e4 << ", |W Jt W' - I| = " << e5;
  out.require(e1 < 1e-10, "A S A' = Jt");
  out.require(e2 < 1e-8, "Jt^-1/2 A S^1/2 = I");
  out.require(e3 < 1e-8, "J* J J* = Jt");
  out.require(e4 < 1e-8, "off-band blocks vanish");
  out.require(e5 < 1e-8, "whitening");
}

// ---- 4 ---------------------------------------------------------------------

void moment_oracles(Outcome& out, int workers, Trace& trace) {
  const auto exp_model = make_model("exponential");
  const auto mc = estimate_moments(*exp_model, equal_groups(1, 10, 1), v1(1.0), 0.5,
                                   mc_config(1000000, 4001, workers));
  const double m2 = 12.0 / 72.0;
  const double m4 = 784.0 / 3024.0;
  const auto& s2 = mc.second[0];
  const auto& s4 = mc.fourth[0];
  const auto norm_model = make_model("normal");
  const auto mn = estimate_moments(*norm_model, equal_groups(1, 25, 1), v1(0.0), 0.5,
                                   mc_config(1000000, 4002, workers));
  out.detail.precision(6);
  out.detail << "E(eta-1)^2 = " << s2.value << " +- " << s2.std_error << " (" << m2 << "), E(eta-1)^4 = "
             << s4.value << " +- " << s4.std_error << " (" << m4 << "), normal EQ2 = " << mn.eq2.value
             << " +- " << mn.eq2.std_error << " (0.04)";
  out.require(std::abs(s2.value - m2) <= 3 * s2.std_error, "second moment");
  out.require(std::abs(s4.value - m4) <= 3 * s4.std_error, "fourth moment");
  out.require(std::abs(mn.eq2.value - 0.04) <= 3 * mn.eq2.std_error, "normal EQ2");
  push(trace, s2);
  push(trace, s4);
  push(trace, mn.eq2);
  push(trace, mc.abs_diff_cube);
  push(trace, mc.score_sq_var[0]);
}

// ---- 5 ---------------------------------------------------------------------

void domination(Outcome& out, int workers, Trace& trace) {
  struct Case {
    const char* family;
    double theta0;
  };
  const Case cases[] = {{"exponential", 1.0}, {"normal", 0.0}, {"bernoulli", std::log(0.3 / 0.7)}};
  int checked = 0, violations = 0;
  double worst_ratio = 0.0;
  std::uint64_t seed = 5000;
  for (const auto& c : cases) {
    const auto model = make_model(c.family);
    for (int kk = 1; kk <= 3; ++kk) {
      const auto design = balanced_groups(1, 200, kk);
      const Vector th = v1(c.theta0);
      const auto mc = estimate_moments(*model, design, th, 0.5, mc_config(100000, ++seed, workers));
      const auto tests = cosine_suite(kk);
      const auto dist = empirical_smooth_distance(*model, design, th, tests, mc_config(100000, ++seed, workers));
      for (std::size_t i = 0; i < tests.size(); ++i) {
        const auto norms = tests[i].norms;
        const auto best = optimize_epsilon(
            [&](double e) { return generic_bound(*model, design, th, e, norms, mc).total; }, 1e-3, 5.0);
        const double emp = dist[i].distance.upper(3.0);
        ++checked;
        worst_ratio = std::max(worst_ratio, emp / best.total);
        if (!(emp <= best.total)) {
          ++violations;
          out.detail << " [" << c.family << " K=" << kk << " " << tests[i].name << ": " << emp << " > "
                     << best.total << "]";
        }
        trace.push_back(best.total);
        trace.push_back(best.epsilon);
        push(trace, dist[i].distance);
      }
    }
  }
  out.detail << checked << " cases, " << violations << " violations, largest empirical/bound = " << worst_ratio;
  out.require(violations == 0 && checked == 45, "empirical + 3 se <= bound in every case");
}

// ---- 6 ---------------------------------------------------------------------

void order_check(Outcome& out, int workers, Trace& trace) {
  const std::vector<double> ns{100, 400, 1600, 6400};
  const auto model = make_model("exponential");
  const auto test = cosine_suite(2)[1];  // sin(x_1)
  std::vector<double> totals, dist, se;
  for (double n : ns) {
    const auto design = equal_groups(1, static_cast<long>(n), 2);
    totals.push_back(exponential_closed_bound(design, 1.0, 0.5, unit_norms()).total);
    const auto d = empirical_smooth_distance(*model, design, v1(1.0), test,
                                             mc_config(1000000, 6000 + static_cast<std::uint64_t>(n), workers));
    dist.push_back(d.distance.value);
    se.push_back(d.distance.std_error);
    push(trace, d.distance);
  }
  const double slope = slope_fit(ns, totals);
  bool nonincreasing = true;
  for (std::size_t i = 1; i < dist.size(); ++i) nonincreasing = nonincreasing && dist[i] <= dist[i - 1];
  out.detail.precision(4);
  out.detail << "bound slope = " << slope << ", totals =";
  for (double t : totals) out.detail << ' ' << t;
  out.detail << ", empirical " << test.name << " =";
  for (std::size_t i = 0; i < dist.size(); ++i) out.detail << ' ' << dist[i] << "(" << se[i] << ")";
  out.require(slope >= -0.65 && slope <= -0.45, "slope in [-0.65, -0.45]");
  out.require(nonincreasing, "empirical distances nonincreasing");
  trace.push_back(slope);
}

// ---- 7 ---------------------------------------------------------------------

void pair_diagnostic(Outcome& out, int workers, Trace& trace) {
  const char* models[] = {"exponential", "normal", "bernoulli", "logistic", "normal2"};
  std::mt19937_64 gen(7007);
  std::uniform_int_distribution<int> analyses(1, 4), size(1, 25);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto model = make_model(models[t % 5]);
    const int d = model->dim_param();
    std::vector<long> cum;
    long acc = 0;
    const int kk = analyses(gen);
    for (int k = 0; k < kk; ++k) cum.push_back(acc += size(gen));
    Vector th = Vector::Constant(d, 0.3);
    if (std::string(models[t % 5]) == "exponential") th(0) = 1.5;
    if (d == 2) th << 0.3, -0.8;
    McConfig cfg = mc_config(1, 7100 + static_cast<std::uint64_t>(t), workers);
    cfg.aggregate = false;
    const auto data = simulate_dataset(*model, make_design(d, cum), th, t, cfg);
    worst = std::max(worst, exchangeable_pair_residual(*model, data, th));
  }

  const auto model = make_model("exponential");
  const auto design = equal_groups(1, 20, 2);
  const std::vector<double> rs{1e2, 1e4, 1e6};
  std::vector<double> mean_res;
  constexpr int kDatasets = 50;
  for (double r : rs) {
    double sum = 0.0;
    for (int t = 0; t < kDatasets; ++t) {
      McConfig cfg = mc_config(1, 7200, workers);
      cfg.aggregate = false;
      const auto data = simulate_dataset(*model, design, v1(1.0), t, cfg);
      sum += exchangeable_pair_residual_mc(*model, data, v1(1.0), static_cast<std::int64_t>(r),
                                           7300 + static_cast<std::uint64_t>(t), workers);
    }
    mean_res.push_back(sum / kDatasets);
    trace.push_back(mean_res.back());
  }
  const double slope = slope_fit(rs, mean_res);
  trace.push_back(worst);
  out.detail << std::scientific;
  out.detail.precision(3);
  out.detail << "analytic residual max = " << worst << "; MC residual (mean over " << kDatasets
             << " datasets) =";
  for (double m : mean_res) out.detail << ' ' << m;
  out.detail << std::fixed << ", slope = " << slope;
  out.require(worst < 1e-12, "analytic residual < 1e-12");
  out.require(std::abs(slope + 0.5) <= 0.1, "slope -0.5 +- 0.1");
}

// ---- 8 ---------------------------------------------------------------------

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double brute_force_kolmogorov(const Matrix& w) {
  const Eigen::Index n = w.rows();
  std::vector<double> g0(w.col(0).data(), w.col(0).data() + n);
  std::vector<double> g1(w.col(1).data(), w.col(1).data() + n);
  g0.push_back(std::numeric_limits<double>::infinity());
  g1.push_back(std::numeric_limits<double>::infinity());
  double sup = 0.0;
  for (double x : g0) {
    for (double y : g1) {
      const double f = phi(x) * phi(y);
      for (int strict = 0; strict < 4; ++strict) {
        long c = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const bool in_x = (strict & 1) ? w(i, 0) < x : w(i, 0) <= x;
          const bool in_y = (strict & 2) ? w(i, 1) < y : w(i, 1) <= y;
          c += in_x && in_y;
        }
        sup = std::max(sup, std::abs(static_cast<double>(c) / static_cast<double>(n) - f));
      }
    }
  }
  return sup;
}

void converter(Outcome& out) {
  for (int p : {2, 3, 4}) out.require(kolmogorov_from_smooth_m3(0.0, p) == 0.0, "zero maps to zero");
  bool agree = true;
  for (int p : {2, 3, 4}) {
    const KolParams params{p, 3, std::pow(2.0 * std::numbers::pi, -0.5 * p), 52.5};
    for (int e = -40; e <= 2; ++e) {
      const double d = std::pow(10.0, e);
      agree = agree && kolmogorov_from_smooth_m3(d, p) == kolmogorov_from_smooth(d, params);
    }
  }
  out.require(agree, "m3 converter equals general converter");
  std::mt19937_64 gen(8008);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Matrix w(50, 2);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(gen) * (0.7 + 0.05 * t) + 0.02 * t;
    worst = std::max(worst, std::abs(empirical_kolmogorov(w).value - brute_force_kolmogorov(w)));
  }
  out.require(worst < 1e-12, "exact mode equals brute force");
  out.detail << "exact vs brute force max diff = " << worst << " over 20 samples of 50 points";
}

// ---- driver ----------------------------------------------------------------

int failures = 0;

void report(int id, const char* name, Outcome& out, double seconds) {
  if (!out.pass) ++failures;
  std::printf("%s %d %s (%.1fs): %s\n", out.pass ? "PASS" : "FAIL", id, name, seconds, out.detail.str().c_str());
  std::fflush(stdout);
}

template <class F>
void run(int id, const char* name, F&& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  report(id, name, out, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

bool bit_identical(const Trace& a, const Trace& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main() {
  Trace t4, t5, t6, t7;
  run(1, "closed-form bound reproduction", closed_form);
  run(2, "smoother constants", smoother);
  run(3, "block-matrix identities", block_identities);
  run(4, "moment oracles", [&](Outcome& o) { moment_oracles(o, 1, t4); });
  run(5, "bound domination", [&](Outcome& o) { domination(o, 1, t5); });
  run(6, "order check", [&](Outcome& o) { order_check(o, 1, t6); });
  run(7, "exchangeable-pair diagnostic", [&](Outcome& o) { pair_diagnostic(o, 1, t7); });
  run(8, "Kolmogorov converter", converter);
  run(9, "determinism across worker counts", [&](Outcome& o) {
    Trace u4, u5, u6, u7;
    Outcome scratch;
    moment_oracles(scratch, 3, u4);
    domination(scratch, 3, u5);
    order_check(scratch, 3, u6);
    pair_diagnostic(scratch, 3, u7);
    const bool same[] = {bit_identical(t4, u4), bit_identical(t5, u5), bit_identical(t6, u6),
                         bit_identical(t7, u7)};
    o.detail << "workers 1 vs 3, values compared: " << t4.size() + t5.size() + t6.size() + t7.size();
    for (int i = 0; i < 4; ++i) o.require(same[i] && !(i == 0 ? t4 : i == 1 ? t5 : i == 2 ? t6 : t7).empty(),
                                          "criterion " + std::to_string(i + 4) + " bit-identical");
  });
  std::printf("%s: %d failure(s)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
