#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsbound/blockmat.hpp"
#include "gsbound/kolmogorov.hpp"
#include "gsbound/report.hpp"

namespace gsbound::cli {

namespace {

std::filesystem::path output_path(const RunConfig& c, const std::string& name) {
  std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + p.string());
  return f;
}

void kv(std::ostream& out, const std::string& key, double v) { out << key << " = " << format_number(v) << '\n'; }
void kv(std::ostream& out, const std::string& key, const std::string& v) { out << key << " = " << v << '\n'; }

McConfig offset_seed(McConfig mc, std::uint64_t by) {
  mc.seed += by;
  return mc;
}

double start_epsilon(const RunConfig& c) {
  return c.epsilon_auto ? std::sqrt(c.epsilon_range.first * c.epsilon_range.second) : c.epsilon;
}

bool needs_moments(const RunConfig& c) { return c.path != BoundPath::closed; }

std::optional<MomentEstimates> moments_for(const RunConfig& c, const GroupDesign& design) {
  if (!needs_moments(c)) return std::nullopt;
  return estimate_moments(*c.model, design, c.theta0, start_epsilon(c), c.mc);
}

BoundReport bound_at(const RunConfig& c, const GroupDesign& design, const HNorms& norms, double eps,
                     const MomentEstimates* mc) {
  switch (c.path) {
    case BoundPath::closed:
      return exponential_closed_bound(design, c.theta0(0), eps, norms);
    case BoundPath::exp_family:
      return exp_family_bound(*c.model->exp_family(), design, c.theta0, eps, norms, *mc);
    case BoundPath::generic:
      break;
  }
  // A data-dependent envelope conditions on max|Q| < eps, so the moments
  // belong to one epsilon.
  if (!c.model->envelope_data_independent() && mc->epsilon != eps) {
    const auto fresh = estimate_moments(*c.model, design, c.theta0, eps, c.mc);
    return generic_bound(*c.model, design, c.theta0, eps, norms, fresh, c.derivatives);
  }
  return generic_bound(*c.model, design, c.theta0, eps, norms, *mc, c.derivatives);
}

BoundReport evaluate(const RunConfig& c, const GroupDesign& design, const HNorms& norms,
                     const std::optional<MomentEstimates>& mc) {
  const MomentEstimates* m = mc ? &*mc : nullptr;
  if (!c.epsilon_auto) return bound_at(c, design, norms, c.epsilon, m);
  const auto best = optimize_epsilon([&](double e) { return bound_at(c, design, norms, e, m).total; },
                                     c.epsilon_range.first, c.epsilon_range.second);
  auto r = bound_at(c, design, norms, best.epsilon, m);
  r.extras.emplace_back("epsilon_range.lo", c.epsilon_range.first);
  r.extras.emplace_back("epsilon_range.hi", c.epsilon_range.second);
  return r;
}

// ---- bound -----------------------------------------------------------------

int run_bound(const RunConfig& c, std::ostream& out) {
  const auto mc = moments_for(c, *c.design);
  const auto r = evaluate(c, *c.design, c.bound_norms(), mc);
  const auto path = output_path(c, c.report_file);
  auto f = open_output(path);
  write_report(f, r);
  if (mc) write_moments(f, *mc);
  out << "report: " << path.string() << '\n';
  kv(out, "epsilon", r.epsilon);
  kv(out, "total", r.total);
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  return kOk;
}

// ---- simulate --------------------------------------------------------------

int run_simulate(const RunConfig& c, std::ostream& out) {
  const auto& design = *c.design;
  const auto mc = moments_for(c, design);
  std::ofstream replicates;
  if (!c.replicate_file.empty()) replicates = open_output(output_path(c, c.replicate_file));
  const auto dist = empirical_smooth_distance(*c.model, design, c.theta0, c.tests, offset_seed(c.mc, 1),
                                              c.replicate_file.empty() ? nullptr : &replicates);
  const auto path = output_path(c, "simulate.txt");
  auto f = open_output(path);
  kv(f, "model", c.model_name);
  kv(f, "bound", path_name(c.path));
  kv(f, "replications", std::to_string(c.mc.replications));
  kv(f, "used", std::to_string(dist.front().used));
  kv(f, "discarded", std::to_string(dist.front().discarded));
  bool all = true;
  for (std::size_t i = 0; i < c.tests.size(); ++i) {
    const auto& t = c.tests[i];
    const auto r = evaluate(c, design, c.norms ? *c.norms : t.norms, mc);
    const double emp = dist[i].distance.upper(3.0);
    const bool ok = emp <= r.total;
    all = all && ok;
    const std::string key = "test." + std::to_string(i + 1);
    kv(f, key + ".name", t.name);
    kv(f, key + ".distance", dist[i].distance.value);
    kv(f, key + ".distance.std_error", dist[i].distance.std_error);
    kv(f, key + ".signed_difference", dist[i].signed_difference);
    kv(f, key + ".epsilon", r.epsilon);
    kv(f, key + ".bound", r.total);
    kv(f, key + ".dominated", ok ? "yes" : "no");
    out << t.name << ": distance " << format_number(dist[i].distance.value) << " +- "
        << format_number(dist[i].distance.std_error) << ", bound " << format_number(r.total) << " -> "
        << (ok ? "dominated" : "NOT dominated") << '\n';
  }
  kv(f, "verdict", all ? "pass" : "fail");
  out << "verdict: " << (all ? "pass" : "fail") << " (distance + 3 se <= bound)\n";
  out << "summary: " << path.string() << '\n';
  return all ? kOk : kCheckFailed;
}

// ---- sweep -----------------------------------------------------------------

int run_sweep(const RunConfig& c, std::ostream& out) {
  const auto& norms = c.bound_norms();
  const auto csv_path = output_path(c, c.csv_file);
  auto csv = open_output(csv_path);
  csv << "n,epsilon,k1,k2,k3,eq2,c,total,total_conservative,empirical,empirical_std_error\n";
  std::vector<double> ns, totals, emp;
  for (std::size_t i = 0; i < c.sweep.ns.size(); ++i) {
    const long n = c.sweep.ns[i];
    const auto design = balanced_groups(c.dim, n, c.sweep.groups);
    const auto mc = moments_for(c, design);
    const auto r = evaluate(c, design, norms, mc);
    csv << n << ',' << format_number(r.epsilon) << ',' << format_number(r.terms.k1.value) << ','
        << format_number(r.terms.k2.value) << ',' << format_number(r.terms.k3.value) << ','
        << format_number(r.terms.eq2.value) << ',' << format_number(r.terms.c) << ','
        << format_number(r.total) << ',' << format_number(r.total_conservative) << ',';
    if (c.sweep.empirical) {
      const auto d = empirical_smooth_distance(*c.model, design, c.theta0, c.tests.front(), offset_seed(c.mc, 1));
      csv << format_number(d.distance.value) << ',' << format_number(d.distance.std_error);
      emp.push_back(d.distance.value);
    } else {
      csv << ',';
    }
    csv << '\n';
    ns.push_back(static_cast<double>(n));
    totals.push_back(r.total);
  }
  const double slope = slope_fit(ns, totals);
  const auto summary_path = output_path(c, "sweep_summary.txt");
  auto f = open_output(summary_path);
  kv(f, "rows", std::to_string(ns.size()));
  kv(f, "groups", std::to_string(c.sweep.groups));
  kv(f, "slope", slope);
  out << "csv: " << csv_path.string() << '\n';
  kv(out, "slope", slope);
  if (!emp.empty()) {
    bool nonincreasing = true;
    for (std::size_t i = 1; i < emp.size(); ++i) nonincreasing = nonincreasing && emp[i] <= emp[i - 1];
    kv(f, "empirical_nonincreasing", nonincreasing ? "yes" : "no");
    kv(out, "empirical_nonincreasing", nonincreasing ? "yes" : "no");
  }
  out << "summary: " << summary_path.string() << '\n';
  return kOk;
}

// ---- kolmogorov ------------------------------------------------------------

int run_kolmogorov(const RunConfig& c, std::ostream& out) {
  const auto& ks = c.kolmogorov;
  double d = 0.0;
  int p = 0;
  if (ks.smooth_distance) {
    d = *ks.smooth_distance;
  } else {
    const auto mc = moments_for(c, *c.design);
    d = evaluate(c, *c.design, c.bound_norms(), mc).total;
  }
  if (ks.p) p = *ks.p;
  else if (c.design) p = c.design->stacked_dim();
  else throw ConfigError(c.source + ": kolmogorov.p is required without a design");
  if (p < 2) {
    throw ConfigError(c.source + ": the Kolmogorov conversion needs dimension p >= 2, the design has q = " +
                      std::to_string(p));
  }
  if (ks.empirical && p != c.design->stacked_dim()) {
    throw ConfigError(c.source + ": kolmogorov.p must equal q = " + std::to_string(c.design->stacked_dim()) +
                      " for the empirical check");
  }
  KolParams params;
  params.p = p;
  params.m = ks.m;
  params.c1 = ks.c1 ? *ks.c1 : std::pow(2.0 * std::numbers::pi, -0.5 * p);
  params.c2 = ks.c2 ? *ks.c2 : (ks.m == 3 ? 52.5 : hermite_smoother(ks.m).norm());
  const double raw = kolmogorov_from_smooth_raw(d, params);
  const double bound = kolmogorov_from_smooth(d, params);

  const auto path = output_path(c, "kolmogorov.txt");
  auto f = open_output(path);
  for (std::ostream* s : {static_cast<std::ostream*>(&f), &out}) {
    kv(*s, "smooth_distance", d);
    kv(*s, "p", std::to_string(p));
    kv(*s, "m", std::to_string(params.m));
    kv(*s, "c1", params.c1);
    kv(*s, "c2", params.c2);
    kv(*s, "kolmogorov_raw", raw);
    kv(*s, "kolmogorov_bound", bound);
  }
  int status = kOk;
  if (ks.empirical) {
    const auto x = simulate_standardized(*c.model, *c.design, c.theta0, offset_seed(c.mc, 1));
    const auto e = empirical_kolmogorov(x, {}, ks.grid_mode);
    const double se = 0.5 / std::sqrt(static_cast<double>(x.rows()));
    const bool ok = e.upper + 3.0 * se <= bound;
    for (std::ostream* s : {static_cast<std::ostream*>(&f), &out}) {
      kv(*s, "empirical.replicates", std::to_string(x.rows()));
      kv(*s, "empirical.lower", e.lower);
      kv(*s, "empirical.upper", e.upper);
      kv(*s, "empirical.exact", e.exact ? "yes" : "no");
      kv(*s, "empirical.cells", std::to_string(e.cells));
      kv(*s, "dominated", ok ? "yes" : "no");
    }
    status = ok ? kOk : kCheckFailed;
  }
  out << "summary: " << path.string() << '\n';
  return status;
}

// ---- verify ----------------------------------------------------------------

struct Suite {
  std::ostream& out;
  std::ostream& file;
  int passed = 0, failed = 0;

  void check(const std::string& name, bool ok, const std::string& detail) {
    (ok ? passed : failed) += 1;
    for (std::ostream* s : {&out, &file}) *s << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
  }
  void note(const std::string& name, const std::string& detail) {
    for (std::ostream* s : {&out, &file}) *s << "NOTE " << name << ": " << detail << '\n';
  }
};

double sup_norm(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Largest violation among the block identities for one information set.
double block_errors(const InfoSet& info, const GroupDesign& design) {
  const auto bl = build_blocks(info, design);
  const int d = design.dim(), kk = design.analyses(), q = design.stacked_dim();
  Matrix jt(q, q);
  for (int k = 0; k < kk; ++k) {
    for (int m = 0; m < kk; ++m) jt.block(k * d, m * d, d, d) = info.per_analysis[static_cast<std::size_t>(std::min(k, m))];
  }
  const Matrix id = Matrix::Identity(q, q);
  double e = sup_norm(bl.a * bl.sigma * bl.a.transpose() - jt);
  e = std::max(e, sup_norm(bl.j_tilde_inv_sqrt * bl.a * bl.sigma_sqrt - id));
  e = std::max(e, sup_norm(bl.j_star * bl.j * bl.j_star - jt));
  e = std::max(e, sup_norm(bl.j_tilde_inv_sqrt * jt * bl.j_tilde_inv_sqrt.transpose() - id));
  for (int k = 0; k < kk; ++k) {
    for (int m = 0; m < kk; ++m) {
      if (m != k && m != k - 1) e = std::max(e, sup_norm(bl.j_tilde_inv_sqrt.block(k * d, m * d, d, d)));
    }
  }
  return e;
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

int run_verify(const RunConfig& c, std::ostream& out) {
  const auto path = output_path(c, "verify.txt");
  auto f = open_output(path);
  Suite suite{out, f};
  const auto& design = *c.design;

  {
    Rng rng(c.mc.seed, 0, 17);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int d = 1 + static_cast<int>(rng.next_u32() % 3), kk = 1 + static_cast<int>(rng.next_u32() % 4);
      std::vector<long> cum;
      long acc = 0;
      for (int k = 0; k < kk; ++k) cum.push_back(acc += 1 + static_cast<long>(rng.next_u32() % 30));
      const auto des = make_design(d, cum);
      InfoSet info;
      Matrix running = Matrix::Zero(d, d);
      for (int k = 0; k < kk; ++k) {
        Matrix b(d, d);
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
        const Matrix g = (b * b.transpose() + 0.1 * Matrix::Identity(d, d)) * des.fraction(k);
        running += g;
        info.per_group.push_back(g);
        info.per_analysis.push_back(running);
      }
      info.per_observation = info.per_analysis.back();
      worst = std::max(worst, block_errors(info, des));
    }
    suite.check("block_identities.random", worst < 1e-8, "200 random designs, largest error " + sci(worst));
  }
  {
    const double e = block_errors(info_bar(*c.model, design, c.theta0), design);
    suite.check("block_identities.config", e < 1e-8, "configured model and design, largest error " + sci(e));
  }
  {
    const auto s3 = hermite_smoother(3);
    const bool ok = s3.poly.to_string() == "-20x^7 + 70x^6 - 84x^5 + 35x^4" && s3.norm_exact() &&
                    s3.norm_lower == Rational(105, 2);
    suite.check("smoother.m3", ok, "S_3 = " + s3.poly.to_string() + ", norm " + format_number(s3.norm()));
  }
  {
    bool ok = true;
    for (int m = 1; m <= 8; ++m) {
      const auto s = hermite_smoother(m);
      ok = ok && s.poly(Rational(0)) == 0 && s.poly(Rational(1)) == 1;
      for (int k = 1; k <= m; ++k) {
        const auto dk = s.poly.derivative(k);
        ok = ok && dk(Rational(0)) == 0 && dk(Rational(1)) == 0;
      }
    }
    suite.check("smoother.boundary", ok, "S_m(0) = 0, S_m(1) = 1, derivatives 1..m vanish at 0 and 1, m = 1..8");
  }
  {
    bool ok = true;
    for (int p = 2; p <= 4; ++p) ok = ok && kolmogorov_from_smooth_m3(0.0, p) == 0.0;
    suite.check("converter.zero", ok, "zero smooth distance gives zero, p = 2..4");
  }
  {
    const auto data = simulate_dataset(*c.model, design, c.theta0, 0, c.mc);
    const double r = exchangeable_pair_residual(*c.model, data, c.theta0);
    suite.check("pair_diagnostic", r < 1e-12, "residual " + sci(r));
  }
  if (const auto* fam = c.model->exp_family()) {
    const double eps = start_epsilon(c);
    const auto mc = estimate_moments(*c.model, design, c.theta0, eps, c.mc);
    const auto g = k_terms_generic(*c.model, design, c.theta0, eps, mc);
    const auto e = exp_family_k_terms(*fam, design, c.theta0, eps, mc);
    const auto within = [](const Estimate& a, const Estimate& b) {
      return std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error) + 1e-12 * std::abs(b.value);
    };
    suite.check("cross_path.c", std::abs(g.c - e.c) <= 1e-10 * std::max(1.0, std::abs(e.c)),
                "generic " + format_number(g.c) + ", exp_family " + format_number(e.c));
    suite.check("cross_path.k3", within(g.k3, e.k3),
                "generic " + format_number(g.k3.value) + " +- " + format_number(g.k3.std_error) + ", exp_family " +
                    format_number(e.k3.value) + " +- " + format_number(e.k3.std_error));
    suite.note("cross_path.k2", "generic " + format_number(g.k2.value) + ", exp_family " + format_number(e.k2.value));
    bool closed_ok = c.model_name == "exponential" && eps < c.theta0(0);
    for (int k = 0; k < design.analyses(); ++k) closed_ok = closed_ok && design.cumulative(k) >= 5;
    if (closed_ok) {
      HNorms unit;
      unit.sup = unit.d1 = 1.0;
      unit.d2 = unit.d3 = 1.0;
      const auto cl = exponential_closed_bound(design, c.theta0(0), eps, unit);
      suite.check("cross_path.closed.c", std::abs(cl.terms.c - e.c) <= 1e-10 * std::max(1.0, std::abs(e.c)),
                  "closed " + format_number(cl.terms.c) + ", exp_family " + format_number(e.c));
      suite.check("cross_path.closed.k3", within(g.k3, cl.terms.k3),
                  "closed " + format_number(cl.terms.k3.value) + ", generic " + format_number(g.k3.value));
      suite.note("cross_path.k2.closed", "closed " + format_number(cl.terms.k2.value));
      const double shown = cl.summands[1].value;
      double displayed = 0.0;
      for (const auto& [key, v] : cl.extras) {
        if (key == "term2_as_displayed") displayed = v;
      }
      suite.note("k2_prefactor_gap",
                 "unit norms: second summand " + format_number(shown) + " from direct evaluation, " + format_number(displayed) +
                     " with the displayed constant (ratio " + format_number(shown > 0 ? displayed / shown : 0.0) + ")");
    }
  }
  for (std::ostream* s : {&out, static_cast<std::ostream*>(&f)}) {
    *s << "verify: " << suite.passed << " passed, " << suite.failed << " failed\n";
  }
  return suite.failed == 0 ? kOk : kCheckFailed;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out) {
  switch (c.mode) {
    case Mode::bound: return run_bound(c, out);
    case Mode::simulate: return run_simulate(c, out);
    case Mode::sweep: return run_sweep(c, out);
    case Mode::verify: return run_verify(c, out);
    case Mode::kolmogorov: return run_kolmogorov(c, out);
  }
  return kConfigError;
}

}  // namespace gsbound::cli
