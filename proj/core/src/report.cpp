#include "gsbound/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace gsbound {

namespace {

const char* provenance_name(const Estimate& e) {
  return e.is_mc() ? "monte_carlo" : "closed_form";
}

void put(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << " = " << value << '\n';
}

void put(std::ostream& out, const std::string& key, double value) {
  put(out, key, format_number(value));
}

void put(std::ostream& out, const std::string& key, const Estimate& e) {
  put(out, key, e.value);
  put(out, key + ".std_error", e.std_error);
  put(out, key + ".provenance", provenance_name(e));
  if (e.count > 0) put(out, key + ".count", std::to_string(e.count));
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v(i));
  }
  return s;
}

// Newlines would break the line format.
std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_report(std::ostream& out, const BoundReport& r) {
  put(out, "variant", r.variant);
  put(out, "n", std::to_string(r.n));
  put(out, "q", std::to_string(r.q));
  if (r.design) {
    std::string s;
    for (long v : r.design->cumulative()) s += (s.empty() ? "" : ", ") + std::to_string(v);
    put(out, "design.dim", std::to_string(r.design->dim()));
    put(out, "design.cumulative", s);
  }
  if (r.theta0.size() > 0) put(out, "theta0", join(r.theta0));
  put(out, "epsilon", r.epsilon);
  put(out, "norm.sup", r.norms.sup);
  put(out, "norm.d1", r.norms.d1);
  if (r.norms.d2) put(out, "norm.d2", *r.norms.d2);
  if (r.norms.d3) put(out, "norm.d3", *r.norms.d3);
  put(out, "k1", r.terms.k1);
  put(out, "k2", r.terms.k2);
  put(out, "k3", r.terms.k3);
  put(out, "eq2", r.terms.eq2);
  put(out, "c", r.terms.c);
  for (std::size_t i = 0; i < r.summands.size(); ++i) {
    put(out, "term" + std::to_string(i + 1), r.summands[i]);
  }
  put(out, "total", r.total);
  put(out, "total_conservative", r.total_conservative);
  if (r.acceptance_rate) put(out, "acceptance_rate", *r.acceptance_rate);
  put(out, "warnings", std::to_string(r.warnings.size()));
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    put(out, "warning." + std::to_string(i + 1), one_line(r.warnings[i]));
  }
  for (const auto& [key, value] : r.extras) put(out, key, value);
}

std::string format_report(const BoundReport& report) {
  std::ostringstream out;
  write_report(out, report);
  return out.str();
}

void write_moments(std::ostream& out, const MomentEstimates& mc) {
  const int d = mc.dim();
  const int kk = mc.design.analyses();
  put(out, "mc.epsilon", mc.epsilon);
  put(out, "mc.used", std::to_string(mc.used));
  put(out, "mc.discarded", std::to_string(mc.discarded));
  put(out, "mc.acceptance_rate", mc.acceptance_rate(mc.epsilon));
  put(out, "mc.eq2", mc.eq2);
  for (int k = 0; k < kk; ++k) {
    for (int i = 0; i < d; ++i) {
      const auto at = static_cast<std::size_t>(k * d + i);
      const std::string idx = std::to_string(k + 1) + "." + std::to_string(i + 1);
      if (at < mc.second.size()) put(out, "mc.second." + idx, mc.second[at]);
      for (int u = 0; u < d; ++u) {
        const auto at4 = at * static_cast<std::size_t>(d) + static_cast<std::size_t>(u);
        if (at4 < mc.fourth.size()) put(out, "mc.fourth." + idx + "." + std::to_string(u + 1), mc.fourth[at4]);
      }
    }
  }
  for (std::size_t j = 0; j < mc.score_sq_var.size(); ++j) {
    put(out, "mc.score_sq_var." + std::to_string(j + 1), mc.score_sq_var[j]);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const auto at = static_cast<std::size_t>(i * d + j);
      if (at < mc.score_cross_var.size()) {
        put(out, "mc.score_cross_var." + std::to_string(i + 1) + "." + std::to_string(j + 1),
            mc.score_cross_var[at]);
      }
    }
  }
  put(out, "mc.abs_diff_cube", mc.abs_diff_cube);
  for (int i = 0; i < d; ++i) {
    for (int l = 0; l < d; ++l) {
      const auto at = static_cast<std::size_t>(i * d + l);
      if (at < mc.hessian_var.size()) {
        put(out, "mc.hessian_var." + std::to_string(i + 1) + "." + std::to_string(l + 1), mc.hessian_var[at]);
      }
    }
  }
}

}  // namespace gsbound
