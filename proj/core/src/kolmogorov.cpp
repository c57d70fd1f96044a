#include "gsbound/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gsbound/error.hpp"
#include "gsbound/rng.hpp"

namespace gsbound {

namespace {

using boost::multiprecision::cpp_int;

cpp_int binomial(int n, int k) {
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double normal_cdf(double x) {
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

constexpr std::int64_t kMaxCells = 20'000'000;

// Per-coordinate grid lines g_j[0..m_j-1]; index 0 of the extended grid is
// -inf and index m_j + 1 is +inf.
struct Grid {
  std::vector<std::vector<double>> lines;
  std::vector<std::int64_t> size;    // m_j + 2
  std::vector<std::int64_t> stride;
  std::int64_t total = 1;

  explicit Grid(std::vector<std::vector<double>> l) : lines(std::move(l)) {
    const std::size_t p = lines.size();
    size.resize(p);
    stride.resize(p);
    for (std::size_t j = p; j-- > 0;) {
      size[j] = static_cast<std::int64_t>(lines[j].size()) + 2;
      stride[j] = total;
      if (total > kMaxCells / size[j]) {
        throw UnsupportedError("empirical Kolmogorov grid exceeds " + std::to_string(kMaxCells) +
                               " cells; use grid mode or fewer points");
      }
      total *= size[j];
    }
  }

  double value(std::size_t j, std::int64_t idx) const {
    if (idx == 0) return -std::numeric_limits<double>::infinity();
    if (idx == size[j] - 1) return std::numeric_limits<double>::infinity();
    return lines[j][static_cast<std::size_t>(idx - 1)];
  }

  // Smallest extended index whose line is >= x.
  std::int64_t index_of(std::size_t j, double x) const {
    const auto& g = lines[j];
    return static_cast<std::int64_t>(std::lower_bound(g.begin(), g.end(), x) - g.begin()) + 1;
  }
};

// Fraction of rows at or below every extended grid point.
std::vector<double> ecdf_on_grid(const Grid& grid, const Matrix& rows) {
  std::vector<double> f(static_cast<std::size_t>(grid.total), 0.0);
  const std::size_t p = grid.lines.size();
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    std::int64_t at = 0;
    for (std::size_t j = 0; j < p; ++j) at += grid.index_of(j, rows(r, static_cast<Eigen::Index>(j))) * grid.stride[j];
    f[static_cast<std::size_t>(at)] += 1.0;
  }
  // Cumulative sums along each axis.
  for (std::size_t j = 0; j < p; ++j) {
    for (std::int64_t at = 0; at < grid.total; ++at) {
      if ((at / grid.stride[j]) % grid.size[j] != 0) {
        f[static_cast<std::size_t>(at)] += f[static_cast<std::size_t>(at - grid.stride[j])];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.rows());
  for (auto& v : f) v *= inv;
  return f;
}

std::vector<double> product_cdf_on_grid(const Grid& grid, const Vector& scale) {
  const std::size_t p = grid.lines.size();
  std::vector<std::vector<double>> marg(p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::int64_t i = 0; i < grid.size[j]; ++i) {
      marg[j].push_back(normal_cdf(grid.value(j, i) / scale(static_cast<Eigen::Index>(j))));
    }
  }
  std::vector<double> f(static_cast<std::size_t>(grid.total));
  for (std::int64_t at = 0; at < grid.total; ++at) {
    double v = 1.0;
    for (std::size_t j = 0; j < p; ++j) v *= marg[j][static_cast<std::size_t>((at / grid.stride[j]) % grid.size[j])];
    f[static_cast<std::size_t>(at)] = v;
  }
  return f;
}

Matrix reference_draws(const NormalReference& ref, int p) {
  Eigen::LLT<Matrix> llt(ref.covariance);
  if (llt.info() != Eigen::Success) throw DomainError("reference covariance is not positive definite");
  const Matrix l = llt.matrixL();
  Matrix z(ref.mc_draws, p);
  Rng rng(ref.seed, 0, 13);
  Vector e(p);
  for (std::int64_t r = 0; r < ref.mc_draws; ++r) {
    for (int j = 0; j < p; ++j) e(j) = rng.normal();
    z.row(r) = (l * e).transpose();
  }
  return z;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> column(const Matrix& m, Eigen::Index j) {
  return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

void check_samples(const Matrix& samples) {
  if (samples.rows() == 0) throw DomainError("empirical Kolmogorov: empty sample");
  if (samples.cols() == 0) throw ValidationError("empirical Kolmogorov: zero-dimensional sample");
  if (!samples.allFinite()) throw DomainError("empirical Kolmogorov: non-finite sample value");
}

}  // namespace

Smoother hermite_smoother(int m) {
  if (m < 1 || m > 8) throw UnsupportedError("hermite_smoother supports 1 <= m <= 8, got " + std::to_string(m));
  std::vector<Rational> c(static_cast<std::size_t>(2 * m + 2));
  for (int k = 0; k <= m; ++k) {
    cpp_int v = binomial(m + k, k) * binomial(2 * m + 1, m - k);
    if (k % 2 == 1) v = -v;
    c[static_cast<std::size_t>(m + 1 + k)] = Rational(v);
  }
  Smoother s;
  s.m = m;
  s.poly = RationalPolynomial(std::move(c));
  s.norm_lower = 0;
  s.norm_upper = 0;
  for (int k = 0; k <= m; ++k) {
    const auto b = sup_abs(s.poly.derivative(k), Rational(0), Rational(1));
    s.norm_lower = std::max(s.norm_lower, b.lower);
    s.norm_upper = std::max(s.norm_upper, b.upper);
  }
  return s;
}

void KolParams::validate() const {
  if (p < 2) throw ValidationError("KolParams: p must be >= 2");
  if (m < 1) throw ValidationError("KolParams: m must be >= 1");
  if (!(c1 > 0.0) || !std::isfinite(c1)) throw ValidationError("KolParams: C1 must be positive");
  if (!(c2 >= 1.0) || !std::isfinite(c2)) throw ValidationError("KolParams: C2 must be >= 1");
}

double kolmogorov_from_smooth_raw(double d, const KolParams& params) {
  params.validate();
  if (!(d >= 0.0)) throw ValidationError("smooth distance must be >= 0");
  if (d == 0.0) return 0.0;
  const double denom = params.m + params.p - 1;
  return std::pow(d, (params.p - 1) / denom) *
         (std::pow(params.c2, params.p) + params.p + params.c1 * std::pow(d, 1.0 / denom));
}

double kolmogorov_from_smooth(double d, const KolParams& params) {
  return std::min(1.0, kolmogorov_from_smooth_raw(d, params));
}

double kolmogorov_from_smooth_m3(double d, int p) {
  if (p < 2) throw ValidationError("p must be >= 2");
  const KolParams params{p, 3, std::pow(2.0 * std::numbers::pi, -0.5 * p), 52.5};
  return kolmogorov_from_smooth(d, params);
}

KolmogorovResult empirical_kolmogorov(const Matrix& samples, const NormalReference& reference,
                                      KolMode mode, int grid_points) {
  check_samples(samples);
  const int p = static_cast<int>(samples.cols());
  const bool identity = reference.covariance.size() == 0;
  if (!identity && (reference.covariance.rows() != p || reference.covariance.cols() != p)) {
    throw ValidationError("reference covariance must be " + std::to_string(p) + "x" + std::to_string(p));
  }
  const bool diagonal = identity || reference.covariance.isDiagonal();
  if (!diagonal && reference.mc_draws < 1) throw ValidationError("mc_draws must be positive");

  std::vector<std::vector<double>> lines(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    auto u = sorted_unique(column(samples, j));
    if (mode == KolMode::grid) {
      int g = grid_points;
      if (g <= 0) g = std::max(1, static_cast<int>(std::floor(std::pow(4.0e6, 1.0 / p))) - 2);
      if (static_cast<std::size_t>(g) < u.size()) {
        std::vector<double> q;
        for (int i = 1; i <= g; ++i) {
          const auto at = static_cast<std::size_t>(std::llround(static_cast<double>(i) * (u.size() - 1) / g));
          q.push_back(u[at]);
        }
        u = sorted_unique(std::move(q));
      }
    }
    lines[static_cast<std::size_t>(j)] = std::move(u);
  }
  const Grid grid(std::move(lines));
  const auto e = ecdf_on_grid(grid, samples);

  KolmogorovResult out;
  std::vector<double> f;
  if (diagonal) {
    Vector scale = identity ? Vector::Ones(p) : Vector(reference.covariance.diagonal().cwiseSqrt());
    if ((scale.array() <= 0.0).any()) throw DomainError("reference variances must be positive");
    f = product_cdf_on_grid(grid, scale);
  } else {
    f = ecdf_on_grid(grid, reference_draws(reference, p));
    out.reference_std_error = 0.5 / std::sqrt(static_cast<double>(reference.mc_draws));
  }

  // Walk cells by their lower corner l (l_j <= m_j); the upper corner is l + 1.
  std::int64_t step_up = 0;
  for (int j = 0; j < p; ++j) step_up += grid.stride[static_cast<std::size_t>(j)];
  double lower = 0.0, upper = 0.0;
  for (std::int64_t at = 0; at < grid.total; ++at) {
    const auto a = static_cast<std::size_t>(at);
    lower = std::max(lower, std::abs(e[a] - f[a]));
    bool interior = true;
    for (std::size_t j = 0; j < grid.size.size() && interior; ++j) {
      interior = (at / grid.stride[j]) % grid.size[j] != grid.size[j] - 1;
    }
    if (!interior) continue;
    const auto b = static_cast<std::size_t>(at + step_up);
    // Inside the cell the empirical CDF is e[a] (exact) or within [e[a], e[b]].
    const double e_hi = mode == KolMode::exact ? e[a] : e[b];
    upper = std::max({upper, e_hi - f[a], f[b] - e[a]});
    ++out.cells;
  }
  if (mode == KolMode::exact) {
    out.exact = true;
    out.value = out.lower = out.upper = std::max(lower, upper);
  } else {
    out.exact = false;
    out.lower = lower;
    out.upper = std::max(lower, upper);
    out.value = lower;
  }
  return out;
}

double empirical_kolmogorov(const Matrix& samples, const Matrix& second) {
  check_samples(samples);
  check_samples(second);
  if (samples.cols() != second.cols()) throw ValidationError("samples differ in dimension");
  std::vector<std::vector<double>> lines;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    auto a = column(samples, j);
    const auto b = column(second, j);
    a.insert(a.end(), b.begin(), b.end());
    lines.push_back(sorted_unique(std::move(a)));
  }
  const Grid grid(std::move(lines));
  const auto e1 = ecdf_on_grid(grid, samples);
  const auto e2 = ecdf_on_grid(grid, second);
  double sup = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) sup = std::max(sup, std::abs(e1[i] - e2[i]));
  return sup;
}

}  // namespace gsbound
