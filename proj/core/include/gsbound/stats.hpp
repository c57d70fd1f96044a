#pragma once

#include <cmath>
#include <cstdint>

namespace gsbound {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Power sums of a scalar stream up to the fourth power. Enough for the mean,
// the variance, and standard errors of both.
class PowerSums {
 public:
  void add(double x) {
    const double x2 = x * x;
    s1_.add(x);
    s2_.add(x2);
    s3_.add(x2 * x);
    s4_.add(x2 * x2);
    ++n_;
  }
  void merge(const PowerSums& o) {
    s1_.merge(o.s1_);
    s2_.merge(o.s2_);
    s3_.merge(o.s3_);
    s4_.merge(o.s4_);
    n_ += o.n_;
  }

  std::int64_t count() const { return n_; }
  double raw(int k) const;
  double mean() const { return raw(1); }
  // Plug-in variance of the stream.
  double variance() const;
  double mean_std_error() const;
  double variance_std_error() const;

 private:
  CompensatedSum s1_, s2_, s3_, s4_;
  std::int64_t n_ = 0;
};

inline double PowerSums::raw(int k) const {
  if (n_ == 0) return 0.0;
  const double n = static_cast<double>(n_);
  switch (k) {
    case 1: return s1_.value() / n;
    case 2: return s2_.value() / n;
    case 3: return s3_.value() / n;
    case 4: return s4_.value() / n;
    default: return 0.0;
  }
}

inline double PowerSums::variance() const {
  const double m = raw(1);
  const double v = raw(2) - m * m;
  return v > 0.0 ? v : 0.0;
}

inline double PowerSums::mean_std_error() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_ - 1));
}

inline double PowerSums::variance_std_error() const {
  if (n_ < 2) return 0.0;
  const double m = raw(1), m2 = raw(2), m3 = raw(3), m4 = raw(4);
  const double c2 = m2 - m * m;
  const double c4 = m4 - 4.0 * m * m3 + 6.0 * m * m * m2 - 3.0 * m * m * m * m;
  const double v = c4 - c2 * c2;
  return v > 0.0 ? std::sqrt(v / static_cast<double>(n_ - 1)) : 0.0;
}

}  // namespace gsbound
