#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gsbound/types.hpp"

namespace gsbound {

// K analyses at cumulative sample sizes n_1 < ... < n_K = n, parameter
// dimension d. Group k (0-based) holds observations [n_{k-1}, n_k).
class GroupDesign {
 public:
  GroupDesign() = default;
  GroupDesign(int d, std::vector<long> cumulative);

  int dim() const { return d_; }
  int analyses() const { return static_cast<int>(n_.size()); }
  long total() const { return n_.empty() ? 0 : n_.back(); }
  int stacked_dim() const { return d_ * analyses(); }

  const std::vector<long>& cumulative() const { return n_; }
  long cumulative(int k) const { return n_.at(static_cast<std::size_t>(k)); }
  long group_begin(int k) const { return k == 0 ? 0 : n_.at(static_cast<std::size_t>(k - 1)); }
  long group_end(int k) const { return cumulative(k); }
  long group_size(int k) const { return group_end(k) - group_begin(k); }

  // |G_k| / n.
  double fraction(int k) const;
  // |G_k| / n as a reduced fraction (numerator, denominator).
  std::pair<long, long> fraction_exact(int k) const;
  // Group index of a 0-based observation index.
  int group_of(long obs) const;

  bool operator==(const GroupDesign&) const = default;

 private:
  int d_ = 0;
  std::vector<long> n_;
};

// Validating constructor; throws ValidationError.
GroupDesign make_design(int d, std::vector<long> cumulative);
// K equal groups totalling n (n must be divisible by K).
GroupDesign equal_groups(int d, long n, int k);
// K groups whose cumulative sizes are n k / K rounded to nearest; sizes differ
// by at most one.
GroupDesign balanced_groups(int d, long n, int k);

// Concatenation (theta_1', ..., theta_K')' of K blocks of size d.
class StackedVector {
 public:
  StackedVector(int d, Vector values);
  static StackedVector from_blocks(const std::vector<Vector>& blocks);

  int block_dim() const { return d_; }
  int blocks() const { return static_cast<int>(v_.size() / d_); }
  const Vector& values() const { return v_; }
  Vector& values() { return v_; }
  auto block(int k) const { return v_.segment(static_cast<Eigen::Index>(k) * d_, d_); }
  auto block(int k) { return v_.segment(static_cast<Eigen::Index>(k) * d_, d_); }
  std::vector<Vector> to_blocks() const;

 private:
  int d_;
  Vector v_;
};

// Largest absolute component.
double max_abs_block(const StackedVector& x);
double max_abs_block(const Vector& x);

// Observations in time order, t values per row.
struct SequentialDataset {
  GroupDesign design;
  int obs_dim = 1;
  std::vector<double> values;
  std::optional<Vector> theta0;
  std::optional<std::uint64_t> seed;

  long size() const { return obs_dim == 0 ? 0 : static_cast<long>(values.size()) / obs_dim; }
  std::span<const double> observation(long i) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(i * obs_dim),
                                                   static_cast<std::size_t>(obs_dim));
  }
  std::span<const double> all() const { return values; }
  // Throws ValidationError when the row count does not match the design.
  void validate() const;
};

// Plain-text table: first non-comment line holds t, then one observation per
// row with t whitespace-separated values. Lines starting with '#' are skipped.
SequentialDataset read_dataset(std::istream& in, const GroupDesign& design);
void write_dataset(std::ostream& out, const SequentialDataset& data);

}  // namespace gsbound
