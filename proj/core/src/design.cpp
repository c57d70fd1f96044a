#include "gsbound/design.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "gsbound/error.hpp"

namespace gsbound {

GroupDesign::GroupDesign(int d, std::vector<long> cumulative) : d_(d), n_(std::move(cumulative)) {
  if (d_ < 1) throw ValidationError("design: parameter dimension must be at least 1");
  if (n_.empty()) throw ValidationError("design: at least one analysis is required");
  long prev = 0;
  for (std::size_t k = 0; k < n_.size(); ++k) {
    if (n_[k] <= prev) {
      throw ValidationError("design: cumulative sizes must be positive and strictly increasing (analysis " +
                            std::to_string(k + 1) + ")");
    }
    prev = n_[k];
  }
}

double GroupDesign::fraction(int k) const {
  return static_cast<double>(group_size(k)) / static_cast<double>(total());
}

std::pair<long, long> GroupDesign::fraction_exact(int k) const {
  const long num = group_size(k), den = total();
  const long g = std::gcd(num, den);
  return {num / g, den / g};
}

int GroupDesign::group_of(long obs) const {
  if (obs < 0 || obs >= total()) throw ValidationError("design: observation index out of range");
  auto it = std::upper_bound(n_.begin(), n_.end(), obs);
  return static_cast<int>(it - n_.begin());
}

GroupDesign make_design(int d, std::vector<long> cumulative) {
  return GroupDesign(d, std::move(cumulative));
}

GroupDesign equal_groups(int d, long n, int k) {
  if (k < 1 || n % k != 0) throw ValidationError("design: n must be divisible by K");
  std::vector<long> sizes(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) sizes[static_cast<std::size_t>(j)] = n / k * (j + 1);
  return GroupDesign(d, std::move(sizes));
}

GroupDesign balanced_groups(int d, long n, int k) {
  if (k < 1 || n < k) throw ValidationError("design: need 1 <= K <= n");
  std::vector<long> sizes(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) sizes[static_cast<std::size_t>(j)] = (n * (j + 1) + k / 2) / k;
  return make_design(d, std::move(sizes));
}

StackedVector::StackedVector(int d, Vector values) : d_(d), v_(std::move(values)) {
  if (d_ < 1 || v_.size() % d_ != 0) throw ValidationError("stacked vector: bad block size");
}

StackedVector StackedVector::from_blocks(const std::vector<Vector>& blocks) {
  if (blocks.empty()) throw ValidationError("stacked vector: no blocks");
  const auto d = blocks.front().size();
  Vector v(d * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].size() != d) throw ValidationError("stacked vector: ragged blocks");
    v.segment(static_cast<Eigen::Index>(k) * d, d) = blocks[k];
  }
  return StackedVector(static_cast<int>(d), std::move(v));
}

std::vector<Vector> StackedVector::to_blocks() const {
  std::vector<Vector> out;
  for (int k = 0; k < blocks(); ++k) out.emplace_back(block(k));
  return out;
}

double max_abs_block(const Vector& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

double max_abs_block(const StackedVector& x) { return max_abs_block(x.values()); }

void SequentialDataset::validate() const {
  if (obs_dim < 1) throw ValidationError("dataset: observation dimension must be positive");
  if (values.size() % static_cast<std::size_t>(obs_dim) != 0) {
    throw ValidationError("dataset: value count is not a multiple of the observation dimension");
  }
  if (size() != design.total()) {
    throw ValidationError("dataset: " + std::to_string(size()) + " observations, design expects " +
                          std::to_string(design.total()));
  }
}

SequentialDataset read_dataset(std::istream& in, const GroupDesign& design) {
  SequentialDataset data;
  data.design = design;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    if (!have_header) {
      if (!(row >> data.obs_dim) || data.obs_dim < 1) {
        throw ValidationError("dataset line " + std::to_string(lineno) +
                              ": expected the observation dimension");
      }
      have_header = true;
      continue;
    }
    double v;
    int count = 0;
    while (row >> v) {
      data.values.push_back(v);
      ++count;
    }
    if (!row.eof() || count != data.obs_dim) {
      throw ValidationError("dataset line " + std::to_string(lineno) + ": expected " +
                            std::to_string(data.obs_dim) + " numeric values");
    }
  }
  if (!have_header) throw ValidationError("dataset: empty input");
  data.validate();
  return data;
}

void write_dataset(std::ostream& out, const SequentialDataset& data) {
  out << data.obs_dim << '\n';
  const auto old = out.precision(17);
  for (long i = 0; i < data.size(); ++i) {
    auto row = data.observation(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
    out << '\n';
  }
  out.precision(old);
}

}  // namespace gsbound
