#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qineq/errors.hpp"

namespace qineq {

// Immutable ascending sample. Positivity is not required here; operations
// that take ratios check it themselves.
class SortedSample {
 public:
  SortedSample() = default;

  explicit SortedSample(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (std::isnan(v)) throw domain_error("SortedSample: NaN observation");
    }
    std::sort(values_.begin(), values_.end());
  }

  static SortedSample from_sorted(std::vector<double> values) {
    if (!std::is_sorted(values.begin(), values.end())) {
      throw domain_error("SortedSample::from_sorted: values are not ascending");
    }
    SortedSample s;
    s.values_ = std::move(values);
    return s;
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  // Zero-based access.
  double operator[](std::size_t i) const { return values_[i]; }

  // One-based order statistic X_(i).
  double order_stat(std::size_t i) const { return values_.at(i - 1); }

  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }
  double mean() const { return sum() / static_cast<double>(values_.size()); }

  bool all_positive() const { return !values_.empty() && values_.front() > 0.0; }

  SortedSample scaled(double c) const {
    if (!(c > 0.0)) throw domain_error("SortedSample::scaled: factor must be positive");
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return from_sorted(std::move(v));
  }

  friend bool operator==(const SortedSample&, const SortedSample&) = default;

 private:
  std::vector<double> values_;
};

inline void require_positive(const SortedSample& s, const char* who) {
  if (s.empty()) throw domain_error(std::string(who) + ": empty sample");
  if (!s.all_positive()) throw domain_error(std::string(who) + ": observations must be positive");
}

}  // namespace qineq
