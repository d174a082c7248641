#pragma once

// Sample quantiles (Hyndman-Fan type 8) and a difference-quotient estimate of
// the quantile density q(p) = Q'(p).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "qineq/errors.hpp"
#include "qineq/sample.hpp"

namespace qineq {

// Plotting position h = (n + 1/3)p + 1/3, clamped to [1, n].
inline double hf8_quantile(const SortedSample& s, double p) {
  if (s.empty()) throw domain_error("hf8_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw domain_error("hf8_quantile: p must lie in [0,1]");
  const auto n = static_cast<double>(s.size());
  const double h = std::clamp((n + 1.0 / 3.0) * p + 1.0 / 3.0, 1.0, n);
  const auto k = static_cast<std::size_t>(std::floor(h));
  const double g = h - static_cast<double>(k);
  const double lo = s.order_stat(k);
  if (k >= s.size() || g == 0.0) return lo;
  return lo + g * (s.order_stat(k + 1) - lo);
}

struct BandwidthRule {
  enum class Kind { FixedH, AutomaticQOR };
  Kind kind = Kind::AutomaticQOR;
  double h = 0.0;  // only read for FixedH

  static BandwidthRule automatic() { return {}; }
  static BandwidthRule fixed(double h) {
    if (!(h > 0.0 && h < 0.5)) throw domain_error("BandwidthRule: fixed h must lie in (0, 1/2)");
    return {Kind::FixedH, h};
  }
};

// Keeps [p - h, p + h] well inside (0,1): at most half the distance to the
// nearer end, so the window never reaches the clamped extreme order statistics.
inline double shrink_bandwidth(double h, double p) {
  return std::min(h, 0.5 * std::min(p, 1.0 - p));
}

inline double default_bandwidth(std::size_t n, double p) {
  if (n < 3) throw insufficient_data("default_bandwidth: need n >= 3");
  if (!(p > 0.0 && p < 1.0)) throw domain_error("default_bandwidth: p must lie in (0,1)");
  const double h = std::min(0.25, std::max(0.001, 0.9 * std::pow(static_cast<double>(n), -0.2)));
  return shrink_bandwidth(h, p);
}

struct QuantileDensityEstimate {
  double value = 0.0;
  double h = 0.0;
  bool degenerate = false;  // zero spread inside the window
};

inline QuantileDensityEstimate empirical_quantile_density(const SortedSample& s, double p,
                                                          const BandwidthRule& rule = {}) {
  if (s.size() < 3) throw insufficient_data("empirical_quantile_density: need n >= 3");
  if (!(p > 0.0 && p < 1.0)) throw domain_error("empirical_quantile_density: p must lie in (0,1)");
  const double h = rule.kind == BandwidthRule::Kind::FixedH ? shrink_bandwidth(rule.h, p)
                                                            : default_bandwidth(s.size(), p);
  const double diff = hf8_quantile(s, p + h) - hf8_quantile(s, p - h);
  if (!(diff > 0.0)) return {0.0, h, true};
  return {diff / (2.0 * h), h, false};
}

}  // namespace qineq
