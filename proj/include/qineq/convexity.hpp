#pragma once

// Convexity of the population ratio curve. With H(p) = q(p)/Q(p) and the scale
// score K(p) = -1 + Q(p)J(p) one has H' = K H^2, and
//   R''(p) = (R/4) t(p),
//   t(p) = H(p/2)^2 (1 + K(p/2)) + H(1-p/2)^2 (1 - K(1-p/2)) + 2 H(p/2) H(1-p/2),
// so R is convex exactly where t > 0.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "qineq/distributions.hpp"
#include "qineq/errors.hpp"

namespace qineq {

inline double h_q(const ParametricModel& m, double p) {
  const double Q = quantile(m, p);
  if (!(Q > 0.0)) throw domain_error("h_q: Q(p) must be positive");
  return quantile_density(m, p) / Q;
}

namespace detail {

// K from a central difference of q: J = q'/q^2. Relative step keeps the
// stencil inside (0,1) near both ends.
inline double numeric_score_K(const ParametricModel& m, double p) {
  const double step = 1e-4 * std::min(p, 1.0 - p);
  const double q = quantile_density(m, p);
  const double dq = (quantile_density(m, p + step) - quantile_density(m, p - step)) / (2.0 * step);
  return -1.0 + quantile(m, p) * dq / (q * q);
}

inline double t_from_parts(double H1, double K1, double H2, double K2) {
  return H1 * H1 * (1.0 + K1) + H2 * H2 * (1.0 - K2) + 2.0 * H1 * H2;
}

inline double t_value(const ParametricModel& m, double p, bool numeric) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("t_function: p must lie in (0,1)");
  const double lo = 0.5 * p;
  const double hi = 1.0 - lo;
  const double K1 = numeric ? numeric_score_K(m, lo) : score_K(m, lo);
  const double K2 = numeric ? numeric_score_K(m, hi) : score_K(m, hi);
  return t_from_parts(h_q(m, lo), K1, h_q(m, hi), K2);
}

}  // namespace detail

// Uses the tabulated score functions; unsupported families throw.
inline double t_function(const ParametricModel& m, double p) {
  if (!m.has_closed_form_scores()) {
    throw unsupported_operation("t_function: no closed-form scores for '" + m.to_string() + "'");
  }
  return detail::t_value(m, p, false);
}

// Same indicator with K obtained by differentiating q numerically.
inline double t_function_numeric(const ParametricModel& m, double p) {
  return detail::t_value(m, p, true);
}

// Pareto I on [1, inf): H(p) = 1/(a(1-p)) and K = a give
// t(p) = 16 (1 - a(1-p)) / (a^2 p^2 (2-p)^2).
inline double t_pareto1_closed(double a, double p) {
  if (!(a > 0.0)) throw domain_error("t_pareto1_closed: a must be positive");
  if (!(p > 0.0 && p < 1.0)) throw domain_error("t_pareto1_closed: p must lie in (0,1)");
  const double d = a * p * (2.0 - p);
  return 16.0 * (1.0 - a * (1.0 - p)) / (d * d);
}

inline double r_second_derivative(const ParametricModel& m, double p) {
  if (!m.has_closed_form_scores()) {
    throw unsupported_operation("r_second_derivative: no closed-form scores for '" + m.to_string() +
                                "'");
  }
  const double lo = 0.5 * p;
  const double hi = 1.0 - lo;
  const double H1 = h_q(m, lo);
  const double H2 = h_q(m, hi);
  const double dH1 = score_K(m, lo) * H1 * H1;
  const double dH2 = score_K(m, hi) * H2 * H2;
  return 0.25 * true_R(m, p) * ((H1 + H2) * (H1 + H2) + dH1 - dH2);
}

struct ConvexityReport {
  ParametricModel model;
  std::vector<double> grid;
  std::vector<double> t_values;
  std::vector<std::pair<double, double>> negative_regions;
  bool convex_on_grid = true;
  bool numeric_scores = false;
};

inline ConvexityReport convexity_scan(const ParametricModel& m, int gridsize = 1000) {
  if (gridsize < 10) throw domain_error("convexity_scan: gridsize must be >= 10");
  ConvexityReport rep;
  rep.model = m;
  rep.numeric_scores = !m.has_closed_form_scores();
  auto t = [&](double p) { return detail::t_value(m, p, rep.numeric_scores); };

  const auto n = static_cast<std::size_t>(gridsize);
  rep.grid.resize(n);
  rep.t_values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    rep.grid[j] = (static_cast<double>(j) + 0.5) / gridsize;
    rep.t_values[j] = t(rep.grid[j]);
  }

  // Sign change between a and b (t(a) < 0 == neg_at_a); bisect to 1e-6.
  auto boundary = [&](double a, double b, bool neg_at_a) {
    while (b - a > 1e-6) {
      const double mid = 0.5 * (a + b);
      if ((t(mid) < 0.0) == neg_at_a) a = mid; else b = mid;
    }
    return 0.5 * (a + b);
  };

  std::size_t j = 0;
  while (j < n) {
    if (!(rep.t_values[j] < 0.0)) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k + 1 < n && rep.t_values[k + 1] < 0.0) ++k;
    const double lo = j == 0 ? 0.0 : boundary(rep.grid[j - 1], rep.grid[j], false);
    const double hi = k + 1 == n ? 1.0 : boundary(rep.grid[k], rep.grid[k + 1], true);
    rep.negative_regions.emplace_back(lo, hi);
    j = k + 1;
  }
  rep.convex_on_grid = rep.negative_regions.empty();
  return rep;
}

// Bisection on a one-parameter family for the parameter value where the scan
// switches from convex (at lo) to non-convex (at hi).
inline double convexity_boundary(const std::function<ParametricModel(double)>& family, double lo,
                                 double hi, int gridsize = 1000, double tol = 1e-4) {
  const bool convex_lo = convexity_scan(family(lo), gridsize).convex_on_grid;
  const bool convex_hi = convexity_scan(family(hi), gridsize).convex_on_grid;
  if (convex_lo == convex_hi) {
    throw domain_error("convexity_boundary: the scan does not change between the endpoints");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (convexity_scan(family(mid), gridsize).convex_on_grid == convex_lo) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qineq
