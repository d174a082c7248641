#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "qineq/errors.hpp"

namespace qineq {

enum class QuadratureScheme { AdaptiveSimpson, CompositeGaussLegendre };

struct QuadratureSpec {
  // Subinterval budget for the adaptive scheme, panel count for Gauss-Legendre.
  int intervals = 1000;
  QuadratureScheme scheme = QuadratureScheme::AdaptiveSimpson;
  double tolerance = 1e-8;

  void validate() const {
    if (intervals < 2) throw domain_error("QuadratureSpec: intervals must be >= 2");
    if (!(tolerance > 0.0)) throw domain_error("QuadratureSpec: tolerance must be positive");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals_used = 0;
  bool converged = false;
};

namespace detail {

struct SimpsonCell {
  double a, b;
  double fa, fl, fm, fr, fb;  // f at a, a+h/4, a+h/2, a+3h/4, b
  double value;
  double error;

  bool operator<(const SimpsonCell& other) const { return error < other.error; }
};

template <typename F>
SimpsonCell make_cell(F& f, double a, double b, double fa, double fm, double fb) {
  const double h = b - a;
  const double fl = f(a + 0.25 * h);
  const double fr = f(a + 0.75 * h);
  const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
  const double halves = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
  const double diff = halves - whole;
  return {a, b, fa, fl, fm, fr, fb, halves + diff / 15.0, std::fabs(diff) / 15.0};
}

// 10-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
inline constexpr std::array<double, 5> kGLNodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659, 0.6794095682990244062343274,
    0.8650633666889845107320967, 0.9739065285171717200779640};
inline constexpr std::array<double, 5> kGLWeights = {
    0.2955242247147528701738930, 0.2692667193099963550912269, 0.2190863625159820439955349,
    0.1494513491505805931457763, 0.0666713443086881375935688};

template <typename F>
double gauss_legendre_panels(F& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < kGLNodes.size(); ++i) {
      s += kGLWeights[i] * (f(mid - half * kGLNodes[i]) + f(mid + half * kGLNodes[i]));
    }
    total += s * half;
  }
  return total;
}

}  // namespace detail

// Integrates f over [a, b]. The adaptive scheme refines the cell with the
// largest error estimate until the summed estimate drops below the tolerance
// or the interval budget is exhausted; the returned sum is taken in
// left-to-right order so the result is reproducible.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (a == b) return {0.0, 0.0, 0, true};

  if (spec.scheme == QuadratureScheme::CompositeGaussLegendre) {
    const double fine = detail::gauss_legendre_panels(f, a, b, spec.intervals);
    const double coarse = detail::gauss_legendre_panels(f, a, b, std::max(1, spec.intervals / 2));
    const double err = std::fabs(fine - coarse);
    return {fine, err, spec.intervals, err <= spec.tolerance};
  }

  std::priority_queue<detail::SimpsonCell> cells;
  const int initial = std::min(8, spec.intervals);
  const double h = (b - a) / initial;
  double f_left = f(a);
  for (int k = 0; k < initial; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == initial) ? b : a + (k + 1) * h;
    const double f_right = f(hi);
    cells.push(detail::make_cell(f, lo, hi, f_left, f(0.5 * (lo + hi)), f_right));
    f_left = f_right;
  }

  double err_sum = 0.0;
  {
    auto copy = cells;
    while (!copy.empty()) {
      err_sum += copy.top().error;
      copy.pop();
    }
  }

  while (err_sum > spec.tolerance && static_cast<int>(cells.size()) < spec.intervals) {
    const detail::SimpsonCell worst = cells.top();
    cells.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::make_cell(f, worst.a, mid, worst.fa, worst.fl, worst.fm);
    auto right = detail::make_cell(f, mid, worst.b, worst.fm, worst.fr, worst.fb);
    err_sum += left.error + right.error - worst.error;
    cells.push(left);
    cells.push(right);
  }

  std::vector<detail::SimpsonCell> ordered;
  ordered.reserve(cells.size());
  while (!cells.empty()) {
    ordered.push_back(cells.top());
    cells.pop();
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  double value = 0.0;
  double err = 0.0;
  for (const auto& c : ordered) {
    value += c.value;
    err += c.error;
  }
  return {value, err, static_cast<int>(ordered.size()), err <= spec.tolerance};
}

}  // namespace qineq
