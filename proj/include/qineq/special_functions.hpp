#pragma once

// Normal, incomplete beta and incomplete gamma functions together with their
// inverses. Accuracy targets are relative 1e-12 for the normal quantile and
// 1e-10 for the Beta / Gamma quantiles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "qineq/errors.hpp"

namespace qineq::special {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// 1 - Phi(x) without cancellation.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

namespace detail {

// Acklam's rational approximation, |rel err| < 1.15e-9 on (0, 1/2].
inline double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Inverse standard normal CDF. One Halley step on top of Acklam's
// approximation brings the error to machine precision.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw domain_error("normal_quantile: p must lie in (0,1)");
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = detail::acklam_lower(p);
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace detail {

inline constexpr double kTiny = 1e-300;
inline constexpr double kEps = 1e-15;
inline constexpr int kMaxIter = 2000;

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw numeric_error("incomplete beta continued fraction did not converge", std::fabs(h));
}

}  // namespace detail

// Returns {I_x(a,b), 1 - I_x(a,b)}, each computed on the side where it is
// accurate.
inline std::pair<double, double> incomplete_beta_pair(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw domain_error("incomplete_beta: a, b must be positive");
  if (x <= 0.0) return {0.0, 1.0};
  if (x >= 1.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = front * detail::beta_continued_fraction(a, b, x) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
  return {1.0 - upper, upper};
}

inline double incomplete_beta(double a, double b, double x) {
  return incomplete_beta_pair(a, b, x).first;
}

inline double beta_pdf(double a, double b, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
}

// Returns {P(a,x), Q(a,x)} for the regularized incomplete gamma function.
inline std::pair<double, double> incomplete_gamma_pair(double a, double x) {
  if (!(a > 0.0)) throw domain_error("incomplete_gamma: a must be positive");
  if (x <= 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < detail::kMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * detail::kEps) {
        const double lower = sum * std::exp(log_front);
        return {lower, 1.0 - lower};
      }
    }
    throw numeric_error("incomplete gamma series did not converge", std::fabs(del));
  }
  double b = x + 1.0 - a;
  double c = 1.0 / detail::kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= detail::kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < detail::kTiny) d = detail::kTiny;
    c = b + an / c;
    if (std::fabs(c) < detail::kTiny) c = detail::kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < detail::kEps) {
      const double upper = std::exp(log_front) * h;
      return {1.0 - upper, upper};
    }
  }
  throw numeric_error("incomplete gamma continued fraction did not converge", std::fabs(h));
}

inline double gamma_p(double a, double x) { return incomplete_gamma_pair(a, x).first; }
inline double gamma_q(double a, double x) { return incomplete_gamma_pair(a, x).second; }

inline double gamma_pdf(double a, double x) {
  if (x <= 0.0) return 0.0;
  return std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
}

namespace detail {

// Safeguarded Newton for an increasing function g of y on (lo, hi); either
// end may be infinite. g returns {value, derivative}.
template <typename G>
double solve_increasing(G&& g, double y, double lo, double hi, const char* what) {
  constexpr int max_iter = 300;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const auto [val, deriv] = g(y);
    if (val == 0.0) return y;
    if (val < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    double next = y - val / deriv;
    const bool inside = std::isfinite(next) && next > lo && next < hi;
    if (!inside) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        next = 0.5 * (lo + hi);
      } else if (std::isfinite(lo)) {
        next = y + std::max(1.0, std::fabs(y));
      } else {
        next = y - std::max(1.0, std::fabs(y));
      }
    }
    const double step = std::fabs(next - y);
    y = next;
    if (step <= 4e-16 * std::max(1.0, std::fabs(y)) ||
        (std::isfinite(lo) && std::isfinite(hi) &&
         hi - lo <= 4e-16 * std::max(1.0, std::fabs(y)))) {
      return y;
    }
    last_step = step;
  }
  throw numeric_error(std::string(what) + ": Newton iteration did not converge", last_step);
}

// Lower-tail inverse of I_x(a,b) for p <= 1/2, iterating on log(x).
inline double inverse_beta_lower(double a, double b, double p) {
  double x;
  if (a >= 1.0 && b >= 1.0) {
    const double t = std::sqrt(-2.0 * std::log(p));
    double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
    const double al = (z * z - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a - 1.0) + 1.0 / (2.0 * b - 1.0));
    const double w = z * std::sqrt(al + h) / h -
                     (1.0 / (2.0 * b - 1.0) - 1.0 / (2.0 * a - 1.0)) *
                         (al + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a / (a + b * std::exp(2.0 * w));
  } else {
    const double lna = std::log(a / (a + b));
    const double lnb = std::log(b / (a + b));
    const double t = std::exp(a * lna) / a;
    const double u = std::exp(b * lnb) / b;
    const double w = t + u;
    if (p < t / w) {
      x = std::pow(a * w * p, 1.0 / a);
    } else {
      x = 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
    }
  }
  if (!(x > 0.0 && x < 1.0) || !std::isfinite(x)) x = 0.5;
  const double lb = log_beta(a, b);
  auto g = [&](double y) {
    const double xv = std::exp(y);
    const double val = incomplete_beta_pair(a, b, xv).first - p;
    const double log1m = std::log(-std::expm1(y));
    const double deriv = std::exp(a * y + (b - 1.0) * log1m - lb);
    return std::pair{val, deriv};
  };
  const double y = solve_increasing(g, std::log(x), -std::numeric_limits<double>::infinity(),
                                    0.0, "inverse incomplete beta");
  return std::exp(y);
}

}  // namespace detail

// x such that I_x(a,b) = p.
inline double incomplete_beta_inv(double a, double b, double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("incomplete_beta_inv: p must lie in (0,1)");
  if (p > 0.5) return 1.0 - detail::inverse_beta_lower(b, a, 1.0 - p);
  return detail::inverse_beta_lower(a, b, p);
}

// x such that 1 - I_x(a,b) = s; accurate for small s.
inline double incomplete_beta_inv_upper(double a, double b, double s) {
  if (!(s > 0.0 && s < 1.0)) throw domain_error("incomplete_beta_inv_upper: s must lie in (0,1)");
  if (s > 0.5) return detail::inverse_beta_lower(a, b, 1.0 - s);
  return 1.0 - detail::inverse_beta_lower(b, a, s);
}

namespace detail {

inline double gamma_initial_guess(double a, double p, bool upper) {
  // Wilson-Hilferty, with a small-x power-law fallback for the lower tail.
  const double z = upper ? -normal_quantile(p) : normal_quantile(p);
  const double c = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
  double x = a * c * c * c;
  if (!upper && (x <= 0.0 || a < 1.0)) {
    const double small = std::exp((std::log(p) + std::lgamma(a + 1.0)) / a);
    if (x <= 0.0 || small < x) x = small;
  }
  if (!(x > 0.0) || !std::isfinite(x)) x = std::max(a, 1e-3);
  return x;
}

}  // namespace detail

// x such that P(a,x) = p.
inline double gamma_p_inv(double a, double p) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("gamma_p_inv: p must lie in (0,1)");
  if (!(a > 0.0)) throw domain_error("gamma_p_inv: a must be positive");
  const double lg = std::lgamma(a);
  const bool use_upper = p > 0.5;
  const double target = use_upper ? 1.0 - p : p;
  auto g = [&](double y) {
    const double x = std::exp(y);
    const auto [lower, upper] = incomplete_gamma_pair(a, x);
    const double val = use_upper ? target - upper : lower - target;
    const double deriv = std::exp(a * y - x - lg);
    return std::pair{val, deriv};
  };
  const double x0 = detail::gamma_initial_guess(a, target, use_upper);
  const double y = detail::solve_increasing(g, std::log(x0), -std::numeric_limits<double>::infinity(),
                                            std::numeric_limits<double>::infinity(), "inverse incomplete gamma");
  return std::exp(y);
}

// x such that Q(a,x) = s; accurate for small s.
inline double gamma_q_inv(double a, double s) {
  if (!(s > 0.0 && s < 1.0)) throw domain_error("gamma_q_inv: s must lie in (0,1)");
  if (s > 0.5) return gamma_p_inv(a, 1.0 - s);
  if (!(a > 0.0)) throw domain_error("gamma_q_inv: a must be positive");
  const double lg = std::lgamma(a);
  auto g = [&](double y) {
    const double x = std::exp(y);
    const double val = s - incomplete_gamma_pair(a, x).second;
    const double deriv = std::exp(a * y - x - lg);
    return std::pair{val, deriv};
  };
  const double x0 = detail::gamma_initial_guess(a, s, true);
  const double y = detail::solve_increasing(g, std::log(x0), -std::numeric_limits<double>::infinity(),
                                            std::numeric_limits<double>::infinity(), "inverse incomplete gamma");
  return std::exp(y);
}

}  // namespace qineq::special
