#pragma once

// Sample ratio curve R^(p), the grid index I^(J), their plug-in asymptotic
// variances, Wald and bootstrap intervals, the Gini baseline, empirical Lorenz
// ordinates and median-preserving transfers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qineq/errors.hpp"
#include "qineq/quantile_estimation.hpp"
#include "qineq/random.hpp"
#include "qineq/sample.hpp"
#include "qineq/special_functions.hpp"

namespace qineq {

inline constexpr int kDefaultJ = 100;
inline constexpr double kDefaultAlpha = 0.05;
inline constexpr int kDefaultBootstrap = 500;

struct CurvePoint {
  double p = 0.0;
  double ordinate = 0.0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CurveGrid {
  int J = 0;
  std::vector<CurvePoint> points;
  friend bool operator==(const CurveGrid&, const CurveGrid&) = default;
};

enum class Measure { I, G };
enum class IntervalMethod { WaldI, WaldG, Bootstrap, WaldDiff };

inline const char* to_string(Measure m) { return m == Measure::I ? "I" : "G"; }
inline const char* to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::WaldI: return "WaldI";
    case IntervalMethod::WaldG: return "WaldG";
    case IntervalMethod::Bootstrap: return "Bootstrap";
    case IntervalMethod::WaldDiff: return "WaldDiff";
  }
  return "?";
}

struct IntervalEstimate {
  Measure measure = Measure::I;
  double point = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  IntervalMethod method = IntervalMethod::WaldI;
  int J = 0;           // 0 for G
  std::size_t n = 0;   // sample size (first sample for differences)
  std::size_t n2 = 0;  // second sample size for differences, else 0
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
  bool covers(double v) const { return lower <= v && v <= upper; }
  double width() const { return upper - lower; }
};

struct VarianceComponents {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double R = 1.0;
  double sigma2 = 0.0;
  bool degenerate = false;
};

namespace detail {

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("alpha must lie in (0,1)");
}
inline void require_J(int J) {
  if (J < 2) throw domain_error("J must be >= 2");
}
inline double z_crit(double alpha) { return special::normal_quantile(1.0 - 0.5 * alpha); }

}  // namespace detail

inline std::vector<double> midpoint_grid(int J) {
  if (J < 1) throw domain_error("midpoint_grid: J must be >= 1");
  std::vector<double> p(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) p[static_cast<std::size_t>(j)] = (j + 0.5) / J;
  return p;
}

inline double r_hat(const SortedSample& s, double p) {
  require_positive(s, "r_hat");
  if (!(p > 0.0 && p < 1.0)) throw domain_error("r_hat: p must lie in (0,1)");
  return hf8_quantile(s, 0.5 * p) / hf8_quantile(s, 1.0 - 0.5 * p);
}

inline CurveGrid curve(const SortedSample& s, int J = kDefaultJ) {
  detail::require_J(J);
  require_positive(s, "curve");
  CurveGrid g{J, {}};
  g.points.reserve(static_cast<std::size_t>(J));
  for (double p : midpoint_grid(J)) g.points.push_back({p, r_hat(s, p)});
  return g;
}

inline double i_hat(const SortedSample& s, int J = kDefaultJ) {
  double total = 0.0;
  for (const auto& pt : curve(s, J).points) total += 1.0 - pt.ordinate;
  return total / J;
}

// sigma^2_p from quantiles x_lo = Q(p/2), x_hi = Q(1-p/2) and quantile
// densities at the same points. Used with estimates or with true values.
inline VarianceComponents ratio_variance(double p, double x_lo, double x_hi, double q_lo,
                                         double q_hi) {
  const double s = 0.5 * p;
  const double x2 = x_hi * x_hi;
  VarianceComponents v;
  v.R = x_lo / x_hi;
  v.a0 = s * (1.0 - s) * q_lo * q_lo / x2;
  v.a1 = -2.0 * s * s * q_lo * q_hi / x2;
  v.a2 = s * (1.0 - s) * q_hi * q_hi / x2;
  v.sigma2 = std::max(0.0, v.a0 + v.a1 * v.R + v.a2 * v.R * v.R);
  return v;
}

// Asymptotic covariance of R^(p) and R^(r), p < r, from the same ingredients.
inline double ratio_covariance(double p, double r, double xp_lo, double xp_hi, double qp_lo,
                               double qp_hi, double xr_lo, double xr_hi, double qr_lo,
                               double qr_hi) {
  const double si = 0.5 * p;
  const double sj = 0.5 * r;
  const double Rp = xp_lo / xp_hi;
  const double Rr = xr_lo / xr_hi;
  const double Ai = qp_lo / xp_hi, Bi = Rp * qp_hi / xp_hi;
  const double Aj = qr_lo / xr_hi, Bj = Rr * qr_hi / xr_hi;
  return si * (1.0 - sj) * (Ai * Aj + Bi * Bj) - si * sj * (Ai * Bj + Bi * Aj);
}

namespace detail {

struct RatioPoint {
  double p, x_lo, x_hi, q_lo, q_hi;
  bool degenerate;
};

inline RatioPoint ratio_point(const SortedSample& s, double p, const BandwidthRule& rule) {
  const double lo = 0.5 * p;
  const auto qlo = empirical_quantile_density(s, lo, rule);
  const auto qhi = empirical_quantile_density(s, 1.0 - lo, rule);
  return {p, hf8_quantile(s, lo), hf8_quantile(s, 1.0 - lo), qlo.value, qhi.value,
          qlo.degenerate || qhi.degenerate};
}

}  // namespace detail

inline VarianceComponents sigma2_p(const SortedSample& s, double p, const BandwidthRule& rule = {}) {
  require_positive(s, "sigma2_p");
  if (!(p > 0.0 && p < 1.0)) throw domain_error("sigma2_p: p must lie in (0,1)");
  const auto pt = detail::ratio_point(s, p, rule);
  auto v = ratio_variance(p, pt.x_lo, pt.x_hi, pt.q_lo, pt.q_hi);
  v.degenerate = pt.degenerate;
  return v;
}

inline double sigma_pr(const SortedSample& s, double p, double r, const BandwidthRule& rule = {}) {
  if (p == r) return sigma2_p(s, p, rule).sigma2;
  if (p > r) std::swap(p, r);
  require_positive(s, "sigma_pr");
  if (!(p > 0.0 && r < 1.0)) throw domain_error("sigma_pr: p, r must lie in (0,1)");
  const auto a = detail::ratio_point(s, p, rule);
  const auto b = detail::ratio_point(s, r, rule);
  return ratio_covariance(p, r, a.x_lo, a.x_hi, a.q_lo, a.q_hi, b.x_lo, b.x_hi, b.q_lo, b.q_hi);
}

struct IndexVariance {
  double point = 0.0;     // I^(J)
  double variance = 0.0;  // floored at 0
  bool degenerate = false;
};

// Var I^(J) = (sum_j sigma^2_j + 2 sum_{i<j} sigma_ij) / (n J^2). The double sum
// factorises: sum_{j>i} sigma_ij = s_i [A_i U_i + B_i V_i] with suffix sums
// U_i, V_i, accumulated in a fixed order so the result is reproducible.
inline IndexVariance i_hat_with_variance(const SortedSample& s, int J = kDefaultJ,
                                         const BandwidthRule& rule = {}) {
  detail::require_J(J);
  require_positive(s, "var_i_hat");
  const auto grid = midpoint_grid(J);
  const auto nJ = static_cast<std::size_t>(J);
  std::vector<double> sh(nJ), A(nJ), B(nJ);
  IndexVariance out;
  double diag = 0.0;
  double ordinates = 0.0;
  for (std::size_t j = 0; j < nJ; ++j) {
    const auto pt = detail::ratio_point(s, grid[j], rule);
    const double R = pt.x_lo / pt.x_hi;
    ordinates += 1.0 - R;
    sh[j] = 0.5 * grid[j];
    A[j] = pt.q_lo / pt.x_hi;
    B[j] = R * pt.q_hi / pt.x_hi;
    out.degenerate = out.degenerate || pt.degenerate;
    diag += sh[j] * (1.0 - sh[j]) * (A[j] * A[j] + B[j] * B[j]) - 2.0 * sh[j] * sh[j] * A[j] * B[j];
  }
  double off = 0.0;
  double U = 0.0, V = 0.0;
  for (std::size_t j = nJ; j-- > 0;) {
    off += sh[j] * (A[j] * U + B[j] * V);
    U += (1.0 - sh[j]) * A[j] - sh[j] * B[j];
    V += (1.0 - sh[j]) * B[j] - sh[j] * A[j];
  }
  const double n = static_cast<double>(s.size());
  out.point = ordinates / J;
  out.variance = std::max(0.0, (diag + 2.0 * off) / (n * J * J));
  return out;
}

inline double var_i_hat(const SortedSample& s, int J = kDefaultJ, const BandwidthRule& rule = {}) {
  return i_hat_with_variance(s, J, rule).variance;
}

inline IntervalEstimate ci_I(const SortedSample& s, int J = kDefaultJ, double alpha = kDefaultAlpha,
                             const BandwidthRule& rule = {}) {
  detail::require_alpha(alpha);
  const auto iv = i_hat_with_variance(s, J, rule);
  IntervalEstimate e;
  e.measure = Measure::I;
  e.method = IntervalMethod::WaldI;
  e.level = 1.0 - alpha;
  e.J = J;
  e.n = s.size();
  e.point = iv.point;
  e.se = std::sqrt(iv.variance);
  const double half = detail::z_crit(alpha) * e.se;
  e.lower = e.point - half;
  e.upper = e.point + half;
  if (e.lower < 0.0 || e.upper > 1.0) {
    e.lower = std::max(0.0, e.lower);
    e.upper = std::min(1.0, e.upper);
    e.flags.push_back("truncated");
  }
  if (iv.degenerate) e.flags.push_back("degenerate_quantile_density");
  return e;
}

inline IntervalEstimate ci_diff_I(const SortedSample& s1, const SortedSample& s2, int J = kDefaultJ,
                                  double alpha = kDefaultAlpha, const BandwidthRule& rule = {}) {
  detail::require_alpha(alpha);
  const auto a = i_hat_with_variance(s1, J, rule);
  const auto b = i_hat_with_variance(s2, J, rule);
  IntervalEstimate e;
  e.measure = Measure::I;
  e.method = IntervalMethod::WaldDiff;
  e.level = 1.0 - alpha;
  e.J = J;
  e.n = s1.size();
  e.n2 = s2.size();
  e.point = a.point - b.point;
  e.se = std::sqrt(a.variance + b.variance);
  const double half = detail::z_crit(alpha) * e.se;
  e.lower = e.point - half;
  e.upper = e.point + half;
  if (a.degenerate || b.degenerate) e.flags.push_back("degenerate_quantile_density");
  return e;
}

inline double gini_hat(const SortedSample& s) {
  require_positive(s, "gini_hat");
  if (s.size() < 2) throw insufficient_data("gini_hat: need n >= 2");
  const double n = static_cast<double>(s.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) weighted += static_cast<double>(i + 1) * s[i];
  return 2.0 * weighted / (n * n * s.mean()) - (n + 1.0) / n;
}

// Influence-function plug-in: Var = sum (Z_i - Zbar)^2 / (n xbar)^2 with
// Z_i = -(G+1) X_(i) + (2i-1)/n X_(i) - (2/n) sum_{j<=i} X_(j).
inline double var_gini_hat(const SortedSample& s) {
  const double G = gini_hat(s);
  const std::size_t size = s.size();
  const double n = static_cast<double>(size);
  std::vector<double> z(size);
  double cum = 0.0;
  double zsum = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double x = s[i];
    cum += x;
    z[i] = -(G + 1.0) * x + (2.0 * static_cast<double>(i + 1) - 1.0) / n * x - 2.0 / n * cum;
    zsum += z[i];
  }
  const double zbar = zsum / n;
  double ss = 0.0;
  for (double v : z) ss += (v - zbar) * (v - zbar);
  const double denom = n * s.mean();
  return ss / (denom * denom);
}

inline IntervalEstimate ci_G(const SortedSample& s, double alpha = kDefaultAlpha) {
  detail::require_alpha(alpha);
  IntervalEstimate e;
  e.measure = Measure::G;
  e.method = IntervalMethod::WaldG;
  e.level = 1.0 - alpha;
  e.n = s.size();
  e.point = gini_hat(s);
  e.se = std::sqrt(var_gini_hat(s));
  const double half = detail::z_crit(alpha) * e.se;
  e.lower = e.point - half;
  e.upper = e.point + half;
  return e;
}

inline IntervalEstimate ci_diff_G(const SortedSample& s1, const SortedSample& s2,
                                  double alpha = kDefaultAlpha) {
  detail::require_alpha(alpha);
  IntervalEstimate e;
  e.measure = Measure::G;
  e.method = IntervalMethod::WaldDiff;
  e.level = 1.0 - alpha;
  e.n = s1.size();
  e.n2 = s2.size();
  e.point = gini_hat(s1) - gini_hat(s2);
  e.se = std::sqrt(var_gini_hat(s1) + var_gini_hat(s2));
  const double half = detail::z_crit(alpha) * e.se;
  e.lower = e.point - half;
  e.upper = e.point + half;
  return e;
}

// Type-7 (linear interpolation) quantile of an already sorted vector.
inline double type7_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw domain_error("type7_quantile: empty input");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

inline double point_estimate(const SortedSample& s, Measure m, int J = kDefaultJ) {
  return m == Measure::I ? i_hat(s, J) : gini_hat(s);
}

// Percentile interval from B resamples; resample b draws from its own
// derived seed, so the result depends only on (sample, seed, B).
inline IntervalEstimate bootstrap_ci(const SortedSample& s, Measure measure, int B = kDefaultBootstrap,
                                     double alpha = kDefaultAlpha, std::uint64_t seed = 0,
                                     int J = kDefaultJ) {
  if (B < 50) throw domain_error("bootstrap_ci: B must be >= 50");
  detail::require_alpha(alpha);
  IntervalEstimate e;
  e.measure = measure;
  e.method = IntervalMethod::Bootstrap;
  e.level = 1.0 - alpha;
  e.J = measure == Measure::I ? J : 0;
  e.n = s.size();
  e.point = point_estimate(s, measure, J);

  const std::size_t n = s.size();
  std::vector<double> reps(static_cast<std::size_t>(B));
  std::vector<double> draw(n);
  for (int b = 0; b < B; ++b) {
    Engine eng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(b)));
    for (auto& v : draw) v = s[uniform_index(eng, n)];
    reps[static_cast<std::size_t>(b)] = point_estimate(SortedSample(draw), measure, J);
  }
  double mean = 0.0;
  for (double v : reps) mean += v;
  mean /= B;
  double ss = 0.0;
  for (double v : reps) ss += (v - mean) * (v - mean);
  e.se = std::sqrt(ss / (B - 1));
  std::sort(reps.begin(), reps.end());
  e.lower = type7_quantile(reps, 0.5 * alpha);
  e.upper = type7_quantile(reps, 1.0 - 0.5 * alpha);
  if (e.point < e.lower || e.point > e.upper) e.flags.push_back("point_outside_interval");
  return e;
}

// L(p) = sum_{i <= ceil(np)} X_(i) / sum X.
inline CurveGrid lorenz_ordinates(const SortedSample& s, const std::vector<double>& grid) {
  require_positive(s, "lorenz_ordinates");
  const std::size_t n = s.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + s[i];
  CurveGrid out{static_cast<int>(grid.size()), {}};
  out.points.reserve(grid.size());
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("lorenz_ordinates: p must lie in [0,1]");
    // The small offset keeps np = k exactly from rounding up to k+1.
    const double k_real = std::ceil(static_cast<double>(n) * p - 1e-9);
    const auto k = static_cast<std::size_t>(std::clamp(k_real, 0.0, static_cast<double>(n)));
    out.points.push_back({p, cum[k] / cum[n]});
  }
  return out;
}

// Moves `amount` from the donor (1-based rank above the median) to the
// recipient (rank below the median). The transfer must leave the sorted order
// intact, which also keeps the middle order statistics and hence the median.
inline SortedSample median_preserving_transfer(const SortedSample& s, double amount,
                                               std::size_t donor_rank, std::size_t recipient_rank) {
  if (!(amount > 0.0) || !std::isfinite(amount)) {
    throw rejected_transfer("transfer amount must be positive");
  }
  const std::size_t n = s.size();
  const std::size_t upper_mid = n / 2 + 1;      // lowest rank the median depends on from above
  const std::size_t lower_mid = (n + 1) / 2;    // highest rank it depends on from below
  if (donor_rank <= upper_mid || donor_rank > n) {
    throw rejected_transfer("donor rank must lie strictly above the median ranks");
  }
  if (recipient_rank < 1 || recipient_rank >= lower_mid) {
    throw rejected_transfer("recipient rank must lie strictly below the median ranks");
  }
  std::vector<double> v = s.vector();
  const double new_donor = v[donor_rank - 1] - amount;
  const double new_recipient = v[recipient_rank - 1] + amount;
  if (new_donor < v[donor_rank - 2]) {
    throw rejected_transfer("transfer would move the donor below its lower neighbour");
  }
  if (new_recipient > v[recipient_rank]) {
    throw rejected_transfer("transfer would move the recipient above its upper neighbour");
  }
  v[donor_rank - 1] = new_donor;
  v[recipient_rank - 1] = new_recipient;
  return SortedSample::from_sorted(std::move(v));
}

}  // namespace qineq
