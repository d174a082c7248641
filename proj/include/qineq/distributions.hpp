#pragma once

// Parametric income models with exact quantile functions, quantile densities,
// score functions, inversion sampling and the population values of the
// quantile-ratio index I and the Gini index G.
//
// Every family is evaluated in standardized form and multiplied by an optional
// trailing scale parameter, so scaled(c) multiplies every income by c.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qineq/errors.hpp"
#include "qineq/quadrature.hpp"
#include "qineq/random.hpp"
#include "qineq/sample.hpp"
#include "qineq/special_functions.hpp"

namespace qineq {

enum class Family {
  Exponential,
  Normal,
  Lognormal,
  Beta,
  ChiSquared,
  ParetoI,
  ParetoII,
  Weibull,
  Uniform,
  CompositeLognormalFrechet,
};

namespace detail {

struct FamilyInfo {
  Family family;
  std::string_view name;
  std::size_t required;  // shape parameters that must be given
  std::size_t optional;  // trailing parameters with defaults (incl. scale)
};

inline constexpr std::array<FamilyInfo, 10> kFamilies = {{
    {Family::Exponential, "exponential", 0, 1},
    {Family::Normal, "normal", 0, 2},
    {Family::Lognormal, "lognormal", 0, 2},
    {Family::Beta, "beta", 2, 1},
    {Family::ChiSquared, "chisq", 1, 1},
    {Family::ParetoI, "pareto1", 1, 1},
    {Family::ParetoII, "pareto2", 1, 1},
    {Family::Weibull, "weibull", 1, 1},
    {Family::Uniform, "uniform", 0, 1},
    {Family::CompositeLognormalFrechet, "lnfrechet", 4, 1},
}};

inline const FamilyInfo& info(Family f) {
  for (const auto& i : kFamilies) {
    if (i.family == f) return i;
  }
  throw domain_error("unknown family");
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw domain_error("cannot format number");
  return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw domain_error("cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace detail

class ParametricModel {
 public:
  // Standard lognormal (sigma = 1) by default, matching the usual catalog.
  ParametricModel() : ParametricModel(Family::Lognormal, {}) {}

  ParametricModel(Family family, std::vector<double> params)
      : family_(family), params_(std::move(params)) {
    resolve();
  }

  static ParametricModel exponential() { return {Family::Exponential, {}}; }
  static ParametricModel normal(double mu = 0.0, double sigma = 1.0) {
    return {Family::Normal, {mu, sigma}};
  }
  static ParametricModel lognormal(double sigma = 1.0) { return {Family::Lognormal, {sigma}}; }
  static ParametricModel beta(double a, double b) { return {Family::Beta, {a, b}}; }
  static ParametricModel chi_squared(double nu) { return {Family::ChiSquared, {nu}}; }
  static ParametricModel pareto1(double a) { return {Family::ParetoI, {a}}; }
  static ParametricModel pareto2(double a) { return {Family::ParetoII, {a}}; }
  static ParametricModel weibull(double shape) { return {Family::Weibull, {shape}}; }
  static ParametricModel uniform(double upper = 1.0) { return {Family::Uniform, {upper}}; }
  // Log-scale parameters in the order (sigma, threshold, frechet scale, frechet shape).
  static ParametricModel lognormal_frechet(double log_sigma = -1.72, double log_theta = 0.12,
                                           double log_lambda = -0.29, double log_alpha = 0.41) {
    return {Family::CompositeLognormalFrechet, {log_sigma, log_theta, log_lambda, log_alpha}};
  }

  // "family[:p1,p2,...]", e.g. "weibull:2" or "lnfrechet:-1.72,0.12,-0.29,0.41".
  static ParametricModel parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    const detail::FamilyInfo* found = nullptr;
    for (const auto& i : detail::kFamilies) {
      if (i.name == name) found = &i;
    }
    if (found == nullptr) throw domain_error("unknown distribution family '" + std::string(name) + "'");
    std::vector<double> params;
    if (colon != std::string_view::npos) {
      std::string_view rest = text.substr(colon + 1);
      if (rest.empty()) throw domain_error("empty parameter list in '" + std::string(text) + "'");
      while (true) {
        const auto comma = rest.find(',');
        params.push_back(detail::parse_double(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
    return {found->family, std::move(params)};
  }

  std::string to_string() const {
    std::string out(detail::info(family_).name);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      out += (i == 0) ? ':' : ',';
      out += detail::format_double(params_[i]);
    }
    return out;
  }

  Family family() const noexcept { return family_; }
  const std::vector<double>& params() const noexcept { return params_; }
  double scale() const noexcept { return scale_; }

  // Same model with every income multiplied by c > 0.
  ParametricModel scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw domain_error("scaled: factor must be positive");
    std::vector<double> p = params_;
    const auto& fi = detail::info(family_);
    if (family_ == Family::Normal) {
      p.resize(2);
      p[0] = mu_ * c;
      p[1] = sigma_ * c;
    } else if (family_ == Family::Uniform) {
      p.resize(1);
      p[0] = scale_ * c;
    } else {
      const std::size_t n_shape = fi.required + fi.optional - 1;
      // Fill defaulted shape slots explicitly before the scale slot.
      if (p.size() < n_shape) {
        if (family_ == Family::Lognormal) p.resize(1, 1.0);
      }
      p.resize(n_shape + 1, 1.0);
      p[n_shape] = scale_ * c;
    }
    return {family_, std::move(p)};
  }

  bool positive_support() const noexcept { return family_ != Family::Normal; }
  double support_lower() const noexcept {
    if (family_ == Family::Normal) return -std::numeric_limits<double>::infinity();
    if (family_ == Family::ParetoI) return scale_;
    return 0.0;
  }
  double support_upper() const noexcept {
    if (family_ == Family::Beta || family_ == Family::Uniform) return scale_;
    return std::numeric_limits<double>::infinity();
  }
  bool finite_mean() const noexcept {
    switch (family_) {
      case Family::ParetoI:
      case Family::ParetoII:
        return shape_a_ > 1.0;
      case Family::CompositeLognormalFrechet:
        return alpha_ > 1.0;
      default:
        return true;
    }
  }
  // Families with closed-form score functions J(p) and K(p).
  bool has_closed_form_scores() const noexcept {
    switch (family_) {
      case Family::Beta:
      case Family::ChiSquared:
      case Family::CompositeLognormalFrechet:
        return false;
      default:
        return true;
    }
  }

  friend bool operator==(const ParametricModel& a, const ParametricModel& b) {
    return a.family_ == b.family_ && a.params_ == b.params_;
  }

  // Standardized (scale 1) evaluations; x0 = x / scale.
  double std_quantile(double p) const;
  double std_upper_quantile(double s) const;
  double std_quantile_density(double p) const;
  double std_pdf(double x0) const;
  double std_cdf(double x0) const;
  double std_survival(double x0) const;
  double std_score_J(double x0) const;

 private:
  void resolve();
  double param_or(std::size_t i, double fallback) const {
    return i < params_.size() ? params_[i] : fallback;
  }

  Family family_;
  std::vector<double> params_;

  double scale_ = 1.0;
  double shape_a_ = 1.0;  // beta a, pareto a, weibull shape, chi-square nu
  double shape_b_ = 1.0;  // beta b
  double mu_ = 0.0;       // normal location
  double sigma_ = 1.0;    // normal / lognormal / composite body sigma
  // Composite lognormal body below theta_, Frechet tail above.
  double theta_ = 1.0, lambda_ = 1.0, alpha_ = 1.0;
  double body_mu_ = 0.0, weight_c_ = 1.0, weight_phi_ = 1.0;
  double p_theta_ = 0.5, frechet_cdf_theta_ = 0.0;
};

inline void ParametricModel::resolve() {
  const auto& fi = detail::info(family_);
  if (params_.size() < fi.required || params_.size() > fi.required + fi.optional) {
    throw domain_error("wrong number of parameters for '" + std::string(fi.name) + "'");
  }
  for (double v : params_) {
    if (!std::isfinite(v)) throw domain_error("parameters must be finite");
  }
  auto positive = [&](double v, const char* what) {
    if (!(v > 0.0)) throw domain_error(std::string(fi.name) + ": " + what + " must be positive");
    return v;
  };
  switch (family_) {
    case Family::Exponential:
      scale_ = positive(param_or(0, 1.0), "scale");
      break;
    case Family::Normal:
      mu_ = param_or(0, 0.0);
      sigma_ = positive(param_or(1, 1.0), "sigma");
      break;
    case Family::Lognormal:
      sigma_ = positive(param_or(0, 1.0), "sigma");
      scale_ = positive(param_or(1, 1.0), "scale");
      break;
    case Family::Beta:
      shape_a_ = positive(params_[0], "a");
      shape_b_ = positive(params_[1], "b");
      scale_ = positive(param_or(2, 1.0), "scale");
      break;
    case Family::ChiSquared:
    case Family::ParetoI:
    case Family::ParetoII:
    case Family::Weibull:
      shape_a_ = positive(params_[0], "shape");
      scale_ = positive(param_or(1, 1.0), "scale");
      break;
    case Family::Uniform:
      scale_ = positive(param_or(0, 1.0), "upper bound");
      break;
    case Family::CompositeLognormalFrechet: {
      sigma_ = std::exp(params_[0]);
      theta_ = std::exp(params_[1]);
      lambda_ = std::exp(params_[2]);
      alpha_ = std::exp(params_[3]);
      scale_ = positive(param_or(4, 1.0), "scale");
      // Differentiability of the log density at theta fixes the body location.
      const double ratio_pow = std::pow(lambda_ / theta_, alpha_);
      body_mu_ = std::log(theta_) - sigma_ * sigma_ * alpha_ * (1.0 - ratio_pow);
      const double z = (std::log(theta_) - body_mu_) / sigma_;
      const double body_pdf = special::normal_pdf(z) / (sigma_ * theta_);
      const double body_cdf = special::normal_cdf(z);
      const double tail_pdf = alpha_ / theta_ * ratio_pow * std::exp(-ratio_pow);
      frechet_cdf_theta_ = std::exp(-ratio_pow);
      // Continuity of the density at theta fixes the tail weight.
      weight_phi_ = body_pdf / tail_pdf;
      weight_c_ = 1.0 / (body_cdf + weight_phi_ * (1.0 - frechet_cdf_theta_));
      p_theta_ = weight_c_ * body_cdf;
      break;
    }
  }
}

inline double ParametricModel::std_quantile(double p) const {
  switch (family_) {
    case Family::Exponential:
      return -std::log1p(-p);
    case Family::Normal:
      return mu_ + sigma_ * special::normal_quantile(p);
    case Family::Lognormal:
      return std::exp(sigma_ * special::normal_quantile(p));
    case Family::Beta:
      return special::incomplete_beta_inv(shape_a_, shape_b_, p);
    case Family::ChiSquared:
      return 2.0 * special::gamma_p_inv(0.5 * shape_a_, p);
    case Family::ParetoI:
      return std::exp(-std::log1p(-p) / shape_a_);
    case Family::ParetoII:
      return std::expm1(-std::log1p(-p) / shape_a_);
    case Family::Weibull:
      return std::pow(-std::log1p(-p), 1.0 / shape_a_);
    case Family::Uniform:
      return p;
    case Family::CompositeLognormalFrechet:
      if (p <= p_theta_) return std::exp(body_mu_ + sigma_ * special::normal_quantile(p / weight_c_));
      return std_upper_quantile(1.0 - p);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double ParametricModel::std_upper_quantile(double s) const {
  switch (family_) {
    case Family::Exponential:
      return -std::log(s);
    case Family::Normal:
      return mu_ - sigma_ * special::normal_quantile(s);
    case Family::Lognormal:
      return std::exp(-sigma_ * special::normal_quantile(s));
    case Family::Beta:
      return special::incomplete_beta_inv_upper(shape_a_, shape_b_, s);
    case Family::ChiSquared:
      return 2.0 * special::gamma_q_inv(0.5 * shape_a_, s);
    case Family::ParetoI:
      return std::exp(-std::log(s) / shape_a_);
    case Family::ParetoII:
      return std::expm1(-std::log(s) / shape_a_);
    case Family::Weibull:
      return std::pow(-std::log(s), 1.0 / shape_a_);
    case Family::Uniform:
      return 1.0 - s;
    case Family::CompositeLognormalFrechet:
      if (s < 1.0 - p_theta_) {
        const double v = -std::log1p(-s / (weight_c_ * weight_phi_));
        return lambda_ * std::pow(v, -1.0 / alpha_);
      }
      return std_quantile(1.0 - s);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double ParametricModel::std_pdf(double x) const {
  switch (family_) {
    case Family::Exponential:
      return x < 0.0 ? 0.0 : std::exp(-x);
    case Family::Normal:
      return special::normal_pdf((x - mu_) / sigma_) / sigma_;
    case Family::Lognormal:
      return x <= 0.0 ? 0.0 : special::normal_pdf(std::log(x) / sigma_) / (sigma_ * x);
    case Family::Beta:
      return special::beta_pdf(shape_a_, shape_b_, x);
    case Family::ChiSquared:
      return 0.5 * special::gamma_pdf(0.5 * shape_a_, 0.5 * x);
    case Family::ParetoI:
      return x < 1.0 ? 0.0 : shape_a_ * std::pow(x, -shape_a_ - 1.0);
    case Family::ParetoII:
      return x < 0.0 ? 0.0 : shape_a_ * std::pow(1.0 + x, -shape_a_ - 1.0);
    case Family::Weibull:
      return x <= 0.0 ? 0.0
                      : shape_a_ * std::pow(x, shape_a_ - 1.0) * std::exp(-std::pow(x, shape_a_));
    case Family::Uniform:
      return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
    case Family::CompositeLognormalFrechet: {
      if (x <= 0.0) return 0.0;
      if (x <= theta_) {
        return weight_c_ * special::normal_pdf((std::log(x) - body_mu_) / sigma_) / (sigma_ * x);
      }
      const double r = std::pow(lambda_ / x, alpha_);
      return weight_c_ * weight_phi_ * alpha_ / x * r * std::exp(-r);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double ParametricModel::std_survival(double x) const {
  switch (family_) {
    case Family::Exponential:
      return x <= 0.0 ? 1.0 : std::exp(-x);
    case Family::Normal:
      return special::normal_sf((x - mu_) / sigma_);
    case Family::Lognormal:
      return x <= 0.0 ? 1.0 : special::normal_sf(std::log(x) / sigma_);
    case Family::Beta:
      return special::incomplete_beta_pair(shape_a_, shape_b_, x).second;
    case Family::ChiSquared:
      return special::gamma_q(0.5 * shape_a_, 0.5 * x);
    case Family::ParetoI:
      return x <= 1.0 ? 1.0 : std::pow(x, -shape_a_);
    case Family::ParetoII:
      return x <= 0.0 ? 1.0 : std::pow(1.0 + x, -shape_a_);
    case Family::Weibull:
      return x <= 0.0 ? 1.0 : std::exp(-std::pow(x, shape_a_));
    case Family::Uniform:
      return x <= 0.0 ? 1.0 : (x >= 1.0 ? 0.0 : 1.0 - x);
    case Family::CompositeLognormalFrechet:
      if (x <= 0.0) return 1.0;
      if (x <= theta_) return 1.0 - weight_c_ * special::normal_cdf((std::log(x) - body_mu_) / sigma_);
      return -weight_c_ * weight_phi_ * std::expm1(-std::pow(lambda_ / x, alpha_));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double ParametricModel::std_cdf(double x) const {
  switch (family_) {
    case Family::Normal:
      return special::normal_cdf((x - mu_) / sigma_);
    case Family::Lognormal:
      return x <= 0.0 ? 0.0 : special::normal_cdf(std::log(x) / sigma_);
    case Family::Beta:
      return special::incomplete_beta(shape_a_, shape_b_, x);
    case Family::ChiSquared:
      return special::gamma_p(0.5 * shape_a_, 0.5 * x);
    case Family::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-x);
    case Family::CompositeLognormalFrechet:
      if (x <= 0.0) return 0.0;
      if (x <= theta_) return weight_c_ * special::normal_cdf((std::log(x) - body_mu_) / sigma_);
      return 1.0 - std_survival(x);
    default:
      return 1.0 - std_survival(x);
  }
}

inline double ParametricModel::std_quantile_density(double p) const {
  switch (family_) {
    case Family::Exponential:
      return 1.0 / (1.0 - p);
    case Family::Normal: {
      const double z = special::normal_quantile(p);
      return sigma_ / special::normal_pdf(z);
    }
    case Family::Lognormal: {
      const double z = special::normal_quantile(p);
      return sigma_ * std::exp(sigma_ * z) / special::normal_pdf(z);
    }
    case Family::ParetoI:
    case Family::ParetoII:
      return std::exp(-(1.0 / shape_a_ + 1.0) * std::log1p(-p)) / shape_a_;
    case Family::Weibull: {
      const double l = -std::log1p(-p);
      return std::pow(l, 1.0 / shape_a_ - 1.0) / ((1.0 - p) * shape_a_);
    }
    case Family::Uniform:
      return 1.0;
    case Family::Beta: {
      // Work with both x and 1 - x so that the top half keeps its precision:
      // 1 - X is Beta(b, a).
      double x, y;
      if (p <= 0.5) {
        x = special::incomplete_beta_inv(shape_a_, shape_b_, p);
        y = 1.0 - x;
      } else {
        y = special::incomplete_beta_inv(shape_b_, shape_a_, 1.0 - p);
        x = 1.0 - y;
      }
      return std::exp(special::log_beta(shape_a_, shape_b_) + (1.0 - shape_a_) * std::log(x) +
                      (1.0 - shape_b_) * std::log(y));
    }
    default:
      return 1.0 / std_pdf(std_quantile(p));
  }
}

// J(p) = -f'(x)/f(x) at x = x0 on the standardized scale.
inline double ParametricModel::std_score_J(double x) const {
  switch (family_) {
    case Family::Exponential:
      return 1.0;
    case Family::Normal:
      return (x - mu_) / (sigma_ * sigma_);
    case Family::Lognormal:
      return (1.0 + std::log(x) / (sigma_ * sigma_)) / x;
    case Family::ParetoI:
      return (shape_a_ + 1.0) / x;
    case Family::ParetoII:
      return (shape_a_ + 1.0) / (1.0 + x);
    case Family::Weibull:
      return (1.0 - shape_a_ + shape_a_ * std::pow(x, shape_a_)) / x;
    case Family::Uniform:
      return 0.0;
    default:
      throw unsupported_operation("score functions are not tabulated for '" +
                                  std::string(detail::info(family_).name) + "'");
  }
}

namespace detail {

inline void require_probability(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error(std::string(who) + ": p must lie in (0,1)");
}

}  // namespace detail

inline double quantile(const ParametricModel& m, double p) {
  detail::require_probability(p, "quantile");
  if (m.family() == Family::Normal) return m.std_quantile(p);
  return m.scale() * m.std_quantile(p);
}

// Q(1 - s), accurate when s is small.
inline double upper_quantile(const ParametricModel& m, double s) {
  detail::require_probability(s, "upper_quantile");
  if (m.family() == Family::Normal) return m.std_upper_quantile(s);
  return m.scale() * m.std_upper_quantile(s);
}

inline double quantile_density(const ParametricModel& m, double p) {
  detail::require_probability(p, "quantile_density");
  if (m.family() == Family::Normal) return m.std_quantile_density(p);
  return m.scale() * m.std_quantile_density(p);
}

inline double density(const ParametricModel& m, double x) {
  if (m.family() == Family::Normal) return m.std_pdf(x);
  return m.std_pdf(x / m.scale()) / m.scale();
}

inline double cdf(const ParametricModel& m, double x) {
  if (m.family() == Family::Normal) return m.std_cdf(x);
  return m.std_cdf(x / m.scale());
}

inline double survival(const ParametricModel& m, double x) {
  if (m.family() == Family::Normal) return m.std_survival(x);
  return m.std_survival(x / m.scale());
}

inline double score_J(const ParametricModel& m, double p) {
  detail::require_probability(p, "score_J");
  if (!m.has_closed_form_scores()) {
    (void)m.std_score_J(0.0);  // throws unsupported_operation
  }
  if (m.family() == Family::Normal) return m.std_score_J(m.std_quantile(p));
  return m.std_score_J(m.std_quantile(p)) / m.scale();
}

// K(p) = -1 + Q(p) J(p); free of the scale parameter.
inline double score_K(const ParametricModel& m, double p) {
  detail::require_probability(p, "score_K");
  const double x0 = m.std_quantile(p);
  return -1.0 + x0 * m.std_score_J(x0);
}

inline SortedSample sample(const ParametricModel& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw domain_error("sample: n must be >= 1");
  Engine engine = make_engine(seed);
  std::vector<double> values(n);
  for (double& v : values) v = quantile(m, uniform_open(engine));
  return SortedSample(std::move(values));
}

inline double true_R(const ParametricModel& m, double p) {
  detail::require_probability(p, "true_R");
  const double lower = quantile(m, 0.5 * p);
  if (!(lower > 0.0)) throw domain_error("true_R: Q(p/2) is not positive for this model");
  return lower / upper_quantile(m, 0.5 * p);
}

// I = 1 - int_0^1 R(p) dp, with R(0) = 0 and R(1) = 1.
inline double true_I(const ParametricModel& m, const QuadratureSpec& quad = {}) {
  if (!m.positive_support()) throw domain_error("true_I: the model's support is not positive");
  auto r = [&](double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return true_R(m, p);
  };
  const QuadratureResult res = integrate(r, 0.0, 1.0, quad);
  if (!res.converged) throw numeric_error("true_I: quadrature did not converge", res.error_estimate);
  return 1.0 - res.value;
}

// Midpoint-grid approximation I^(J) = (1/J) sum_j (1 - R(p_j)), p_j = (j - 1/2)/J.
inline double true_I_grid(const ParametricModel& m, int J) {
  if (J < 1) throw domain_error("true_I_grid: J must be >= 1");
  double total = 0.0;
  for (int j = 1; j <= J; ++j) total += 1.0 - true_R(m, (j - 0.5) / J);
  return total / J;
}

struct GiniTruth {
  double value = 0.0;
  double error_estimate = 0.0;
  bool undefined_mean = false;
};

// G = 1 - (1/E X) int_0^inf S(x)^2 dx with E X = int_0^inf S(x) dx. Unbounded
// supports are covered by doubling segments; for models without a finite mean
// the integrals are truncated at x = 1e300 and the result is flagged.
inline GiniTruth true_G(const ParametricModel& m, const QuadratureSpec& quad = {}) {
  if (!m.positive_support()) throw domain_error("true_G: the model's support is not positive");
  quad.validate();
  const double lower = m.support_lower();
  const double upper = m.support_upper();
  auto s1 = [&](double x) { return survival(m, x); };
  auto s2 = [&](double x) {
    const double s = survival(m, x);
    return s * s;
  };

  double a1 = lower;
  double a2 = lower;
  double err = 0.0;
  const bool finite_mean = m.finite_mean();

  auto segment = [&](double lo, double hi, double tol) {
    QuadratureSpec seg = quad;
    seg.tolerance = tol;
    const auto r1 = integrate(s1, lo, hi, seg);
    const auto r2 = integrate(s2, lo, hi, seg);
    if (finite_mean && !(r1.converged && r2.converged)) {
      throw numeric_error("true_G: quadrature did not converge",
                          r1.error_estimate + r2.error_estimate);
    }
    err += r1.error_estimate + r2.error_estimate;
    return std::pair{r1.value, r2.value};
  };

  if (std::isfinite(upper)) {
    const auto [v1, v2] = segment(lower, upper, quad.tolerance * (upper - lower));
    a1 += v1;
    a2 += v2;
  } else {
    double width = quantile(m, 0.5) - lower;
    if (!(width > 0.0)) width = m.scale();
    const double tol = quad.tolerance * width / 64.0;
    constexpr double kTruncation = 1e300;
    double lo = lower;
    double hi = lower + width;
    bool done = false;
    for (int k = 0; !done; ++k) {
      const auto [v1, v2] = segment(lo, hi, tol);
      a1 += v1;
      a2 += v2;
      if (k >= 8 && v1 < 1e-14 * a1) break;
      lo = hi;
      hi = lower + width * std::ldexp(1.0, k + 1);
      if (hi > kTruncation) {
        if (finite_mean) throw numeric_error("true_G: tail integral did not converge", v1);
        done = true;
      }
    }
  }
  return {1.0 - a2 / a1, err / a1, !finite_mean};
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t draws = 0;
};

// E[X/Y] with X = Q(U), Y = Q(1-U), U uniform on (0, 1/2); equals 1 - I.
inline MonteCarloEstimate mc_ratio_expectation(const ParametricModel& m, std::size_t draws,
                                               std::uint64_t seed) {
  if (draws == 0) throw domain_error("mc_ratio_expectation: draws must be >= 1");
  if (!m.positive_support()) throw domain_error("mc_ratio_expectation: support is not positive");
  Engine engine = make_engine(seed);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double u = 0.5 * uniform_open(engine);
    const double ratio = quantile(m, u) / upper_quantile(m, u);
    const double delta = ratio - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (ratio - mean);
  }
  const double var = draws > 1 ? m2 / static_cast<double>(draws - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(draws)), draws};
}

}  // namespace qineq
