#pragma once

// Seeded simulation studies: interval coverage, bias/SD, and contamination.
// Replication r always uses derive_seed(master_seed, r) and writes into its own
// slot, so results do not depend on the number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "qineq/distributions.hpp"
#include "qineq/errors.hpp"
#include "qineq/inequality_measures.hpp"
#include "qineq/random.hpp"
#include "qineq/sample.hpp"

namespace qineq {

enum class StudyKind { Coverage, Bias, Contamination };

inline const char* to_string(StudyKind k) {
  switch (k) {
    case StudyKind::Coverage: return "coverage";
    case StudyKind::Bias: return "bias";
    case StudyKind::Contamination: return "contamination";
  }
  return "?";
}

struct ContaminationSpec {
  double quantile_level = 0.999;  // used unless `value` is set
  std::optional<double> value;
  int count = 1;
};

struct SimStudySpec {
  StudyKind kind = StudyKind::Coverage;
  // Exactly one source: a parametric model, or an empirical population that is
  // subsampled without replacement.
  std::optional<ParametricModel> model;
  std::optional<SortedSample> population;
  std::size_t n = 500;
  int reps = 1000;
  int J = kDefaultJ;
  double alpha = kDefaultAlpha;
  Measure measure = Measure::I;
  std::optional<ContaminationSpec> contamination;
  std::uint64_t master_seed = 1;
  std::optional<double> truth_I;  // overrides the computed truths
  std::optional<double> truth_G;
  bool keep_per_rep = false;
  int threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (model.has_value() == population.has_value()) {
      throw domain_error("SimStudySpec: give exactly one of model or population");
    }
    if (reps < 1) throw domain_error("SimStudySpec: reps must be >= 1");
    if (n < 3) throw domain_error("SimStudySpec: n must be >= 3");
    if (J < 2) throw domain_error("SimStudySpec: J must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("SimStudySpec: alpha must lie in (0,1)");
    if (population && population->size() < n) {
      throw domain_error("SimStudySpec: population is smaller than n");
    }
    if (threads < 0) throw domain_error("SimStudySpec: threads must be >= 0");
    if (contamination) {
      const auto& c = *contamination;
      if (c.count < 0 || static_cast<std::size_t>(c.count) >= n) {
        throw domain_error("SimStudySpec: contamination count must lie in [0, n)");
      }
      if (!c.value && !(c.quantile_level > 0.0 && c.quantile_level < 1.0)) {
        throw domain_error("SimStudySpec: contamination quantile level must lie in (0,1)");
      }
      if (c.value && !(*c.value > 0.0)) {
        throw domain_error("SimStudySpec: contamination value must be positive");
      }
    }
  }
};

struct RepRecord {
  double estimate_I = 0.0;
  double estimate_G = 0.0;
  bool covered = false;
  double width = 0.0;
};

struct SimStudyResult {
  StudyKind kind = StudyKind::Coverage;
  Measure measure = Measure::I;
  int reps = 0;
  double truth_I = 0.0;
  double truth_G = 0.0;
  bool truth_G_undefined_mean = false;
  double contamination_value = 0.0;  // 0 when no contamination
  double coverage = 0.0;
  double mean_width = 0.0;
  double mc_standard_error = 0.0;
  double bias_I = 0.0, bias_G = 0.0;
  double se_I = 0.0, se_G = 0.0;
  double median_I = 0.0, median_G = 0.0;
  double median_abs_error_I = 0.0, median_abs_error_G = 0.0;
  std::vector<RepRecord> per_rep;  // filled when keep_per_rep
};

namespace detail {

inline double median_of(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m)));
}

inline void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

// Runs body(r) for r in [0, reps) on `threads` workers; the first exception is
// rethrown after all workers stop.
template <typename Body>
void parallel_for(int reps, int threads, Body&& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, reps));
  if (workers == 1) {
    for (int r = 0; r < reps; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < reps && !failed; r = next++) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Raw draws in generation order; for a model this is the same stream that
// sample() sorts, so a study with no contamination sees identical samples.
inline std::vector<double> draw_raw(const SimStudySpec& spec, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::vector<double> out(spec.n);
  if (spec.model) {
    for (auto& v : out) v = quantile(*spec.model, uniform_open(eng));
    return out;
  }
  // Partial Fisher-Yates over population indices: sampling without replacement.
  const auto& pop = *spec.population;
  std::vector<std::size_t> idx(pop.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(eng, idx.size() - i));
    std::swap(idx[i], idx[j]);
    out[i] = pop[idx[i]];
  }
  return out;
}

}  // namespace detail

inline double contamination_value(const SimStudySpec& spec) {
  if (!spec.contamination) return 0.0;
  if (spec.contamination->value) return *spec.contamination->value;
  const double level = spec.contamination->quantile_level;
  return spec.model ? quantile(*spec.model, level) : hf8_quantile(*spec.population, level);
}

// Truths: quadrature values for a model, full-population estimates for an
// empirical source, unless overridden in the spec.
inline void resolve_truths(const SimStudySpec& spec, SimStudyResult& res) {
  if (spec.truth_I) {
    res.truth_I = *spec.truth_I;
  } else {
    res.truth_I = spec.model ? true_I(*spec.model) : i_hat(*spec.population, spec.J);
  }
  if (spec.truth_G) {
    res.truth_G = *spec.truth_G;
  } else if (spec.model) {
    const auto g = true_G(*spec.model);
    res.truth_G = g.value;
    res.truth_G_undefined_mean = g.undefined_mean;
  } else {
    res.truth_G = gini_hat(*spec.population);
  }
}

inline SimStudyResult run_study(const SimStudySpec& spec) {
  spec.validate();
  SimStudyResult res;
  res.kind = spec.kind;
  res.measure = spec.measure;
  res.reps = spec.reps;
  resolve_truths(spec, res);
  const bool contaminate = spec.kind == StudyKind::Contamination && spec.contamination;
  const double outlier = contaminate ? contamination_value(spec) : 0.0;
  const int n_out = contaminate ? spec.contamination->count : 0;
  res.contamination_value = outlier;

  std::vector<RepRecord> slots(static_cast<std::size_t>(spec.reps));
  detail::parallel_for(spec.reps, spec.threads, [&](int r) {
    auto raw = detail::draw_raw(spec, derive_seed(spec.master_seed, static_cast<std::uint64_t>(r)));
    for (int k = 0; k < n_out; ++k) raw[static_cast<std::size_t>(k)] = outlier;
    const SortedSample s(std::move(raw));
    RepRecord& rec = slots[static_cast<std::size_t>(r)];
    if (spec.kind == StudyKind::Coverage) {
      if (spec.measure == Measure::I) {
        const auto ci = ci_I(s, spec.J, spec.alpha);
        rec.estimate_I = ci.point;
        rec.estimate_G = gini_hat(s);
        rec.covered = ci.covers(res.truth_I);
        rec.width = ci.width();
      } else {
        const auto ci = ci_G(s, spec.alpha);
        rec.estimate_I = i_hat(s, spec.J);
        rec.estimate_G = ci.point;
        rec.covered = ci.covers(res.truth_G);
        rec.width = ci.width();
      }
    } else {
      rec.estimate_I = i_hat(s, spec.J);
      rec.estimate_G = gini_hat(s);
    }
  });

  std::vector<double> est_I(slots.size()), est_G(slots.size());
  std::vector<double> err_I(slots.size()), err_G(slots.size());
  double covered = 0.0;
  double width = 0.0;
  for (std::size_t r = 0; r < slots.size(); ++r) {
    est_I[r] = slots[r].estimate_I;
    est_G[r] = slots[r].estimate_G;
    err_I[r] = std::fabs(est_I[r] - res.truth_I);
    err_G[r] = std::fabs(est_G[r] - res.truth_G);
    covered += slots[r].covered ? 1.0 : 0.0;
    width += slots[r].width;
  }
  double mean_I = 0.0, mean_G = 0.0;
  detail::mean_sd(est_I, mean_I, res.se_I);
  detail::mean_sd(est_G, mean_G, res.se_G);
  res.bias_I = mean_I - res.truth_I;
  res.bias_G = mean_G - res.truth_G;
  res.median_I = detail::median_of(est_I);
  res.median_G = detail::median_of(est_G);
  res.median_abs_error_I = detail::median_of(err_I);
  res.median_abs_error_G = detail::median_of(err_G);
  const double reps = spec.reps;
  if (spec.kind == StudyKind::Coverage) {
    res.coverage = covered / reps;
    res.mean_width = width / reps;
    res.mc_standard_error = std::sqrt(res.coverage * (1.0 - res.coverage) / reps);
  } else {
    const double se = spec.measure == Measure::I ? res.se_I : res.se_G;
    res.mc_standard_error = se / std::sqrt(reps);
  }
  if (spec.keep_per_rep) res.per_rep = std::move(slots);
  return res;
}

inline SimStudyResult coverage_study(SimStudySpec spec) {
  if (spec.kind != StudyKind::Coverage) throw domain_error("coverage_study: spec kind must be coverage");
  return run_study(spec);
}

inline SimStudyResult bias_study(SimStudySpec spec) {
  if (spec.kind != StudyKind::Bias) throw domain_error("bias_study: spec kind must be bias");
  return run_study(spec);
}

inline SimStudyResult contamination_study(SimStudySpec spec) {
  if (spec.kind != StudyKind::Contamination) {
    throw domain_error("contamination_study: spec kind must be contamination");
  }
  if (!spec.contamination) spec.contamination = ContaminationSpec{};
  return run_study(spec);
}

}  // namespace qineq
