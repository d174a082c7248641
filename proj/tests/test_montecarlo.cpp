#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "qineq/montecarlo.hpp"

using namespace qineq;

namespace {

SimStudySpec base_spec(StudyKind kind, const char* model, std::size_t n, int reps) {
  SimStudySpec s;
  s.kind = kind;
  s.model = ParametricModel::parse(model);
  s.n = n;
  s.reps = reps;
  s.master_seed = 2024;
  s.keep_per_rep = true;
  return s;
}

// Draws for replication r, regenerated from the documented seeding scheme.
std::vector<double> raw_draws(const ParametricModel& m, std::size_t n, std::uint64_t master, std::uint64_t r) {
  Engine e = make_engine(derive_seed(master, r));
  std::vector<double> out(n);
  for (auto& v : out) v = quantile(m, uniform_open(e));
  return out;
}

void expect_same_records(const std::vector<RepRecord>& a, const std::vector<RepRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].estimate_I, b[i].estimate_I) << i;
    EXPECT_EQ(a[i].estimate_G, b[i].estimate_G) << i;
    EXPECT_EQ(a[i].covered, b[i].covered) << i;
    EXPECT_EQ(a[i].width, b[i].width) << i;
  }
}

}  // namespace

TEST(Study, ResultsIndependentOfThreadCount) {
  auto spec = base_spec(StudyKind::Coverage, "lognormal", 200, 64);
  spec.threads = 1;
  const auto one = run_study(spec);
  for (int t : {2, 3, 8}) {
    spec.threads = t;
    const auto many = run_study(spec);
    expect_same_records(one.per_rep, many.per_rep);
    EXPECT_EQ(one.coverage, many.coverage);
    EXPECT_EQ(one.mean_width, many.mean_width);
    EXPECT_EQ(one.bias_I, many.bias_I);
  }
}

TEST(Study, ReplicationMatchesIndependentRecomputation) {
  auto spec = base_spec(StudyKind::Coverage, "weibull:2", 150, 10);
  const auto res = run_study(spec);
  for (std::uint64_t r : {0u, 4u, 9u}) {
    const SortedSample s(raw_draws(*spec.model, spec.n, spec.master_seed, r));
    EXPECT_EQ(s, sample(*spec.model, spec.n, derive_seed(spec.master_seed, r)));
    const auto ci = ci_I(s);
    EXPECT_EQ(res.per_rep[r].estimate_I, ci.point);
    EXPECT_EQ(res.per_rep[r].width, ci.width());
    EXPECT_EQ(res.per_rep[r].covered, ci.covers(true_I(*spec.model)));
    EXPECT_EQ(res.per_rep[r].estimate_G, gini_hat(s));
  }
}

TEST(Study, SummariesAgreeWithPerRepRecords) {
  auto spec = base_spec(StudyKind::Coverage, "exponential", 100, 50);
  spec.measure = Measure::G;
  const auto res = run_study(spec);
  double cov = 0, width = 0, mean_g = 0;
  for (const auto& r : res.per_rep) {
    cov += r.covered;
    width += r.width;
    mean_g += r.estimate_G;
  }
  EXPECT_NEAR(res.coverage, cov / 50, 1e-15);
  EXPECT_NEAR(res.mean_width, width / 50, 1e-15);
  EXPECT_NEAR(res.bias_G, mean_g / 50 - 0.5, 1e-8);
  EXPECT_NEAR(res.truth_G, 0.5, 1e-8);
  EXPECT_NEAR(res.mc_standard_error, std::sqrt(res.coverage * (1 - res.coverage) / 50), 1e-15);
}

TEST(Study, CoverageNearNominalForWeibull) {
  auto spec = base_spec(StudyKind::Coverage, "weibull:2", 500, 400);
  spec.keep_per_rep = false;
  const auto res = coverage_study(spec);
  EXPECT_NEAR(res.coverage, 0.95, 0.04);
  EXPECT_TRUE(res.per_rep.empty());
}

TEST(Study, InfiniteMeanTruthIsFlagged) {
  auto spec = base_spec(StudyKind::Coverage, "pareto2:1", 50, 5);
  spec.measure = Measure::G;
  EXPECT_TRUE(run_study(spec).truth_G_undefined_mean);
}

TEST(Study, TruthOverrides) {
  auto spec = base_spec(StudyKind::Bias, "lognormal", 50, 5);
  spec.truth_I = 0.5;
  spec.truth_G = 0.25;
  const auto res = bias_study(spec);
  EXPECT_EQ(res.truth_I, 0.5);
  EXPECT_EQ(res.truth_G, 0.25);
}

// ---- contamination ------------------------------------------------------------------------

TEST(Contamination, ZeroCountEqualsBiasStudy) {
  auto bias = base_spec(StudyKind::Bias, "lnfrechet:-1.72,0.12,-0.29,0.41", 200, 40);
  auto cont = bias;
  cont.kind = StudyKind::Contamination;
  cont.contamination = ContaminationSpec{0.999, std::nullopt, 0};
  const auto a = bias_study(bias);
  const auto b = contamination_study(cont);
  expect_same_records(a.per_rep, b.per_rep);
  EXPECT_EQ(a.bias_I, b.bias_I);
  EXPECT_EQ(a.median_abs_error_G, b.median_abs_error_G);
}

TEST(Contamination, ReplacesFirstDrawsWithOutlier) {
  auto spec = base_spec(StudyKind::Contamination, "lognormal", 120, 6);
  spec.contamination = ContaminationSpec{0.999, std::nullopt, 2};
  const auto res = contamination_study(spec);
  const double outlier = quantile(*spec.model, 0.999);
  EXPECT_EQ(res.contamination_value, outlier);
  for (std::uint64_t r = 0; r < 6; ++r) {
    auto raw = raw_draws(*spec.model, spec.n, spec.master_seed, r);
    raw[0] = raw[1] = outlier;
    const SortedSample s(raw);
    EXPECT_EQ(res.per_rep[r].estimate_I, i_hat(s));
    EXPECT_EQ(res.per_rep[r].estimate_G, gini_hat(s));
  }
}

TEST(Contamination, ExplicitValueAndDefaultSpec) {
  auto spec = base_spec(StudyKind::Contamination, "exponential", 50, 3);
  spec.contamination = ContaminationSpec{0.5, 1000.0, 1};
  EXPECT_EQ(contamination_study(spec).contamination_value, 1000.0);
  spec.contamination.reset();
  EXPECT_NEAR(contamination_study(spec).contamination_value, -std::log(0.001), 1e-12);
}

TEST(Contamination, RatioIndexMovesLessThanGini) {
  auto clean = base_spec(StudyKind::Bias, "lnfrechet:-1.72,0.12,-0.29,0.41", 200, 300);
  auto dirty = clean;
  dirty.kind = StudyKind::Contamination;
  dirty.contamination = ContaminationSpec{};
  const auto a = run_study(clean);
  const auto b = run_study(dirty);
  EXPECT_LT(std::fabs(b.median_I - a.median_I), std::fabs(b.median_G - a.median_G));
}

// ---- empirical populations -------------------------------------------------------------------

TEST(Population, SubsamplesWithoutReplacement) {
  std::vector<double> pop;
  for (int i = 1; i <= 40; ++i) pop.push_back(i);
  SimStudySpec spec;
  spec.kind = StudyKind::Bias;
  spec.population = SortedSample(pop);
  spec.n = 40;
  spec.reps = 5;
  spec.keep_per_rep = true;
  const auto res = run_study(spec);
  // n equal to the population size draws every unit exactly once.
  for (const auto& r : res.per_rep) {
    EXPECT_EQ(r.estimate_I, i_hat(SortedSample(pop)));
    EXPECT_EQ(r.estimate_G, gini_hat(SortedSample(pop)));
  }
  EXPECT_EQ(res.truth_I, i_hat(SortedSample(pop)));
  EXPECT_EQ(res.truth_G, gini_hat(SortedSample(pop)));
  EXPECT_NEAR(res.bias_I, 0.0, 1e-15);
  EXPECT_EQ(res.se_I, 0.0);
}

TEST(Population, DistinctUnitsInEachDraw) {
  std::vector<double> pop;
  for (int i = 1; i <= 1000; ++i) pop.push_back(i);
  SimStudySpec spec;
  spec.population = SortedSample(pop);
  spec.n = 300;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = detail::draw_raw(spec, seed);
    EXPECT_EQ(std::set<double>(d.begin(), d.end()).size(), 300u);
  }
}

TEST(Population, ConstantPopulationHasNoBiasOrSpread) {
  SimStudySpec spec;
  spec.kind = StudyKind::Bias;
  spec.population = SortedSample(std::vector<double>(100, 7.0));
  spec.n = 30;
  spec.reps = 20;
  const auto res = run_study(spec);
  EXPECT_EQ(res.bias_I, 0.0);
  EXPECT_EQ(res.se_I, 0.0);
  EXPECT_EQ(res.bias_G, 0.0);
  EXPECT_EQ(res.se_G, 0.0);
}

// ---- validation --------------------------------------------------------------------------

TEST(Validation, RejectsBadSpecs) {
  auto ok = base_spec(StudyKind::Coverage, "lognormal", 50, 5);
  EXPECT_NO_THROW(ok.validate());

  auto both = ok;
  both.population = SortedSample({1, 2, 3, 4});
  EXPECT_THROW(run_study(both), domain_error);

  auto none = ok;
  none.model.reset();
  EXPECT_THROW(run_study(none), domain_error);

  auto tiny = ok;
  tiny.n = 2;
  EXPECT_THROW(run_study(tiny), domain_error);

  auto noreps = ok;
  noreps.reps = 0;
  EXPECT_THROW(run_study(noreps), domain_error);

  auto flood = ok;
  flood.kind = StudyKind::Contamination;
  flood.contamination = ContaminationSpec{0.999, std::nullopt, 50};
  EXPECT_THROW(run_study(flood), domain_error);

  auto small_pop = ok;
  small_pop.model.reset();
  small_pop.population = SortedSample({1, 2, 3, 4});
  EXPECT_THROW(run_study(small_pop), domain_error);
}

TEST(Validation, WrappersCheckKind) {
  auto spec = base_spec(StudyKind::Bias, "lognormal", 50, 5);
  EXPECT_THROW(coverage_study(spec), domain_error);
  EXPECT_THROW(contamination_study(spec), domain_error);
  spec.kind = StudyKind::Coverage;
  EXPECT_THROW(bias_study(spec), domain_error);
}

TEST(Validation, WorkerErrorsPropagate) {
  auto spec = base_spec(StudyKind::Coverage, "normal", 50, 20);
  spec.truth_I = 0.5;
  spec.truth_G = 0.5;
  spec.threads = 4;
  EXPECT_THROW(run_study(spec), domain_error);
}
