// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (0 when everything passes).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qineq/qineq.hpp"

using namespace qineq;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail, double seconds) {
  std::printf("%s  %2d  %-28s %s  [%.1fs]\n", ok ? "PASS" : "FAIL", id, title, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class F>
void criterion(int id, const char* title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, title, ok, detail.str(), secs);
}

struct Row {
  const char* model;
  double G;  // NaN where the mean is infinite
  double I;
};

const std::vector<Row> kReference = {
    {"lognormal", 0.5205, 0.6638},      {"beta:0.1,0.1", 0.4889, 0.9149}, {"beta:0.5,0.5", 0.4053, 0.7268},
    {"beta:1,1", 0.3333, 0.6137},       {"beta:10,10", 0.1238, 0.2804},   {"chisq:1", 0.6366, 0.8010},
    {"chisq:4", 0.3750, 0.5946},        {"chisq:25", 0.1580, 0.3326},     {"pareto2:1", NAN, 0.7726},
    {"pareto2:2", 0.6667, 0.7397},      {"pareto2:100", 0.5025, 0.7024},  {"weibull:0.5", 0.7500, 0.8348},
    {"weibull:1", 0.5000, 0.7016},      {"weibull:2", 0.2929, 0.5229},    {"weibull:10", 0.0670, 0.1665},
};
const char* const kComposite = "lnfrechet:-1.72,0.12,-0.29,0.41";
constexpr double kCompositeI = 0.5431, kCompositeG = 0.5338;

double sd(const std::vector<double>& v) {
  double m = 0, ss = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

int main() {
  criterion(1, "Population index values", [](std::ostream& d) {
    constexpr double tol = 5e-4, tol_composite = 5e-3;
    double worst_I = 0, worst_G = 0;
    std::string bad;
    for (const auto& r : kReference) {
      const auto m = ParametricModel::parse(r.model);
      const double ei = std::fabs(true_I(m) - r.I);
      worst_I = std::max(worst_I, ei);
      if (ei > tol) bad += std::string(" I:") + r.model;
      if (!std::isnan(r.G)) {
        const double eg = std::fabs(true_G(m).value - r.G);
        worst_G = std::max(worst_G, eg);
        if (eg > tol) bad += std::string(" G:") + r.model;
      }
    }
    const auto c = ParametricModel::parse(kComposite);
    const double ci = std::fabs(true_I(c) - kCompositeI);
    const double cg = std::fabs(true_G(c).value - kCompositeG);
    d << "max|dI|=" << worst_I << " max|dG|=" << worst_G << " composite |dI|=" << ci << " |dG|=" << cg;
    if (!bad.empty()) d << " off:" << bad;
    return bad.empty() && ci <= tol_composite && cg <= tol_composite;
  });

  criterion(2, "Exact identities", [](std::ostream& d) {
    constexpr double tol = 1e-6;
    const double e[] = {
        true_I(ParametricModel::pareto2(1)) - (4 * std::numbers::ln2 - 2),
        true_I(ParametricModel::beta(1, 1)) - (2 - 2 * std::numbers::ln2),
        true_G(ParametricModel::exponential()).value - 0.5,
        true_G(ParametricModel::beta(1, 1)).value - 1.0 / 3,
        true_G(ParametricModel::pareto2(2)).value - 2.0 / 3,
    };
    double worst = 0;
    for (double x : e) worst = std::max(worst, std::fabs(x));
    d << "max error " << worst;
    return worst <= tol;
  });

  criterion(3, "Grid convergence", [](std::ostream& d) {
    constexpr double tol = 1e-3;
    double worst = 0;
    std::vector<std::string> models;
    for (const auto& r : kReference) models.push_back(r.model);
    models.push_back(kComposite);
    for (const auto& name : models) {
      const auto m = ParametricModel::parse(name);
      worst = std::max(worst, std::fabs(true_I_grid(m, 100) - true_I_grid(m, 500)));
    }
    d << "max |I100 - I500| = " << worst;
    return worst <= tol;
  });

  criterion(4, "Coverage reproduction", [](std::ostream& d) {
    constexpr double cov_tol = 0.03, width_tol = 0.004, pareto_cov_max = 0.25;
    struct Target {
      const char* model;
      double coverage, width;
    };
    const Target targets[] = {{"lognormal", 0.962, 0.051}, {"beta:0.5,0.5", 0.940, 0.063}, {"weibull:2", 0.961, 0.053}};
    bool ok = true;
    std::uint64_t seed = 4000;
    for (const auto& t : targets) {
      SimStudySpec s;
      s.kind = StudyKind::Coverage;
      s.model = ParametricModel::parse(t.model);
      s.n = 500;
      s.reps = 1000;
      s.master_seed = ++seed;
      const auto r = run_study(s);
      const bool row = std::fabs(r.coverage - t.coverage) <= cov_tol && std::fabs(r.mean_width - t.width) <= width_tol;
      ok = ok && row;
      d << t.model << " " << r.coverage << " (" << r.mean_width << ")" << (row ? "" : " off") << "; ";
    }
    SimStudySpec p;
    p.kind = StudyKind::Coverage;
    p.model = ParametricModel::pareto2(1);
    p.measure = Measure::G;
    p.n = 500;
    p.reps = 1000;
    p.master_seed = ++seed;
    const auto r = run_study(p);
    d << "pareto2:1 G " << r.coverage;
    return ok && r.coverage < pareto_cov_max;
  });

  criterion(5, "Bias/SE reproduction", [](std::ostream& d) {
    constexpr double bias_tol = 0.005, se_rel_tol = 0.25;
    struct Target {
      const char* model;
      double b, s;
    };
    const Target targets[] = {{"lognormal", -0.006, 0.027}, {"beta:0.1,0.1", -0.015, 0.043}};
    bool ok = true;
    std::uint64_t seed = 5000;
    for (const auto& t : targets) {
      SimStudySpec s;
      s.kind = StudyKind::Bias;
      s.model = ParametricModel::parse(t.model);
      s.n = 100;
      s.reps = 1000;
      s.master_seed = ++seed;
      const auto r = run_study(s);
      const bool row = std::fabs(r.bias_I - t.b) <= bias_tol && std::fabs(r.se_I - t.s) <= se_rel_tol * t.s;
      ok = ok && row;
      d << t.model << " b_I=" << r.bias_I << " s_I=" << r.se_I << (row ? "" : " off") << "; ";
    }
    return ok;
  });

  criterion(6, "Oracle equivalence", [](std::ostream& d) {
    constexpr double max_se = 3.0;
    constexpr std::size_t draws = 1'000'000;
    const char* models[] = {"exponential", "lognormal",  "beta:0.5,0.5", "chisq:4",   "pareto1:2",
                            "pareto2:1",   "weibull:2", "uniform",      kComposite};
    double worst = 0;
    std::uint64_t seed = 6000;
    for (const char* name : models) {
      const auto m = ParametricModel::parse(name);
      const auto mc = mc_ratio_expectation(m, draws, ++seed);
      worst = std::max(worst, std::fabs(mc.mean - (1 - true_I(m))) / mc.standard_error);
    }
    d << "worst deviation " << worst << " MC SEs over 9 families";
    return worst <= max_se;
  });

  criterion(7, "Robustness ordering", [](std::ostream& d) {
    constexpr double shift_factor = 3.0;
    SimStudySpec clean;
    clean.kind = StudyKind::Bias;
    clean.model = ParametricModel::parse(kComposite);
    clean.n = 200;
    clean.reps = 1000;
    clean.master_seed = 7000;
    clean.truth_I = kCompositeI;
    clean.truth_G = kCompositeG;
    auto dirty = clean;
    dirty.kind = StudyKind::Contamination;
    dirty.contamination = ContaminationSpec{0.999, std::nullopt, 1};
    const auto a = run_study(clean);
    const auto b = contamination_study(dirty);
    const double shift_I = std::fabs(b.median_I - a.median_I);
    const double shift_G = std::fabs(b.median_G - a.median_G);
    d << "median|err| I=" << b.median_abs_error_I << " G=" << b.median_abs_error_G << "; shift I=" << shift_I
      << " G=" << shift_G;
    return b.median_abs_error_I < b.median_abs_error_G && shift_G >= shift_factor * shift_I;
  });

  criterion(8, "Convexity suite", [](std::ostream& d) {
    constexpr double match_tol = 1e-8;
    int nonpositive = 0;
    double worst_match = 0;
    for (int i = 1; i <= 100; ++i) {
      const double a = 0.05 * i;
      for (int j = 1; j <= 99; ++j) {
        const double p = j / 100.0;
        const double t = t_pareto1_closed(a, p);
        if (!(t > 0)) ++nonpositive;
        // relative to the size of the terms; t itself crosses zero
        const double scale = 16 * std::max(1.0, a) / std::pow(a * p * (2 - p), 2);
        worst_match = std::max(worst_match, std::fabs(t - t_function(ParametricModel::pareto1(a), p)) / scale);
      }
    }
    const bool flips = convexity_scan(ParametricModel::weibull(1.0)).convex_on_grid &&
                       !convexity_scan(ParametricModel::weibull(1.5)).convex_on_grid;
    const double boundary = convexity_boundary([](double b) { return ParametricModel::weibull(b); }, 1.0, 1.5,
                                               100000, 1e-3);
    const auto ln = convexity_scan(ParametricModel::lognormal());
    const double edge = ln.negative_regions.empty() ? NAN : ln.negative_regions.front().second;
    const bool pareto_ok = nonpositive == 0;
    const bool match_ok = worst_match <= match_tol;
    const bool weibull_ok = flips && boundary > 1.0 && boundary < 1.1;
    const bool ln_ok = ln.negative_regions.size() == 1 && edge > 0.04 && edge < 0.05;
    d << "pareto t>0: " << (pareto_ok ? "yes" : "no") << " (" << nonpositive << "/9900 nonpositive); closed vs generic "
      << worst_match << "; weibull boundary " << boundary << "; lognormal edge " << edge;
    return pareto_ok && match_ok && weibull_ok && ln_ok;
  });

  criterion(9, "Property suites", [](std::ostream& d) {
    constexpr double wald_boot_tol = 0.01;
    // scale invariance; a power of two keeps the scaling exact in floating point
    bool scale_ok = true;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto s = sample(ParametricModel::lognormal(), 500, derive_seed(9000, seed));
      const auto t = s.scaled(1024.0);
      const auto a = curve(s), b = curve(t);
      for (std::size_t j = 0; j < a.points.size(); ++j) scale_ok = scale_ok && a.points[j].ordinate == b.points[j].ordinate;
      scale_ok = scale_ok && i_hat(s) == i_hat(t) && gini_hat(s) == gini_hat(t);
    }
    // every accepted unit transfer on integer samples of size 3..7 over 1..6
    int accepted = 0, violations = 0;
    for (std::size_t n = 3; n <= 7; ++n) {
      std::vector<int> v(n, 1);
      while (true) {
        const SortedSample s(std::vector<double>(v.begin(), v.end()));
        const auto before = curve(s);
        const double ib = i_hat(s);
        for (std::size_t dr = 1; dr <= n; ++dr) {
          for (std::size_t rr = 1; rr <= n; ++rr) {
            std::optional<SortedSample> moved;
            try {
              moved = median_preserving_transfer(s, 1.0, dr, rr);
            } catch (const rejected_transfer&) {
              continue;
            }
            ++accepted;
            const auto after = curve(*moved);
            bool bad = i_hat(*moved) > ib + 1e-15;
            for (std::size_t j = 0; j < after.points.size(); ++j) {
              bad = bad || after.points[j].ordinate < before.points[j].ordinate - 1e-15;
            }
            violations += bad;
          }
        }
        int k = static_cast<int>(n) - 1;
        while (k >= 0 && v[k] == 6) --k;
        if (k < 0) break;
        ++v[k];
        for (std::size_t i = k + 1; i < n; ++i) v[i] = v[k];
      }
    }
    // Wald vs bootstrap at n = 2500
    const auto s = sample(ParametricModel::lognormal(), 2500, 9999);
    double worst = 0;
    for (Measure m : {Measure::I, Measure::G}) {
      const auto w = m == Measure::I ? ci_I(s) : ci_G(s);
      const auto b = bootstrap_ci(s, m, 500, 0.05, 9998);
      worst = std::max({worst, std::fabs(w.lower - b.lower), std::fabs(w.upper - b.upper)});
    }
    d << "scale " << (scale_ok ? "exact" : "broken") << "; transfers " << accepted << " accepted, " << violations
      << " violations; wald-bootstrap max gap " << worst;
    return scale_ok && accepted > 0 && violations == 0 && worst <= wald_boot_tol;
  });

  criterion(10, "Grouped synthesis", [](std::ostream& d) {
    constexpr double q_target = 0.991, q_tol = 5e-4, sd_i_ratio_max = 1.3, sd_g_ratio_min = 2.0;
    const auto t = bundled_abs_table(AbsTable::GWI1995);
    const double q = t.implied_q();
    std::vector<double> sd_i, sd_g;
    for (double a : {1.0, 3.0}) {
      const auto pop = synthesize_population(t, a, kDefaultObsPerThousand, 2010).sample;
      std::vector<double> ii, gg;
      for (std::uint64_t r = 0; r < 200; ++r) {
        Engine e = make_engine(derive_seed(1010, r));
        std::vector<std::size_t> idx(pop.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        std::vector<double> draw;
        for (std::size_t k = 0; k < 500; ++k) {
          std::swap(idx[k], idx[k + uniform_index(e, idx.size() - k)]);
          draw.push_back(pop[idx[k]]);
        }
        const SortedSample s(draw);
        ii.push_back(i_hat(s));
        gg.push_back(gini_hat(s));
      }
      sd_i.push_back(sd(ii));
      sd_g.push_back(sd(gg));
    }
    const double ri = std::max(sd_i[0], sd_i[1]) / std::min(sd_i[0], sd_i[1]);
    const double rg = sd_g[0] / sd_g[1];
    d << "q=" << q << "; SD(I) a=1/a=3 ratio " << ri << ", SD(G) ratio " << rg;
    return std::fabs(q - q_target) <= q_tol && ri < sd_i_ratio_max && rg > sd_g_ratio_min;
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
