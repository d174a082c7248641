#pragma once

// JSON and CSV forms of the library's records. Numbers in CSV use shortest
// round-trip formatting.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "qineq/convexity.hpp"
#include "qineq/datasets.hpp"
#include "qineq/errors.hpp"
#include "qineq/inequality_measures.hpp"
#include "qineq/montecarlo.hpp"

namespace qineq {

using nlohmann::json;

inline json to_json(const IntervalEstimate& e) {
  json j = {{"measure", to_string(e.measure)},
            {"point", e.point},
            {"se", e.se},
            {"lower", e.lower},
            {"upper", e.upper},
            {"level", e.level},
            {"method", to_string(e.method)},
            {"J", e.J},
            {"n", e.n},
            {"flags", e.flags}};
  if (e.n2 > 0) j["n2"] = e.n2;
  return j;
}

inline void write_curve_csv(std::ostream& out, const CurveGrid& g) {
  out << "p,ordinate\n";
  for (const auto& pt : g.points) out << format_shortest(pt.p) << ',' << format_shortest(pt.ordinate) << '\n';
}

// ---- grouped tables ---------------------------------------------------------

inline json to_json(const GroupedIncomeTable& t) {
  json bins = json::array();
  for (const auto& b : t.bins) {
    json jb = {{"lo", b.lo}, {"count", b.count}};
    jb["hi"] = b.hi ? json(*b.hi) : json(nullptr);
    bins.push_back(jb);
  }
  json j = {{"bins", bins}};
  if (!t.name.empty()) j["name"] = t.name;
  return j;
}

inline GroupedIncomeTable grouped_table_from_json(const json& j) {
  try {
    GroupedIncomeTable t;
    if (j.contains("name")) t.name = j.at("name").get<std::string>();
    for (const auto& jb : j.at("bins")) {
      IncomeBin b;
      b.lo = jb.at("lo").get<double>();
      if (jb.contains("hi") && !jb.at("hi").is_null()) b.hi = jb.at("hi").get<double>();
      b.count = jb.at("count").get<double>();
      t.bins.push_back(b);
    }
    t.validate();
    return t;
  } catch (const json::exception& ex) {
    throw domain_error(std::string("grouped table JSON: ") + ex.what());
  }
}

// ---- simulation studies -----------------------------------------------------

inline StudyKind parse_study_kind(const std::string& s) {
  if (s == "coverage") return StudyKind::Coverage;
  if (s == "bias") return StudyKind::Bias;
  if (s == "contamination") return StudyKind::Contamination;
  throw domain_error("unknown study kind '" + s + "'");
}

inline Measure parse_measure(const std::string& s) {
  if (s == "I") return Measure::I;
  if (s == "G") return Measure::G;
  throw domain_error("unknown measure '" + s + "' (expected I or G)");
}

// Fields: kind, model | population_csv (+ column), n, reps, J, alpha, measure,
// contamination {quantile, value, count}, master_seed, truth_I, truth_G,
// keep_per_rep, threads. Missing fields take the library defaults.
inline SimStudySpec sim_spec_from_json(const json& j) {
  static const char* const kKnown[] = {"kind",        "model",   "population_csv", "column",
                                       "n",           "reps",    "J",              "alpha",
                                       "measure",     "contamination", "master_seed", "truth_I",
                                       "truth_G",     "keep_per_rep",  "threads"};
  try {
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : kKnown) known = known || item.key() == k;
      if (!known) throw domain_error("unknown simulation spec field '" + item.key() + "'");
    }
    SimStudySpec s;
    if (j.contains("kind")) s.kind = parse_study_kind(j.at("kind").get<std::string>());
    if (j.contains("model")) s.model = ParametricModel::parse(j.at("model").get<std::string>());
    if (j.contains("population_csv")) {
      ColumnSelector col = std::size_t{0};
      if (j.contains("column")) {
        const auto& c = j.at("column");
        if (c.is_string()) col = c.get<std::string>(); else col = c.get<std::size_t>();
      }
      s.population = read_sample_csv(j.at("population_csv").get<std::string>(), col).sample;
    }
    if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
    if (j.contains("reps")) s.reps = j.at("reps").get<int>();
    if (j.contains("J")) s.J = j.at("J").get<int>();
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
    if (j.contains("measure")) s.measure = parse_measure(j.at("measure").get<std::string>());
    if (j.contains("contamination") && !j.at("contamination").is_null()) {
      const auto& c = j.at("contamination");
      ContaminationSpec cs;
      if (c.contains("quantile")) cs.quantile_level = c.at("quantile").get<double>();
      if (c.contains("value") && !c.at("value").is_null()) cs.value = c.at("value").get<double>();
      if (c.contains("count")) cs.count = c.at("count").get<int>();
      s.contamination = cs;
    }
    if (j.contains("master_seed")) s.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("truth_I") && !j.at("truth_I").is_null()) s.truth_I = j.at("truth_I").get<double>();
    if (j.contains("truth_G") && !j.at("truth_G").is_null()) s.truth_G = j.at("truth_G").get<double>();
    if (j.contains("keep_per_rep")) s.keep_per_rep = j.at("keep_per_rep").get<bool>();
    if (j.contains("threads")) s.threads = j.at("threads").get<int>();
    if (s.kind == StudyKind::Contamination && !s.contamination) s.contamination = ContaminationSpec{};
    s.validate();
    return s;
  } catch (const json::exception& ex) {
    throw domain_error(std::string("simulation spec JSON: ") + ex.what());
  }
}

// Fully resolved spec (defaults filled in). An empirical population is
// described by its size only.
inline json to_json(const SimStudySpec& s) {
  json j = {{"kind", to_string(s.kind)},
            {"n", s.n},
            {"reps", s.reps},
            {"J", s.J},
            {"alpha", s.alpha},
            {"measure", to_string(s.measure)},
            {"master_seed", s.master_seed},
            {"keep_per_rep", s.keep_per_rep},
            {"threads", s.threads}};
  if (s.model) j["model"] = s.model->to_string();
  if (s.population) j["population_size"] = s.population->size();
  if (s.contamination) {
    json c = {{"quantile", s.contamination->quantile_level}, {"count", s.contamination->count}};
    c["value"] = s.contamination->value ? json(*s.contamination->value) : json(nullptr);
    j["contamination"] = c;
  } else {
    j["contamination"] = nullptr;
  }
  j["truth_I"] = s.truth_I ? json(*s.truth_I) : json(nullptr);
  j["truth_G"] = s.truth_G ? json(*s.truth_G) : json(nullptr);
  return j;
}

inline json to_json(const SimStudyResult& r) {
  json j = {{"kind", to_string(r.kind)},
            {"measure", to_string(r.measure)},
            {"reps", r.reps},
            {"truth_I", r.truth_I},
            {"truth_G", r.truth_G},
            {"truth_G_undefined_mean", r.truth_G_undefined_mean},
            {"bias_I", r.bias_I},
            {"bias_G", r.bias_G},
            {"se_I", r.se_I},
            {"se_G", r.se_G},
            {"median_I", r.median_I},
            {"median_G", r.median_G},
            {"median_abs_error_I", r.median_abs_error_I},
            {"median_abs_error_G", r.median_abs_error_G},
            {"mc_standard_error", r.mc_standard_error}};
  if (r.kind == StudyKind::Coverage) {
    j["coverage"] = r.coverage;
    j["mean_width"] = r.mean_width;
  }
  if (r.kind == StudyKind::Contamination) j["contamination_value"] = r.contamination_value;
  return j;
}

inline void write_per_rep_csv(std::ostream& out, const SimStudyResult& r) {
  out << "rep,estimate_I,estimate_G,covered,width\n";
  for (std::size_t i = 0; i < r.per_rep.size(); ++i) {
    const auto& x = r.per_rep[i];
    out << i << ',' << format_shortest(x.estimate_I) << ',' << format_shortest(x.estimate_G) << ','
        << (x.covered ? 1 : 0) << ',' << format_shortest(x.width) << '\n';
  }
}

// ---- convexity ------------------------------------------------------------------

inline void write_convexity_csv(std::ostream& out, const ConvexityReport& r) {
  out << "p,t,neg_flag\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    out << format_shortest(r.grid[i]) << ',' << format_shortest(r.t_values[i]) << ','
        << (r.t_values[i] < 0.0 ? 1 : 0) << '\n';
  }
}

inline json to_json(const ConvexityReport& r) {
  json regions = json::array();
  for (const auto& [lo, hi] : r.negative_regions) regions.push_back({{"p_lo", lo}, {"p_hi", hi}});
  return {{"model", r.model.to_string()},
          {"gridsize", r.grid.size()},
          {"convex_on_grid", r.convex_on_grid},
          {"numeric_scores", r.numeric_scores},
          {"negative_regions", regions}};
}

}  // namespace qineq
