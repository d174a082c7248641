#pragma once

// Command logic for the qineq tool, kept separate from main() so tests can
// drive it in-process. Data goes to --out (or the given stream); the human
// summary goes to the error stream.
//
// Exit codes: 0 success, 2 invalid input or arguments, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qineq/qineq.hpp"

namespace qineq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumeric = 3;

namespace detail {

// Either the --out file or the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw io_error("cannot write '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline ColumnSelector column_selector(const std::string& column) {
  if (column.empty()) return std::size_t{0};
  if (column.find_first_not_of("0123456789") == std::string::npos) {
    return static_cast<std::size_t>(std::stoull(column));
  }
  return column;
}

inline void emit_csv_config(std::ostream& os, const json& config) { os << "# config: " << config.dump() << '\n'; }

inline void emit_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

}  // namespace detail

struct Options {
  // shared
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  // curve
  std::string dist;
  std::string input;
  std::string column;
  int J = kDefaultJ;
  // estimate / compare
  std::string measures = "I,G";
  double alpha = kDefaultAlpha;
  int bootstrap = 0;
  std::string input2;
  // simulate
  std::string spec_path;
  std::string per_rep_csv;
  int threads = -1;
  bool seed_given = false;
  // convexity
  int gridsize = 1000;
  std::string summary_path;
  // synth
  std::string table_path;
  std::string bundled;
  double a = 4.0;
  int obs_per_thousand = kDefaultObsPerThousand;
};

inline void require_format(const std::string& f) {
  if (f != "csv" && f != "json") throw domain_error("--format must be csv or json");
}

inline int cmd_curve(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o.format);
  if (o.dist.empty() == o.input.empty()) throw domain_error("curve: give exactly one of --dist or --input");
  if (o.J < 2) throw domain_error("curve: --J must be >= 2");
  json config = {{"command", "curve"}, {"J", o.J}, {"format", o.format}};
  CurveGrid g;
  if (!o.dist.empty()) {
    const auto m = ParametricModel::parse(o.dist);
    config["dist"] = m.to_string();
    g.J = o.J;
    for (double p : midpoint_grid(o.J)) g.points.push_back({p, true_R(m, p)});
  } else {
    const auto data = read_sample_csv(o.input, detail::column_selector(o.column));
    config["input"] = o.input;
    config["column"] = data.column;
    config["skipped"] = data.skipped;
    config["n"] = data.sample.size();
    g = curve(data.sample, o.J);
  }
  double area = 0.0;
  for (const auto& pt : g.points) area += 1.0 - pt.ordinate;
  area /= g.J;

  detail::Sink sink(o.out, out);
  if (o.format == "csv") {
    detail::emit_csv_config(sink.stream(), config);
    write_curve_csv(sink.stream(), g);
  } else {
    json pts = json::array();
    for (const auto& pt : g.points) pts.push_back({{"p", pt.p}, {"ordinate", pt.ordinate}});
    detail::emit_json(sink.stream(), {{"config", config}, {"I_grid", area}, {"points", pts}});
  }
  err << "curve: J=" << g.J << " mean(1-R)=" << area << '\n';
  return kExitOk;
}

inline std::vector<Measure> parse_measures(const std::string& s) {
  std::vector<Measure> out;
  for (const auto& m : detail::split_list(s)) out.push_back(parse_measure(m));
  if (out.empty()) throw domain_error("--measures must list I and/or G");
  return out;
}

inline void write_estimates(const Options& o, std::ostream& out, const json& config,
                            const std::vector<IntervalEstimate>& est) {
  detail::Sink sink(o.out, out);
  if (o.format == "csv") {
    detail::emit_csv_config(sink.stream(), config);
    sink.stream() << "measure,method,point,se,lower,upper,level,J,n,flags\n";
    for (const auto& e : est) {
      std::string flags;
      for (const auto& f : e.flags) flags += (flags.empty() ? "" : ";") + f;
      sink.stream() << to_string(e.measure) << ',' << to_string(e.method) << ','
                    << format_shortest(e.point) << ',' << format_shortest(e.se) << ','
                    << format_shortest(e.lower) << ',' << format_shortest(e.upper) << ','
                    << format_shortest(e.level) << ',' << e.J << ',' << e.n << ',' << flags << '\n';
    }
  } else {
    json arr = json::array();
    for (const auto& e : est) arr.push_back(to_json(e));
    detail::emit_json(sink.stream(), {{"config", config}, {"estimates", arr}});
  }
}

inline int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o.format);
  if (o.input.empty()) throw domain_error("estimate: --input is required");
  if (o.bootstrap != 0 && o.bootstrap < 50) throw domain_error("estimate: --bootstrap must be 0 or >= 50");
  const auto measures = parse_measures(o.measures);
  const auto data = read_sample_csv(o.input, detail::column_selector(o.column));
  json config = {{"command", "estimate"}, {"input", o.input},   {"column", data.column},
                 {"skipped", data.skipped}, {"n", data.sample.size()}, {"measures", o.measures},
                 {"J", o.J},               {"alpha", o.alpha},  {"bootstrap", o.bootstrap},
                 {"seed", o.seed},         {"format", o.format}};
  std::vector<IntervalEstimate> est;
  for (auto m : measures) {
    est.push_back(m == Measure::I ? ci_I(data.sample, o.J, o.alpha) : ci_G(data.sample, o.alpha));
    if (o.bootstrap > 0) est.push_back(bootstrap_ci(data.sample, m, o.bootstrap, o.alpha, o.seed, o.J));
  }
  write_estimates(o, out, config, est);
  for (const auto& e : est) {
    err << to_string(e.measure) << " (" << to_string(e.method) << "): " << e.point << " ["
        << e.lower << ", " << e.upper << "]\n";
  }
  return kExitOk;
}

inline int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o.format);
  if (o.input.empty() || o.input2.empty()) throw domain_error("compare: two input files are required");
  const auto measures = parse_measures(o.measures);
  const auto a = read_sample_csv(o.input, detail::column_selector(o.column));
  const auto b = read_sample_csv(o.input2, detail::column_selector(o.column));
  json config = {{"command", "compare"}, {"input1", o.input}, {"input2", o.input2},
                 {"column", a.column},   {"n1", a.sample.size()}, {"n2", b.sample.size()},
                 {"measures", o.measures}, {"J", o.J}, {"alpha", o.alpha}, {"format", o.format}};
  std::vector<IntervalEstimate> est;
  for (auto m : measures) {
    est.push_back(m == Measure::I ? ci_diff_I(a.sample, b.sample, o.J, o.alpha)
                                  : ci_diff_G(a.sample, b.sample, o.alpha));
  }
  write_estimates(o, out, config, est);
  for (const auto& e : est) {
    err << "difference in " << to_string(e.measure) << ": " << e.point << " [" << e.lower << ", "
        << e.upper << "]\n";
  }
  return kExitOk;
}

inline int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.spec_path.empty()) throw domain_error("simulate: --spec is required");
  std::ifstream in(o.spec_path);
  if (!in) throw io_error("cannot open '" + o.spec_path + "'");
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::exception& ex) {
    throw domain_error(std::string("simulate: invalid JSON: ") + ex.what());
  }
  auto spec = sim_spec_from_json(raw);
  if (o.seed_given) spec.master_seed = o.seed;
  if (o.threads >= 0) spec.threads = o.threads;
  if (!o.per_rep_csv.empty()) spec.keep_per_rep = true;
  const auto res = run_study(spec);

  detail::Sink sink(o.out, out);
  detail::emit_json(sink.stream(), {{"config", to_json(spec)}, {"result", to_json(res)}});
  if (!o.per_rep_csv.empty()) {
    std::ofstream csv(o.per_rep_csv);
    if (!csv) throw io_error("cannot write '" + o.per_rep_csv + "'");
    write_per_rep_csv(csv, res);
  }
  err << to_string(res.kind) << " study, " << res.reps << " reps";
  if (res.kind == StudyKind::Coverage) err << ": coverage " << res.coverage << ", mean width " << res.mean_width;
  err << "; bias_I " << res.bias_I << ", bias_G " << res.bias_G << '\n';
  return kExitOk;
}

inline int cmd_convexity(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o.format);
  if (o.dist.empty()) throw domain_error("convexity: --dist is required");
  const auto m = ParametricModel::parse(o.dist);
  const auto rep = convexity_scan(m, o.gridsize);
  json summary = to_json(rep);
  json config = {{"command", "convexity"}, {"dist", m.to_string()}, {"gridsize", o.gridsize},
                 {"format", o.format}};
  detail::Sink sink(o.out, out);
  if (o.format == "csv") {
    detail::emit_csv_config(sink.stream(), config);
    write_convexity_csv(sink.stream(), rep);
    if (!o.summary_path.empty()) {
      std::ofstream s(o.summary_path);
      if (!s) throw io_error("cannot write '" + o.summary_path + "'");
      detail::emit_json(s, {{"config", config}, {"summary", summary}});
    }
  } else {
    json pts = json::array();
    for (std::size_t i = 0; i < rep.grid.size(); ++i) pts.push_back({{"p", rep.grid[i]}, {"t", rep.t_values[i]}});
    detail::emit_json(sink.stream(), {{"config", config}, {"summary", summary}, {"points", pts}});
  }
  err << "convexity: " << summary.dump() << '\n';
  return kExitOk;
}

inline int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o.format);
  if (o.table_path.empty() == o.bundled.empty()) {
    throw domain_error("synth: give exactly one of --table or --bundled");
  }
  GroupedIncomeTable table;
  if (!o.bundled.empty()) {
    const auto which = parse_abs_table(o.bundled);
    if (!which) throw domain_error("synth: unknown bundled table '" + o.bundled + "'");
    table = bundled_abs_table(*which);
  } else {
    std::ifstream in(o.table_path);
    if (!in) throw io_error("cannot open '" + o.table_path + "'");
    try {
      table = grouped_table_from_json(json::parse(in));
    } catch (const json::parse_error& ex) {
      throw domain_error(std::string("synth: invalid JSON: ") + ex.what());
    }
  }
  const auto res = synthesize_population(table, o.a, o.obs_per_thousand, o.seed);
  json config = {{"command", "synth"},  {"table", o.bundled.empty() ? o.table_path : o.bundled},
                 {"a", o.a},            {"obs_per_thousand", o.obs_per_thousand},
                 {"seed", o.seed},      {"format", o.format}};
  json info = {{"n", res.sample.size()}, {"lambda", res.lambda}, {"q", res.q},
               {"bin_counts", res.bin_counts}, {"warnings", res.warnings}};
  detail::Sink sink(o.out, out);
  if (o.format == "csv") {
    detail::emit_csv_config(sink.stream(), config);
    sink.stream() << "income\n";
    for (double v : res.sample.values()) sink.stream() << format_shortest(v) << '\n';
  } else {
    detail::emit_json(sink.stream(), {{"config", config}, {"population", info}, {"values", res.sample.vector()}});
  }
  err << "synth: " << info.dump() << '\n';
  return kExitOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantile-ratio inequality curves and indices"};
  app.require_subcommand(1);
  Options o;

  auto* curve_cmd = app.add_subcommand("curve", "Ratio curve of a model or a data file");
  curve_cmd->add_option("--dist", o.dist, "Model, e.g. weibull:2");
  curve_cmd->add_option("--input", o.input, "CSV file with one numeric column");
  curve_cmd->add_option("--column", o.column, "Column name or 0-based index");
  curve_cmd->add_option("--J", o.J, "Grid size")->capture_default_str();

  auto* est_cmd = app.add_subcommand("estimate", "Point and interval estimates of I and G");
  est_cmd->add_option("--input", o.input, "CSV file")->required();
  est_cmd->add_option("--column", o.column, "Column name or 0-based index");
  est_cmd->add_option("--measures", o.measures, "I, G or I,G")->capture_default_str();
  est_cmd->add_option("--J", o.J, "Grid size")->capture_default_str();
  est_cmd->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();
  est_cmd->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates (0: none)")->capture_default_str();

  auto* cmp_cmd = app.add_subcommand("compare", "Interval for the difference between two samples");
  cmp_cmd->add_option("input1", o.input, "First CSV file")->required();
  cmp_cmd->add_option("input2", o.input2, "Second CSV file")->required();
  cmp_cmd->add_option("--column", o.column, "Column name or 0-based index");
  cmp_cmd->add_option("--measures", o.measures, "I, G or I,G")->capture_default_str();
  cmp_cmd->add_option("--J", o.J, "Grid size")->capture_default_str();
  cmp_cmd->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();

  auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation study from a JSON spec");
  sim_cmd->add_option("--spec", o.spec_path, "Study spec (JSON)")->required();
  sim_cmd->add_option("--per-rep-csv", o.per_rep_csv, "Write per-replication estimates here");
  sim_cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");

  auto* cvx_cmd = app.add_subcommand("convexity", "Scan t(p) for a model");
  cvx_cmd->add_option("--dist", o.dist, "Model")->required();
  cvx_cmd->add_option("--gridsize", o.gridsize, "Grid size")->capture_default_str();
  cvx_cmd->add_option("--summary", o.summary_path, "JSON summary file (csv format)");

  auto* syn_cmd = app.add_subcommand("synth", "Synthesize a population from a grouped table");
  syn_cmd->add_option("--table", o.table_path, "Grouped table (JSON)");
  syn_cmd->add_option("--bundled", o.bundled, "GWI1995, GWI2010, DWI1995 or DWI2010");
  syn_cmd->add_option("--a", o.a, "Pareto tail shape")->capture_default_str();
  syn_cmd->add_option("--obs-per-thousand", o.obs_per_thousand, "Draws per thousand units")
      ->capture_default_str();

  for (auto* sub : {curve_cmd, est_cmd, cmp_cmd, cvx_cmd, syn_cmd}) {
    sub->add_option("--out", o.out, "Output file (default: standard output)");
    sub->add_option("--format", o.format, "csv or json");
    sub->add_option("--seed", o.seed, "Random seed");
  }
  sim_cmd->add_option("--out", o.out, "Output file (default: standard output)");
  sim_cmd->add_option("--format", o.format, "json");
  auto* sim_seed = sim_cmd->add_option("--seed", o.seed, "Overrides master_seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  o.seed_given = sim_seed->count() > 0;

  try {
    if (*curve_cmd) { if (o.format.empty()) o.format = "csv"; return cmd_curve(o, out, err); }
    if (*est_cmd) { if (o.format.empty()) o.format = "json"; return cmd_estimate(o, out, err); }
    if (*cmp_cmd) { if (o.format.empty()) o.format = "json"; return cmd_compare(o, out, err); }
    if (*sim_cmd) {
      if (!o.format.empty() && o.format != "json") throw domain_error("simulate: --format must be json");
      return cmd_simulate(o, out, err);
    }
    if (*cvx_cmd) { if (o.format.empty()) o.format = "csv"; return cmd_convexity(o, out, err); }
    if (*syn_cmd) { if (o.format.empty()) o.format = "csv"; return cmd_synth(o, out, err); }
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qineq");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qineq::cli
