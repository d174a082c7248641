#pragma once

// CSV sample I/O and synthesis of individual incomes from grouped (binned)
// tables with a Pareto upper tail. Ships the four ABS weekly-income columns.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "qineq/errors.hpp"
#include "qineq/random.hpp"
#include "qineq/sample.hpp"

namespace qineq {

// ---- CSV -------------------------------------------------------------------

struct CsvSample {
  SortedSample sample;
  std::size_t skipped = 0;  // blank or non-finite cells
  std::string column;       // header name, or the index as text
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::optional<double> parse_cell(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return v;
}

}  // namespace detail

using ColumnSelector = std::variant<std::string, std::size_t>;

// Reads one numeric column. With a name the first row must be a header; with
// a 0-based index a first row whose cell is not numeric is taken as a header.
inline CsvSample read_sample_csv(const std::string& path, const ColumnSelector& column = std::size_t{0}) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  std::vector<double> values;
  CsvSample out;
  std::size_t col = 0;
  std::size_t line_no = 0;
  bool first = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (first && detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv(line);
    if (first) {
      first = false;
      if (const auto* name = std::get_if<std::string>(&column)) {
        bool found = false;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (cells[i] == *name) {
            col = i;
            found = true;
            break;
          }
        }
        if (!found) throw io_error("column '" + *name + "' not found in '" + path + "'");
        out.column = *name;
        continue;
      }
      col = std::get<std::size_t>(column);
      if (col >= cells.size()) {
        throw io_error("column " + std::to_string(col) + " not found in '" + path + "'");
      }
      out.column = std::to_string(col);
      if (!cells[col].empty() && !detail::parse_cell(cells[col])) {
        out.column = std::string(cells[col]);
        continue;  // header row
      }
    }
    if (col >= cells.size() || cells[col].empty()) {
      ++out.skipped;
      continue;
    }
    const auto v = detail::parse_cell(cells[col]);
    if (!v) {
      throw io_error("unparseable value '" + std::string(cells[col]) + "' at line " +
                     std::to_string(line_no) + " of '" + path + "'");
    }
    if (!std::isfinite(*v)) {
      ++out.skipped;
      continue;
    }
    values.push_back(*v);
  }
  if (values.empty()) throw io_error("no numeric rows in '" + path + "'");
  out.sample = SortedSample(std::move(values));
  return out;
}

// Shortest round-trip formatting, so a write/read cycle is bit-exact.
inline std::string format_shortest(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw io_error("cannot format value");
  return std::string(buf.data(), ptr);
}

inline void write_sample_csv(const std::string& path, const SortedSample& s,
                             const std::string& header = "x") {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  if (!header.empty()) out << header << '\n';
  for (double v : s.values()) out << format_shortest(v) << '\n';
  if (!out) throw io_error("write failed for '" + path + "'");
}

// ---- grouped tables ----------------------------------------------------------

struct IncomeBin {
  double lo = 0.0;
  std::optional<double> hi;  // empty: open-ended top bin
  double count = 0.0;        // thousands
  friend bool operator==(const IncomeBin&, const IncomeBin&) = default;
};

struct GroupedIncomeTable {
  std::string name;
  std::vector<IncomeBin> bins;

  void validate() const {
    if (bins.empty()) throw domain_error("GroupedIncomeTable: no bins");
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const auto& b = bins[i];
      if (!(b.count >= 0.0) || !std::isfinite(b.count)) {
        throw domain_error("GroupedIncomeTable: counts must be finite and nonnegative");
      }
      if (!b.hi && i + 1 != bins.size()) {
        throw domain_error("GroupedIncomeTable: only the last bin may be open");
      }
      if (b.hi && *b.hi < b.lo) throw domain_error("GroupedIncomeTable: bin upper below lower");
      if (i > 0 && (!bins[i - 1].hi || b.lo <= *bins[i - 1].hi)) {
        throw domain_error("GroupedIncomeTable: bins must be ordered and non-overlapping");
      }
    }
    if (!(bins.front().lo >= 1.0)) throw domain_error("GroupedIncomeTable: incomes start at 1");
    if (!(total() > 0.0)) throw domain_error("GroupedIncomeTable: total count is zero");
  }

  double total() const {
    double t = 0.0;
    for (const auto& b : bins) t += b.count;
    return t;
  }
  bool has_open_bin() const { return !bins.empty() && !bins.back().hi; }
  // Lower bound of the open bin.
  double x_q() const {
    if (!has_open_bin()) throw domain_error("GroupedIncomeTable: no open bin");
    return bins.back().lo;
  }
  // Share of the population below the open bin.
  double implied_q() const {
    if (!has_open_bin()) throw domain_error("GroupedIncomeTable: no open bin");
    return 1.0 - bins.back().count / total();
  }

  friend bool operator==(const GroupedIncomeTable&, const GroupedIncomeTable&) = default;
};

// Pareto II scale that puts the q-quantile at x_q: lambda = x_q / ((1-q)^{-1/a} - 1).
inline double pareto_tail_lambda(double x_q, double q, double a) {
  if (!(x_q > 0.0) || !std::isfinite(x_q)) throw domain_error("pareto_tail_lambda: x_q must be positive");
  if (!(q > 0.0 && q < 1.0)) throw domain_error("pareto_tail_lambda: q must lie in (0,1)");
  if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("pareto_tail_lambda: a must be finite and positive");
  const double denom = std::expm1(-std::log1p(-q) / a);
  // Very large a sends the denominator to 0 and lambda to infinity.
  if (!(denom > 0.0)) throw domain_error("pareto_tail_lambda: a too large, lambda diverges");
  const double lambda = x_q / denom;
  if (!std::isfinite(lambda)) throw domain_error("pareto_tail_lambda: lambda diverges");
  return lambda;
}

inline constexpr int kDefaultObsPerThousand = 10;

struct SynthesisResult {
  SortedSample sample;
  double lambda = 0.0;  // 0 without a tail
  double q = 0.0;
  std::vector<std::size_t> bin_counts;  // draws generated per bin
  std::vector<std::string> warnings;
};

// Each closed bin with whole-dollar labels [lo, hi] covers (lo, hi + 1]; the
// first covers (lo - 1, hi + 1] so the table starts at 0. A bin of c thousand
// units yields round(c * obs_per_thousand) draws. The open bin is filled with
// Pareto II(a, lambda) quantiles of u uniform on (q, 1), all above x_q.
inline SynthesisResult synthesize_population(const GroupedIncomeTable& table, double a,
                                             int obs_per_thousand, std::uint64_t seed) {
  table.validate();
  if (!(a > 0.0)) throw domain_error("synthesize_population: a must be positive");
  if (obs_per_thousand < 1) throw domain_error("synthesize_population: obs_per_thousand must be >= 1");
  SynthesisResult res;
  Engine eng = make_engine(seed);
  std::vector<double> values;
  if (table.has_open_bin()) {
    res.q = table.implied_q();
    res.lambda = pareto_tail_lambda(table.x_q(), res.q, a);
  } else {
    res.warnings.push_back("no_open_bin_tail_ignored");
  }
  for (std::size_t i = 0; i < table.bins.size(); ++i) {
    const auto& b = table.bins[i];
    const auto draws = static_cast<std::size_t>(std::llround(b.count * obs_per_thousand));
    res.bin_counts.push_back(draws);
    if (draws == 0) continue;
    if (b.hi) {
      const double lo = i == 0 ? b.lo - 1.0 : b.lo;
      const double width = *b.hi + 1.0 - lo;
      for (std::size_t k = 0; k < draws; ++k) values.push_back(lo + width * uniform_open(eng));
    } else {
      const double log_tail = std::log1p(-res.q);
      for (std::size_t k = 0; k < draws; ++k) {
        const double log_s = log_tail + std::log1p(-uniform_open(eng));  // log(1-u)
        values.push_back(res.lambda * std::expm1(-log_s / a));
      }
    }
  }
  res.sample = SortedSample(std::move(values));
  return res;
}

enum class AbsTable { GWI1995, GWI2010, DWI1995, DWI2010 };

inline const char* to_string(AbsTable t) {
  switch (t) {
    case AbsTable::GWI1995: return "GWI1995";
    case AbsTable::GWI2010: return "GWI2010";
    case AbsTable::DWI1995: return "DWI1995";
    case AbsTable::DWI2010: return "DWI2010";
  }
  return "?";
}

inline std::optional<AbsTable> parse_abs_table(std::string_view name) {
  for (auto t : {AbsTable::GWI1995, AbsTable::GWI2010, AbsTable::DWI1995, AbsTable::DWI2010}) {
    if (name == to_string(t)) return t;
  }
  return std::nullopt;
}

// Australian weekly incomes, counts in thousands (households for GWI, persons
// for DWI); "no income" and "negative income" rows are not included.
inline GroupedIncomeTable bundled_abs_table(AbsTable which) {
  struct Row { double lo, hi, c1995, c2010; };
  constexpr double kOpen = -1.0;
  static constexpr std::array<Row, 18> gwi = {{
      {1, 99, 72.9, 81.6},          {100, 199, 75.5, 62.3},     {200, 299, 670.4, 170.7},
      {300, 399, 371.5, 645.0},     {400, 499, 555.5, 328.8},   {500, 599, 375.4, 497.6},
      {600, 799, 668.3, 802.4},     {800, 999, 589.0, 637.2},   {1000, 1199, 552.9, 605.2},
      {1200, 1399, 509.6, 556.0},   {1400, 1599, 408.8, 513.5}, {1600, 1799, 325.8, 469.3},
      {1800, 1999, 289.8, 445.4},   {2000, 2499, 525.7, 869.5}, {2500, 2999, 211.2, 566.3},
      {3000, 3999, 162.9, 634.1},   {4000, 4999, 46.6, 230.0},  {5000, kOpen, 57.7, 243.2},
  }};
  static constexpr std::array<Row, 20> dwi = {{
      {1, 49, 132.0, 102.0},        {50, 99, 97.7, 65.3},         {100, 149, 170.2, 101.7},
      {150, 199, 301.1, 154.5},     {200, 249, 1193.5, 273.6},    {250, 299, 1768.3, 463.0},
      {300, 349, 1550.8, 1150.7},   {350, 399, 1509.0, 1319.9},   {400, 449, 1175.1, 1091.9},
      {450, 499, 1246.7, 1101.8},   {500, 599, 2232.6, 2283.5},   {600, 699, 1948.3, 2278.3},
      {700, 799, 1280.2, 1868.4},   {800, 899, 903.6, 1745.2},    {900, 999, 671.4, 1492.5},
      {1000, 1099, 419.5, 1196.0},  {1100, 1399, 549.0, 2359.6},  {1400, 1699, 165.9, 1107.6},
      {1700, 1999, 49.4, 573.3},    {2000, kOpen, 73.1, 771.7},
  }};
  const bool is_gwi = which == AbsTable::GWI1995 || which == AbsTable::GWI2010;
  const bool y1995 = which == AbsTable::GWI1995 || which == AbsTable::DWI1995;
  GroupedIncomeTable t;
  t.name = to_string(which);
  auto add = [&](const auto& rows) {
    for (const auto& r : rows) {
      IncomeBin b;
      b.lo = r.lo;
      if (r.hi != kOpen) b.hi = r.hi;
      b.count = y1995 ? r.c1995 : r.c2010;
      t.bins.push_back(b);
    }
  };
  if (is_gwi) add(gwi); else add(dwi);
  return t;
}

}  // namespace qineq
