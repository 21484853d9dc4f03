#pragma once

// Results tables. CSV columns, in order:
//
//   axis_name, axis_value, n, C, nu, epsilon, tau, beta, k_prime, T, trials,
//   exact_errors, p_err, p_err_lo, p_err_hi, fp_items, fp_rate, fn_items,
//   fn_rate, wall_seconds
//
// JSON holds the same fields per row under "results", next to a "config"
// echo and the "seed". Reals are written in shortest round-trip form, so
// write-then-read is lossless.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "burstgt/config.hpp"
#include "burstgt/experiment.hpp"

namespace burstgt {

struct ResultRow {
  std::string axis_name;
  double axis_value = 0.0;
  std::uint64_t n = 0;
  std::uint64_t C = 0;
  double nu = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  double beta = 0.0;
  double k_prime = 0.0;
  std::uint64_t T = 0;
  std::uint64_t trials = 0;
  std::uint64_t exact_errors = 0;
  double p_err = 0.0;
  double p_err_lo = 0.0;
  double p_err_hi = 0.0;
  std::uint64_t fp_items = 0;
  double fp_rate = 0.0;
  std::uint64_t fn_items = 0;
  double fn_rate = 0.0;
  double wall_seconds = 0.0;
  std::string warning;  ///< skipped cells only; JSON carries it, CSV does not

  bool operator==(const ResultRow&) const = default;
};

inline constexpr std::array<std::string_view, 20> kResultColumns = {
    "axis_name", "axis_value", "n",        "C",        "nu",       "epsilon", "tau",
    "beta",      "k_prime",    "T",        "trials",   "exact_errors", "p_err", "p_err_lo",
    "p_err_hi",  "fp_items",   "fp_rate",  "fn_items", "fn_rate",  "wall_seconds"};

/// Skipped sweep cells become rows with zero trials and NaN rates.
inline ResultRow make_row(const SweepCell& cell) {
  ResultRow r;
  const ExperimentConfig& c = cell.config;
  r.axis_name = cell.axis;
  r.axis_value = cell.value;
  r.n = c.markov.n;
  r.C = cell.experiment ? cell.experiment->design.C : c.design.C;
  r.nu = c.design.nu;
  r.epsilon = c.design.epsilon;
  r.tau = c.design.tau;
  r.beta = c.markov.beta;
  r.k_prime = c.markov.k_prime;
  r.warning = cell.warning;
  if (!cell.experiment) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.p_err = r.p_err_lo = r.p_err_hi = r.fp_rate = r.fn_rate = nan;
    return r;
  }
  const AggregateStats& s = cell.stats;
  r.T = cell.experiment->design.T;
  r.trials = s.trials;
  r.exact_errors = s.exact_recovery_errors;
  r.p_err = s.p_err;
  r.p_err_lo = s.p_err_ci.lo;
  r.p_err_hi = s.p_err_ci.hi;
  r.fp_items = s.fp_items;
  r.fp_rate = s.fp_rate;
  r.fn_items = s.fn_items;
  r.fn_rate = s.fn_rate;
  r.wall_seconds = s.wall_seconds;
  return r;
}

namespace detail {

inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s, std::string_view column) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("results: bad value '" + std::string(s) + "' in column " + std::string(column));
  return x;
}

inline std::uint64_t parse_count(std::string_view s, std::string_view column) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("results: bad count '" + std::string(s) + "' in column " + std::string(column));
  return x;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) os << (i ? "," : "") << kResultColumns[i];
  os << '\n';
  using detail::format_real;
  for (const ResultRow& r : rows) {
    os << r.axis_name << ',' << format_real(r.axis_value) << ',' << r.n << ',' << r.C << ',' << format_real(r.nu)
       << ',' << format_real(r.epsilon) << ',' << format_real(r.tau) << ',' << format_real(r.beta) << ','
       << format_real(r.k_prime) << ',' << r.T << ',' << r.trials << ',' << r.exact_errors << ','
       << format_real(r.p_err) << ',' << format_real(r.p_err_lo) << ',' << format_real(r.p_err_hi) << ','
       << r.fp_items << ',' << format_real(r.fp_rate) << ',' << r.fn_items << ',' << format_real(r.fn_rate) << ','
       << format_real(r.wall_seconds) << '\n';
  }
}

inline std::vector<ResultRow> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("results: empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  if (header.size() != kResultColumns.size()) throw std::runtime_error("results: unexpected CSV header");
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] != kResultColumns[i]) throw std::runtime_error("results: unexpected column " + std::string(header[i]));

  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != kResultColumns.size()) throw std::runtime_error("results: wrong field count in row");
    using detail::parse_count;
    using detail::parse_real;
    const auto& col = kResultColumns;
    ResultRow r;
    r.axis_name = std::string(f[0]);
    r.axis_value = parse_real(f[1], col[1]);
    r.n = parse_count(f[2], col[2]);
    r.C = parse_count(f[3], col[3]);
    r.nu = parse_real(f[4], col[4]);
    r.epsilon = parse_real(f[5], col[5]);
    r.tau = parse_real(f[6], col[6]);
    r.beta = parse_real(f[7], col[7]);
    r.k_prime = parse_real(f[8], col[8]);
    r.T = parse_count(f[9], col[9]);
    r.trials = parse_count(f[10], col[10]);
    r.exact_errors = parse_count(f[11], col[11]);
    r.p_err = parse_real(f[12], col[12]);
    r.p_err_lo = parse_real(f[13], col[13]);
    r.p_err_hi = parse_real(f[14], col[14]);
    r.fp_items = parse_count(f[15], col[15]);
    r.fp_rate = parse_real(f[16], col[16]);
    r.fn_items = parse_count(f[17], col[17]);
    r.fn_rate = parse_real(f[18], col[18]);
    r.wall_seconds = parse_real(f[19], col[19]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

// JSON has no NaN; skipped rows carry null rates.
inline nlohmann::json real_or_null(double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); }

inline double real_from(const nlohmann::json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace detail

inline nlohmann::json to_json(const ResultRow& r) {
  using detail::real_or_null;
  nlohmann::json j = {{"axis_name", r.axis_name},     {"axis_value", r.axis_value},   {"n", r.n},
          {"C", r.C},                     {"nu", r.nu},                   {"epsilon", r.epsilon},
          {"tau", r.tau},                 {"beta", r.beta},               {"k_prime", r.k_prime},
          {"T", r.T},                     {"trials", r.trials},           {"exact_errors", r.exact_errors},
          {"p_err", real_or_null(r.p_err)}, {"p_err_lo", real_or_null(r.p_err_lo)},
          {"p_err_hi", real_or_null(r.p_err_hi)}, {"fp_items", r.fp_items},
          {"fp_rate", real_or_null(r.fp_rate)}, {"fn_items", r.fn_items},
          {"fn_rate", real_or_null(r.fn_rate)}, {"wall_seconds", r.wall_seconds}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

inline ResultRow result_row_from_json(const nlohmann::json& j) {
  using detail::real_from;
  ResultRow r;
  r.axis_name = j.at("axis_name").get<std::string>();
  r.axis_value = j.at("axis_value").get<double>();
  r.n = j.at("n").get<std::uint64_t>();
  r.C = j.at("C").get<std::uint64_t>();
  r.nu = j.at("nu").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.tau = j.at("tau").get<double>();
  r.beta = j.at("beta").get<double>();
  r.k_prime = j.at("k_prime").get<double>();
  r.T = j.at("T").get<std::uint64_t>();
  r.trials = j.at("trials").get<std::uint64_t>();
  r.exact_errors = j.at("exact_errors").get<std::uint64_t>();
  r.p_err = real_from(j.at("p_err"));
  r.p_err_lo = real_from(j.at("p_err_lo"));
  r.p_err_hi = real_from(j.at("p_err_hi"));
  r.fp_items = j.at("fp_items").get<std::uint64_t>();
  r.fp_rate = real_from(j.at("fp_rate"));
  r.fn_items = j.at("fn_items").get<std::uint64_t>();
  r.fn_rate = real_from(j.at("fn_rate"));
  r.wall_seconds = j.at("wall_seconds").get<double>();
  if (auto it = j.find("warning"); it != j.end()) r.warning = it->get<std::string>();
  return r;
}

struct ResultsDocument {
  RunConfig config;
  std::vector<ResultRow> rows;
};

inline nlohmann::json results_to_json(const RunConfig& config, const std::vector<ResultRow>& rows) {
  nlohmann::json doc;
  doc["seed"] = config.experiment.master_seed;
  doc["config"] = to_json(config);
  doc["results"] = nlohmann::json::array();
  for (const ResultRow& r : rows) doc["results"].push_back(to_json(r));
  return doc;
}

inline ResultsDocument results_from_json(const nlohmann::json& doc) {
  ResultsDocument out;
  out.config = run_config_from_json(doc.at("config"));
  for (const auto& row : doc.at("results")) out.rows.push_back(result_row_from_json(row));
  return out;
}

/// Writes `rows` to `path`; I/O failures are reported with the path.
inline void write_results(const std::vector<ResultRow>& rows, const std::string& path, OutputFormat format,
                          const RunConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == OutputFormat::csv) write_results_csv(out, rows);
  else out << results_to_json(config, rows).dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

inline std::vector<ResultRow> read_results(const std::string& path, OutputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  if (format == OutputFormat::csv) return read_results_csv(in);
  const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw std::runtime_error(path + " is not valid JSON");
  return results_from_json(doc).rows;
}

}  // namespace burstgt
