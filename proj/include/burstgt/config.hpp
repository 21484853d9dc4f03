#pragma once

// JSON run configuration with sections {markov, design, experiment, output}
// and dotted-path overrides such as "design.C=50".

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "burstgt/errors.hpp"
#include "burstgt/experiment.hpp"

namespace burstgt {

enum class OutputFormat { csv, json };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

struct OutputSpec {
  std::string path;  ///< empty: no results file
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  ExperimentConfig experiment;
  OutputSpec output;
};

/// Raised for malformed configuration documents; the front end maps it to
/// the validation exit code.
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

namespace detail {

using nlohmann::json;

inline const json* find(const json& section, const char* key) {
  auto it = section.find(key);
  return it == section.end() || it->is_null() ? nullptr : &*it;
}

inline double get_real(const json& v, const std::string& field) {
  if (v.is_string() && v.get<std::string>() == "ln2") return std::numbers::ln2;
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

inline std::uint64_t get_count(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(field, "must be a non-negative integer");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x >= 0.0 && std::floor(x) == x && x < 1.8e19) return static_cast<std::uint64_t>(x);
  }
  throw ConfigError(field, "must be a non-negative integer");
}

inline void reject_unknown(const json& section, const std::string& name, std::initializer_list<std::string_view> keys) {
  if (!section.is_object()) throw ConfigError(name, "expected an object");
  for (const auto& [key, _] : section.items()) {
    bool known = false;
    for (std::string_view k : keys) known = known || k == key;
    if (!known) throw ConfigError(name + "." + key, "unknown field");
  }
}

}  // namespace detail

inline nlohmann::json to_json(const RunConfig& rc) {
  using nlohmann::json;
  const ExperimentConfig& c = rc.experiment;
  json markov = {{"k_prime", c.markov.k_prime}, {"beta", c.markov.beta}, {"n", c.markov.n}};
  markov["alpha"] = c.markov.alpha ? json(*c.markov.alpha) : json(nullptr);
  json design = {{"kind", std::string(to_string(c.design.kind))},
                 {"C", c.design.C},
                 {"nu", c.design.nu},
                 {"epsilon", c.design.epsilon},
                 {"tau", c.design.tau}};
  const DesignOverrides& o = c.design.overrides;
  design["p1"] = o.p1 ? json(*o.p1) : json(nullptr);
  design["p2"] = o.p2 ? json(*o.p2) : json(nullptr);
  design["T"] = o.T ? json(*o.T) : json(nullptr);
  json experiment = {{"trials", c.trials}, {"master_seed", c.master_seed}};
  experiment["parallelism"] = c.parallelism == 0 ? json("auto") : json(c.parallelism);
  json output = {{"path", rc.output.path}, {"format", std::string(to_string(rc.output.format))}};
  return {{"markov", markov}, {"design", design}, {"experiment", experiment}, {"output", output}};
}

/// Missing fields keep their defaults. Unknown fields and type errors throw
/// ConfigError naming the dotted field.
inline RunConfig run_config_from_json(const nlohmann::json& doc) {
  using detail::find;
  RunConfig rc;
  ExperimentConfig& c = rc.experiment;
  detail::reject_unknown(doc, "config", {"markov", "design", "experiment", "output"});

  if (const auto* m = find(doc, "markov")) {
    detail::reject_unknown(*m, "markov", {"k_prime", "beta", "n", "alpha"});
    if (const auto* v = find(*m, "k_prime")) c.markov.k_prime = detail::get_real(*v, "markov.k_prime");
    if (const auto* v = find(*m, "beta")) c.markov.beta = detail::get_real(*v, "markov.beta");
    if (const auto* v = find(*m, "n")) c.markov.n = detail::get_count(*v, "markov.n");
    if (const auto* v = find(*m, "alpha")) c.markov.alpha = detail::get_real(*v, "markov.alpha");
  }
  if (const auto* d = find(doc, "design")) {
    detail::reject_unknown(*d, "design", {"kind", "C", "nu", "epsilon", "tau", "p1", "p2", "T"});
    if (const auto* v = find(*d, "kind")) {
      const std::string kind = v->is_string() ? v->get<std::string>() : "";
      if (kind == "block") c.design.kind = DesignKind::block;
      else if (kind == "iid") c.design.kind = DesignKind::iid;
      else throw ConfigError("design.kind", "expected \"block\" or \"iid\"");
    }
    if (const auto* v = find(*d, "C")) c.design.C = detail::get_count(*v, "design.C");
    if (const auto* v = find(*d, "nu")) c.design.nu = detail::get_real(*v, "design.nu");
    if (const auto* v = find(*d, "epsilon")) c.design.epsilon = detail::get_real(*v, "design.epsilon");
    if (const auto* v = find(*d, "tau")) c.design.tau = detail::get_real(*v, "design.tau");
    if (const auto* v = find(*d, "p1")) c.design.overrides.p1 = detail::get_real(*v, "design.p1");
    if (const auto* v = find(*d, "p2")) c.design.overrides.p2 = detail::get_real(*v, "design.p2");
    if (const auto* v = find(*d, "T")) c.design.overrides.T = detail::get_count(*v, "design.T");
  }
  if (const auto* e = find(doc, "experiment")) {
    detail::reject_unknown(*e, "experiment", {"trials", "master_seed", "parallelism"});
    if (const auto* v = find(*e, "trials")) c.trials = detail::get_count(*v, "experiment.trials");
    if (const auto* v = find(*e, "master_seed")) c.master_seed = detail::get_count(*v, "experiment.master_seed");
    if (const auto* v = find(*e, "parallelism")) {
      if (v->is_string() && v->get<std::string>() == "auto") c.parallelism = 0;
      else c.parallelism = static_cast<unsigned>(detail::get_count(*v, "experiment.parallelism"));
    }
  }
  if (const auto* o = find(doc, "output")) {
    detail::reject_unknown(*o, "output", {"path", "format"});
    if (const auto* v = find(*o, "path")) {
      if (!v->is_string()) throw ConfigError("output.path", "expected a string");
      rc.output.path = v->get<std::string>();
    }
    if (const auto* v = find(*o, "format")) {
      const std::string f = v->is_string() ? v->get<std::string>() : "";
      if (f == "csv") rc.output.format = OutputFormat::csv;
      else if (f == "json") rc.output.format = OutputFormat::json;
      else throw ConfigError("output.format", "expected \"csv\" or \"json\"");
    }
  }
  if (c.trials < 1) throw ConfigError("experiment.trials", "must be at least 1");
  return rc;
}

/// Applies "section.key=value" to a config document. The value is read as a
/// JSON literal when it parses as one, otherwise as a string.
inline void apply_override(nlohmann::json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(std::string(assignment), "override must look like section.key=value");
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    throw ConfigError(path, "override path must look like section.key");
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  if (!doc.is_object()) doc = nlohmann::json::object();
  doc[path.substr(0, dot)][path.substr(dot + 1)] = std::move(value);
}

inline nlohmann::json load_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config", path + " is not valid JSON");
  return doc;
}

}  // namespace burstgt
