// burstgt: bounds, simulations, sweeps, validation suites and entropy tables.
//
// Exit codes: 0 success, 1 runtime error, 2 invalid configuration or
// arguments, 3 failed validation check.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "burstgt/burstgt.hpp"

namespace {

using nlohmann::json;
using namespace burstgt;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;
  std::string output;
  std::string format;
};

void add_config_options(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("-c,--config", a.path, "JSON config file");
  cmd->add_option("--set", a.sets, "override, e.g. design.C=50 (repeatable)")->allow_extra_args(false);
  cmd->add_option("overrides", a.sets, "section.key=value overrides");
  cmd->add_option("-o,--output", a.output, "results file (overrides output.path)");
  cmd->add_option("--format", a.format, "csv or json (overrides output.format)")->check(CLI::IsMember({"csv", "json"}));
}

json config_document(const ConfigArgs& a) {
  json doc = a.path.empty() ? json::object() : load_config_document(a.path);
  for (const std::string& s : a.sets) apply_override(doc, s);
  if (!a.output.empty()) doc["output"]["path"] = a.output;
  if (!a.format.empty()) doc["output"]["format"] = a.format;
  return doc;
}

double parse_double(const std::string& s, const std::string& field) {
  if (s == "ln2") return std::numbers::ln2;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(x))
    throw ConfigError(field, "'" + s + "' is not a number");
  return x;
}

std::size_t parse_count(const std::string& s, const std::string& field) {
  std::size_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return x;
  // Accept integral reals written as 1e6.
  const double d = parse_double(s, field);
  if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::size_t>(d);
  throw ConfigError(field, "'" + s + "' is not a non-negative integer");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void print_summary(const SweepCell& cell) {
  if (!cell.experiment) {
    std::cerr << "warning: " << cell.axis << "=" << fmt(cell.value) << " skipped: " << cell.warning << '\n';
    return;
  }
  const AggregateStats& s = cell.stats;
  const DesignParams& d = cell.experiment->design;
  if (cell.axis != "none") std::cout << cell.axis << "=" << fmt(cell.value) << "  ";
  std::cout << "n=" << d.n << " C=" << d.C << " T=" << d.T << " trials=" << s.trials << " p_err=" << fmt(s.p_err)
            << " [" << fmt(s.p_err_ci.lo) << ", " << fmt(s.p_err_ci.hi) << "]"
            << " fp_rate=" << fmt(s.fp_rate) << " fn_rate=" << fmt(s.fn_rate) << " (" << fmt(s.wall_seconds) << " s)\n";
}

void emit(const RunConfig& rc, const std::vector<SweepCell>& cells) {
  std::vector<ResultRow> rows;
  for (const SweepCell& c : cells) {
    print_summary(c);
    rows.push_back(make_row(c));
  }
  if (!rc.output.path.empty()) {
    write_results(rows, rc.output.path, rc.output.format, rc);
    std::cout << "wrote " << rows.size() << " row(s) to " << rc.output.path << '\n';
  }
}

int cmd_simulate(const ConfigArgs& a) {
  const RunConfig rc = run_config_from_json(config_document(a));
  std::cout << "config: " << to_json(rc).dump() << '\n';
  emit(rc, {simulate(rc.experiment)});
  return 0;
}

int cmd_sweep(const ConfigArgs& a, const std::string& axis_name, const std::vector<std::string>& value_text) {
  const RunConfig rc = run_config_from_json(config_document(a));
  const auto axis = parse_axis(axis_name);
  if (!axis) throw ConfigError("axis", "unknown axis '" + axis_name + "'");
  std::vector<double> values;
  for (const std::string& v : value_text) values.push_back(parse_double(v, "values"));
  std::cout << "config: " << to_json(rc).dump() << '\n';
  emit(rc, sweep(rc.experiment, *axis, values));
  return 0;
}

struct BoundsArgs {
  std::optional<double> beta, k_prime, epsilon, tau;
  std::optional<std::string> C, nu, n;
  std::string format = "text";
};

int cmd_bounds(const ConfigArgs& a, const BoundsArgs& b) {
  const RunConfig rc = run_config_from_json(config_document(a));
  const ExperimentConfig& c = rc.experiment;
  const double beta = b.beta.value_or(c.markov.beta);
  const double k_prime = b.k_prime.value_or(c.markov.k_prime);
  const double epsilon = b.epsilon.value_or(c.design.epsilon);
  const double tau = b.tau.value_or(c.design.tau);
  const std::size_t n = b.n ? parse_count(*b.n, "n") : c.markov.n;

  double C = static_cast<double>(c.design.C);
  bool infinite_C = false;
  if (b.C) {
    infinite_C = *b.C == "inf";
    C = infinite_C ? kEffectivelyInfiniteC : static_cast<double>(parse_count(*b.C, "C"));
  }
  double nu = c.design.nu;
  if (b.nu) nu = *b.nu == "opt" ? optimize_nu() : parse_double(*b.nu, "nu");

  const RateBound conv = converse_rate(beta);
  const RateBound ach = achievable_rate(beta, k_prime, C, nu);
  const RateBound iid = iid_achievable_rate(nu);
  const MarkovParams m = derive_params(k_prime, beta, n);

  json out;
  out["inputs"] = {{"beta", beta}, {"k_prime", k_prime}, {"C", infinite_C ? json("inf") : json(C)},
                   {"nu", nu},     {"epsilon", epsilon}, {"tau", tau},
                   {"n", n}};
  out["converse"] = conv.tau;
  out["achievable"] = ach.tau;
  out["iid_achievable"] = iid.tau;
  out["ratio"] = ach.tau / conv.tau;
  out["entropy_rate_ratio"] = entropy_rate_ratio(m);
  std::string bound_note;
  if (infinite_C) {
    out["total_error_bound"] = nullptr;
    bound_note = "needs a finite C";
  } else {
    try {
      const DesignParams d = derive_design(m, static_cast<std::size_t>(C), nu, epsilon, tau);
      const ErrorBound e = total_error_bound(m, d);
      out["total_error_bound"] = {{"T", d.T},           {"fn_term", e.fn_term}, {"fp_term", e.fp_term},
                                  {"total", e.total},   {"r_n", e.r_n},         {"vacuous", e.vacuous}};
    } catch (const ParameterError& err) {
      out["total_error_bound"] = nullptr;
      bound_note = err.what();
    }
  }
  RunConfig echo = rc;
  echo.experiment.markov.beta = beta;
  echo.experiment.markov.k_prime = k_prime;
  echo.experiment.markov.n = n;
  echo.experiment.design.nu = nu;
  echo.experiment.design.epsilon = epsilon;
  echo.experiment.design.tau = tau;
  if (!infinite_C) echo.experiment.design.C = static_cast<std::size_t>(C);
  out["config"] = to_json(echo);

  if (b.format == "json") {
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  std::cout << "converse rate       " << fmt(conv.tau) << '\n'
            << "achievable rate     " << fmt(ach.tau) << "  (C=" << (infinite_C ? std::string("inf") : fmt(C))
            << ", nu=" << fmt(nu) << ")\n"
            << "iid achievable rate " << fmt(iid.tau) << '\n'
            << "achievable/converse " << fmt(ach.tau / conv.tau) << '\n'
            << "entropy rate ratio  " << fmt(entropy_rate_ratio(m)) << "  (n=" << n << ")\n";
  if (out["total_error_bound"].is_null()) {
    std::cout << "total error bound   n/a (" << bound_note << ")\n";
  } else {
    const json& e = out["total_error_bound"];
    std::cout << "total error bound   " << fmt(e["total"].get<double>()) << "  (fn " << fmt(e["fn_term"].get<double>())
              << ", fp " << fmt(e["fp_term"].get<double>()) << ", r_n " << fmt(e["r_n"].get<double>())
              << ", T=" << e["T"].get<std::size_t>() << ")\n";
  }
  return 0;
}

int cmd_validate(const std::string& suite_name, const ValidationOptions& opt) {
  const auto suite = parse_suite(suite_name);
  if (!suite) throw ConfigError("suite", "unknown suite '" + suite_name + "'");
  const std::vector<Check> checks = run_suite(*suite, opt);
  std::size_t failed = 0;
  for (const Check& c : checks) {
    failed += c.pass ? 0 : 1;
    std::printf("%s  %-9s %-52s measured=%-12.6g limit=%.6g\n", c.pass ? "PASS" : "FAIL", c.suite.c_str(),
                c.name.c_str(), c.measured, c.tolerance);
  }
  std::printf("%zu/%zu checks passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? 0 : kExitValidation;
}

int cmd_entropy(double k_prime, double beta, std::optional<double> alpha, const std::vector<std::string>& n_text) {
  std::vector<std::size_t> ns;
  for (const std::string& s : n_text) {
    const double d = parse_double(s, "n");
    if (d < 2.0 || std::floor(d) != d) throw ConfigError("n", "'" + s + "' is not an integer >= 2");
    ns.push_back(static_cast<std::size_t>(d));
  }
  std::printf("%12s %18s %18s %12s\n", "n", "H_exact_bits", "H_asymptotic", "ratio");
  for (std::size_t n : ns) {
    const MarkovParams m = alpha ? params_from_rates(*alpha, beta, n) : derive_params(k_prime, beta, n);
    const double l = std::log2(static_cast<double>(n));
    const double kp = alpha ? *alpha * static_cast<double>(n) / l : k_prime;
    const double h = entropy_chain_rule(m.alpha, m.beta, n);
    const double ratio = m.q > 0.0 ? entropy_rate_ratio(m) : std::nan("");
    std::printf("%12zu %18.10g %18.10g %12.8f\n", n, h, entropy_asymptotic(kp, n), ratio);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group testing under bursty (Markov) infections"};
  app.require_subcommand(1);

  ConfigArgs sim_args, sweep_args, bounds_args;
  CLI::App* sim = app.add_subcommand("simulate", "run one batch of trials");
  add_config_options(sim, sim_args);

  CLI::App* sw = app.add_subcommand("sweep", "run a batch per value of one parameter");
  add_config_options(sw, sweep_args);
  std::string axis;
  std::vector<std::string> values;
  sw->add_option("--axis", axis, "n, tau, beta, C, nu or epsilon")->required();
  sw->add_option("--values", values, "comma-separated values")->required()->delimiter(',')->allow_extra_args(false);

  CLI::App* bd = app.add_subcommand("bounds", "rates and error bounds");
  add_config_options(bd, bounds_args);
  bd->remove_option(bd->get_option("--format"));
  BoundsArgs bargs;
  bd->add_option("--beta", bargs.beta);
  bd->add_option("--k-prime", bargs.k_prime);
  bd->add_option("--C", bargs.C, "block size, or inf");
  bd->add_option("--nu", bargs.nu, "nu, ln2, or opt");
  bd->add_option("--n", bargs.n);
  bd->add_option("--epsilon", bargs.epsilon);
  bd->add_option("--tau", bargs.tau);
  bd->add_option("--format", bargs.format)->check(CLI::IsMember({"text", "json"}));

  CLI::App* va = app.add_subcommand("validate", "run a check suite");
  std::string suite = "all";
  ValidationOptions vopt;
  va->add_option("suite", suite, "entropy, chernoff, lemma1, bounds, endtoend or all");
  va->add_option("--samples", vopt.lemma1_samples, "single-test samples for lemma1");
  va->add_option("--trials", vopt.endtoend_trials, "trials for endtoend");
  va->add_option("--seed", vopt.seed);
  va->add_option("--threads", vopt.parallelism, "0 = auto");

  CLI::App* en = app.add_subcommand("entropy", "exact and asymptotic entropy of U^n");
  double ek = 1.0, eb = 0.5;
  std::optional<double> ea;
  std::vector<std::string> ens;
  en->add_option("--k-prime", ek);
  en->add_option("--beta", eb);
  en->add_option("--alpha", ea, "use this alpha instead of k' log2(n)/n");
  en->add_option("--n", ens, "sequence lengths")->required()->delimiter(',')->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(sim_args);
    if (*sw) return cmd_sweep(sweep_args, axis, values);
    if (*bd) return cmd_bounds(bounds_args, bargs);
    if (*va) return cmd_validate(suite, vopt);
    if (*en) return cmd_entropy(ek, eb, ea, ens);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
