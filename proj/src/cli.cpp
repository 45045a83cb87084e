#include "wsal/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "wsal/bounds.hpp"
#include "wsal/errors.hpp"
#include "wsal/instance_json.hpp"
#include "wsal/lab.hpp"

namespace wsal::cli {

namespace {

struct Options {
  std::string instance;
  double epsilon = 0.05;
  double delta = 0.1;
  double scale = 0.01;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string mode = "main-text";
  bool baseline = false;
  bool trace = false;
  std::string output = "-";
  int workers = std::max(1, omp_get_num_procs());
  std::vector<std::string> overrides;
  std::uint64_t n_test = 200'000;
  int d = 1;
  std::optional<int> d_prime;
  double p_hat = 1.0;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(text)};
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw UsageError("--seeds: empty range " + text);
    std::vector<std::uint64_t> out;
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  } catch (const std::logic_error&) {
    throw UsageError("--seeds expects N or N..M, got " + text);
  }
}

std::vector<InstanceSpec> load_specs(const Options& o) {
  if (o.instance.empty()) throw UsageError("--instance is required");
  std::vector<InstanceSpec> specs;
  try {
    specs = load_instances(o.instance);
    for (auto& spec : specs) {
      nlohmann::json j = spec;
      for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got " + kv);
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        nlohmann::json v = nlohmann::json::parse(value, nullptr, false);
        j[key] = v.is_discarded() ? nlohmann::json(value) : v;
      }
      spec = j.get<InstanceSpec>();
      if (o.seed) spec.seed = *o.seed;
      spec.validate();
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return specs;
}

InstanceSpec single_spec(const Options& o) {
  const auto specs = load_specs(o);
  if (specs.size() != 1) throw UsageError("this subcommand takes an instance file with exactly one spec");
  return specs.front();
}

std::vector<std::uint64_t> seed_list(const Options& o, std::uint64_t fallback) {
  if (!o.seeds.empty()) return parse_seed_range(o.seeds);
  if (o.seed) return {*o.seed};
  return {fallback};
}

AlgoConfig algo_config(const Options& o, Family family) {
  const ClassId id = family == Family::threshold_1d ? ClassId::threshold : ClassId::halfspace;
  AlgoConfig c = AlgoConfig::for_class(id, o.scale);
  c.target_epsilon = o.epsilon;
  c.delta = o.delta;
  try {
    c.epsilon_pass_mode = pass_mode_from_string(o.mode);
    c.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return c;
}

lab::TrialOptions trial_options(const Options& o) {
  lab::TrialOptions t;
  t.n_test = o.n_test;
  t.with_baseline = o.baseline;
  t.trace = o.trace;
  return t;
}

// Writes to the configured sink; "-" is `out`.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw UsageError("cannot open output file: " + o.output);
  f << text;
}

void emit_traces(const Options& o, const std::vector<lab::TrialResult>& rows) {
  if (!o.trace) return;
  if (o.output == "-") throw UsageError("--trace with sweep or compare needs --output");
  std::ofstream f(o.output + ".trace.jsonl", std::ios::binary);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto rec : rows[i].trace) {
      rec["row"] = i;
      rec["seed"] = rows[i].seed;
      f << rec.dump() << "\n";
    }
  }
}

bool all_passed(const std::vector<lab::TrialResult>& rows, double epsilon) {
  return std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r.passed(epsilon); });
}

int cmd_run(const Options& o, std::ostream& out) {
  const InstanceSpec spec = single_spec(o);
  const auto config = algo_config(o, spec.family);
  const auto r = lab::run_trial(spec, config, trial_options(o));
  emit(o, out, lab::to_json(r).dump(2) + "\n");
  return r.passed(o.epsilon) ? kExitOk : kExitTrialFailure;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto specs = load_specs(o);
  const auto config = algo_config(o, specs.front().family);
  for (const auto& s : specs) {
    if (s.family != specs.front().family) throw UsageError("sweep grids must share one family");
  }
  const auto rows = lab::sweep(specs, seed_list(o, specs.front().seed), config, trial_options(o), o.workers);
  emit(o, out, lab::to_csv(rows));
  emit_traces(o, rows);
  return all_passed(rows, o.epsilon) ? kExitOk : kExitTrialFailure;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const InstanceSpec spec = single_spec(o);
  const auto config = algo_config(o, spec.family);
  const auto seeds = seed_list(o, spec.seed);
  if (seeds.size() < 2) throw UsageError("compare needs at least two seeds (--seeds N..M)");
  const auto rows = lab::run_comparison(spec, config, seeds, trial_options(o), o.workers);
  emit(o, out, lab::to_csv(rows));
  emit_traces(o, rows);
  return all_passed(rows, o.epsilon) ? kExitOk : kExitTrialFailure;
}

int cmd_diagnose(const Options& o, std::ostream& out) {
  const InstanceSpec spec = single_spec(o);
  AlgoConfig config = algo_config(o, spec.family);
  config.retain_samples = true;
  World world(spec);
  nlohmann::json j;
  j["instance"] = spec;
  try {
    const RunResult run = run_main(world, config);
    if (o.trace) {
      j["trace"] = nlohmann::json::array();
      for (const auto& s : run.states) j["trace"].push_back(trace_record(s));
    }
    j["diagnostics"] = lab::to_json(lab::check_invariants(run, world));
  } catch (const Error& e) {
    j["error"] = e.what();
    emit(o, out, j.dump(2) + "\n");
    return kExitTrialFailure;
  }
  emit(o, out, j.dump(2) + "\n");
  return kExitOk;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_formulas(const Options& o, std::ostream& out) {
  const int d_prime = o.d_prime.value_or(o.d + 1);
  std::ostringstream s;
  try {
    const auto schedule = bounds::epoch_schedule(o.epsilon, o.delta);
    const auto n0 = bounds::initial_sample_size(o.delta, o.d, o.scale);
    s << "epsilon = " << fmt(o.epsilon) << "\n";
    s << "delta = " << fmt(o.delta) << "\n";
    s << "d = " << o.d << "\n";
    s << "d' = " << d_prime << "\n";
    s << "scale = " << fmt(o.scale) << "\n";
    s << "k_0 = " << bounds::epoch_count(o.epsilon) << "\n";
    s << "n_0 = " << n0 << " (unscaled " << fmt(bounds::initial_sample_size_raw(o.delta, o.d)) << ")\n";
    s << "sigma(n_0, delta_0) = " << fmt(bounds::sigma(n0, o.d, schedule.front().delta)) << "\n";
    s << "gamma(n_0, delta_0) = " << fmt(bounds::gamma(n0, schedule.front().delta)) << "\n";
    s << "k epsilon_k delta_k m(p_hat=" << fmt(o.p_hat) << ")\n";
    for (const auto& e : schedule) {
      s << e.k << " " << fmt(e.epsilon) << " " << fmt(e.delta);
      if (e.k > 0) s << " " << bounds::diff_classifier_sample_size(o.p_hat, e.epsilon, d_prime, e.delta / 2.0, o.scale);
      s << "\n";
    }
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  emit(o, out, s.str());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Active learning from a strong oracle and a weak labeler: runs, sweeps and diagnostics.", "wsal"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  Options o;

  auto common = [&](CLI::App* sub, bool trial) {
    sub->add_option("--epsilon", o.epsilon, "target excess error")->capture_default_str();
    sub->add_option("--delta", o.delta, "confidence parameter")->capture_default_str();
    sub->add_option("--scale", o.scale, "multiplier on every sample-size constant")->capture_default_str();
    sub->add_option("--output", o.output, "output path, - for standard output")->capture_default_str();
    if (!trial) return;
    sub->add_option("--instance", o.instance, "instance spec JSON (object or array)")->required();
    sub->add_option("--seed", o.seed, "seed overriding the instance file");
    sub->add_option("--seeds", o.seeds, "seed range N..M");
    sub->add_option("--mode", o.mode, "epsilon passed to the difference-classifier trainer")
        ->check(CLI::IsMember({"main-text", "appendix"}))
        ->capture_default_str();
    sub->add_flag("--baseline", o.baseline, "also run the DBAL baseline on a rebuilt world");
    sub->add_flag("--trace", o.trace, "emit per-epoch trace records");
    sub->add_option("--workers", o.workers, "concurrent trials")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--set", o.overrides, "instance override key=value (repeatable)");
    sub->add_option("--n-test", o.n_test, "test points for error measurement")->capture_default_str();
  };
  auto* run = app.add_subcommand("run", "one trial, JSON output");
  auto* sweep = app.add_subcommand("sweep", "instance grid x seeds, CSV output");
  auto* compare = app.add_subcommand("compare", "main against baseline per seed, CSV output");
  auto* diagnose = app.add_subcommand("diagnose", "invariant diagnostics of one run, JSON output");
  auto* formulas = app.add_subcommand("formulas", "sample sizes and radii for given parameters");
  for (auto* sub : {run, sweep, compare, diagnose}) common(sub, true);
  common(formulas, false);
  formulas->add_option("--d", o.d, "VC dimension")->check(CLI::PositiveNumber)->capture_default_str();
  formulas->add_option("--d-prime", o.d_prime, "VC dimension of the difference class (default d + 1)");
  formulas->add_option("--p-hat", o.p_hat, "region mass estimate used for m")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (!(o.scale > 0.0)) {
    err << "--scale must be positive\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (compare->parsed()) return cmd_compare(o, out);
    if (diagnose->parsed()) return cmd_diagnose(o, out);
    return cmd_formulas(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitTrialFailure;
  }
}

}  // namespace wsal::cli
