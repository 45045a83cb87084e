#include "wsal/lab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "wsal/instance_json.hpp"

namespace wsal::lab {

namespace {

void draw_test_set(const World& world, std::uint64_t n_test, std::vector<Point>& xs, std::vector<double>& p_plus) {
  if (n_test < 100) throw std::invalid_argument("measure_error: n_test must be at least 100");
  rng::Engine e(rng::derive(rng::StreamKey{world.spec().seed, 0, rng::Phase::measure, 0}, rng::Channel::sampler));
  xs.resize(n_test);
  p_plus.resize(n_test);
  for (std::uint64_t i = 0; i < n_test; ++i) {
    xs[i] = world.draw_point(e);
    p_plus[i] = world.strong_probability(xs[i]);
  }
}

std::string number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

nlohmann::json epoch_counts(const QueryLedger& ledger) {
  auto j = nlohmann::json::array();
  for (const auto& e : ledger.epochs()) j.push_back({{"k", e.k}, {"m1", e.m1}, {"m2", e.m2}, {"weak", e.weak}});
  return j;
}

}  // namespace

ErrorEstimate measure_error(const Classifier& h, const World& world, std::uint64_t n_test, kernels::Backend backend) {
  std::vector<Point> xs;
  std::vector<double> p;
  draw_test_set(world, n_test, xs, p);
  const auto sums = kernels::paired_error_sums(h, h, xs, p, backend);
  const double n = static_cast<double>(n_test);
  const double est = sums.err_h / n;
  return {est, kZ99 * std::sqrt(std::max(est * (1.0 - est), 0.0) / n)};
}

ErrorEstimate measure_excess(const Classifier& h, const World& world, std::uint64_t n_test, kernels::Backend backend) {
  std::vector<Point> xs;
  std::vector<double> p;
  draw_test_set(world, n_test, xs, p);
  const auto sums = kernels::paired_error_sums(h, world.best_in_class(), xs, p, backend);
  const double n = static_cast<double>(n_test);
  const double mean = sums.diff / n;
  const double var = std::max(sums.diff_sq / n - mean * mean, 0.0);
  return {mean, kZ99 * std::sqrt(var / n)};
}

TrialResult run_trial(const InstanceSpec& instance, const AlgoConfig& config, const TrialOptions& options) {
  TrialResult out;
  out.instance = instance;
  out.seed = instance.seed;
  out.excess_error = out.ci = out.exact_excess = std::numeric_limits<double>::quiet_NaN();
  const auto start = std::chrono::steady_clock::now();
  auto keep_trace = [&](const RunResult& r) {
    if (!options.trace) return;
    for (const auto& s : r.states) out.trace.push_back(trace_record(s));
  };
  try {
    World world(instance);
    RunResult main;
    try {
      main = run_main(world, config);
    } catch (const RunAborted& e) {
      out.ledger = e.partial().ledger;
      keep_trace(e.partial());
      throw;
    }
    out.ledger = main.ledger;
    keep_trace(main);
    const auto excess = measure_excess(main.h, world, options.n_test, options.backend);
    out.excess_error = excess.estimate;
    out.ci = excess.ci;
    out.exact_excess = world.exact_error(main.h) - world.best_error();
    if (options.with_baseline) {
      World rebuilt(instance);
      const RunResult base = run_dbal_baseline(rebuilt, config);
      if (base.initial_digest != main.initial_digest || base.n0 != main.n0) {
        throw std::logic_error("baseline world produced a different epoch-0 sample");
      }
      out.baseline_o_queries = base.ledger.strong_queries();
      out.ratio = static_cast<double>(main.ledger.strong_queries()) / static_cast<double>(*out.baseline_o_queries);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
    if (out.error.empty()) out.error = "unknown failure";
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<TrialResult> sweep(const std::vector<InstanceSpec>& grid, const std::vector<std::uint64_t>& seeds,
                               const AlgoConfig& config, const TrialOptions& options, int workers) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");
  if (workers < 1) throw std::invalid_argument("sweep: workers must be positive");
  std::vector<InstanceSpec> rows;
  for (const auto& spec : grid) {
    for (auto seed : seeds) {
      rows.push_back(spec);
      rows.back().seed = seed;
    }
  }
  std::vector<TrialResult> out(rows.size());
  const auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) out[i] = run_trial(rows[i], config, options);
  return out;
}

std::vector<TrialResult> run_comparison(const InstanceSpec& instance, const AlgoConfig& config,
                                        const std::vector<std::uint64_t>& seeds, TrialOptions options, int workers) {
  if (seeds.size() < 2) throw std::invalid_argument("run_comparison: needs at least two seeds");
  options.with_baseline = true;
  return sweep({instance}, seeds, config, options, workers);
}

std::string csv_header() {
  return "family,nu,weak_mode,g,p,beta,seed,excess_error,ci,exact_excess,o_queries_total,w_queries,epochs,"
         "baseline_o_queries,ratio,error";
}

std::string csv_row(const TrialResult& r) {
  const auto& s = r.instance;
  std::string row = to_string(s.family) + "," + number(s.nu) + "," + to_string(s.weak_mode) + "," + number(s.g) +
                    "," + number(s.p) + "," + number(s.beta) + "," + std::to_string(r.seed) + ",";
  const bool ok = r.ok();
  row += (ok ? number(r.excess_error) : "") + "," + (ok ? number(r.ci) : "") + "," +
         (ok ? number(r.exact_excess) : "") + ",";
  row += std::to_string(r.ledger.strong_queries()) + "," + std::to_string(r.ledger.weak_queries()) + ",";
  row += quoted(epoch_counts(r.ledger).dump()) + ",";
  row += (r.baseline_o_queries ? std::to_string(*r.baseline_o_queries) : "") + ",";
  row += (r.ratio ? number(*r.ratio) : "") + ",";
  row += r.error.empty() ? "" : quoted(r.error);
  return row;
}

std::string to_csv(const std::vector<TrialResult>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

nlohmann::json to_json(const TrialResult& r) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["instance"] = r.instance;
  j["seed"] = r.seed;
  j["excess_error"] = finite(r.excess_error);
  j["ci"] = finite(r.ci);
  j["exact_excess"] = finite(r.exact_excess);
  j["o_queries_total"] = r.ledger.strong_queries();
  j["o_queries_initial"] = r.ledger.initial_queries();
  j["w_queries"] = r.ledger.weak_queries();
  j["unlabeled_draws"] = r.ledger.unlabeled_draws();
  j["routed_to_weak"] = r.ledger.routed_to_weak();
  j["epochs"] = epoch_counts(r.ledger);
  j["baseline_o_queries"] = r.baseline_o_queries ? nlohmann::json(*r.baseline_o_queries) : nlohmann::json(nullptr);
  j["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
  j["error"] = r.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.error);
  if (!r.trace.empty()) j["trace"] = r.trace;
  return j;
}

}  // namespace wsal::lab
