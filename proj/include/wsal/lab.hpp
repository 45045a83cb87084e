#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsal/engine.hpp"
#include "wsal/kernels.hpp"
#include "wsal/world.hpp"

namespace wsal::lab {

inline constexpr double kZ99 = 2.576;

struct ErrorEstimate {
  double estimate = 0.0;
  double ci = 0.0;  // 99% half-width
};

/// Monte Carlo err_D(h) on n_test fresh points. Each point contributes its
/// conditional error probability, so the ledger and label streams are untouched.
ErrorEstimate measure_error(const Classifier& h, const World& world, std::uint64_t n_test,
                            kernels::Backend backend = kernels::Backend::omp);

/// err_D(h) - err_D(h*) estimated on the same points for both classifiers.
ErrorEstimate measure_excess(const Classifier& h, const World& world, std::uint64_t n_test,
                             kernels::Backend backend = kernels::Backend::omp);

struct TrialOptions {
  std::uint64_t n_test = 200'000;
  bool with_baseline = false;
  bool trace = false;
  kernels::Backend backend = kernels::Backend::omp;
};

struct TrialResult {
  InstanceSpec instance;
  std::uint64_t seed = 0;
  double excess_error = 0.0;
  double ci = 0.0;
  double exact_excess = 0.0;
  QueryLedger ledger;
  std::vector<nlohmann::json> trace;  // one record per epoch
  std::optional<std::uint64_t> baseline_o_queries;
  std::optional<double> ratio;  // main / baseline O queries
  std::string error;  // empty on success
  double wall_time = 0.0;

  bool ok() const { return error.empty(); }
  /// Acceptance rule: estimate - CI <= epsilon.
  bool passed(double epsilon) const { return ok() && excess_error - ci <= epsilon; }
};

/// One seeded run of the main algorithm (and the baseline on a rebuilt world
/// when requested). Engine failures are reported in `error`, never thrown.
TrialResult run_trial(const InstanceSpec& instance, const AlgoConfig& config, const TrialOptions& options = {});

/// Main against baseline per seed, with identically seeded worlds.
std::vector<TrialResult> run_comparison(const InstanceSpec& instance, const AlgoConfig& config,
                                        const std::vector<std::uint64_t>& seeds, TrialOptions options = {},
                                        int workers = 1);

/// Every spec crossed with every seed, in that order. Rows run on up to
/// `workers` threads; output order never depends on scheduling.
std::vector<TrialResult> sweep(const std::vector<InstanceSpec>& grid, const std::vector<std::uint64_t>& seeds,
                               const AlgoConfig& config, const TrialOptions& options = {}, int workers = 1);

std::string csv_header();
std::string csv_row(const TrialResult& r);
std::string to_csv(const std::vector<TrialResult>& rows);

nlohmann::json to_json(const TrialResult& r);

// Geometry estimators.

/// Mass under U of {x : some h in B(h_star, r) labels x differently from h_star}.
double closed_form_dis_mass(ClassId id, const Classifier& h_star, double r);

struct ThetaSample {
  double r = 0.0;
  double theta_hat = 0.0;    // Monte Carlo
  double theta_exact = 0.0;  // from the closed-form mass
};

/// sup over r' in a 32-point log grid on [r, 1] of P(DIS(B(h*, r'))) / r'.
std::vector<ThetaSample> estimate_theta(const World& world, const Classifier& h_star, const std::vector<double>& radii,
                                        std::uint64_t n_mc);

struct AlphaSample {
  double r = 0.0;
  double eta = 0.0;
  double alpha_hat = 0.0;
};

/// Smallest positive mass on DIS(B(h*, r)) among grid members of the
/// difference class whose false-negative mass there is at most eta.
double estimate_alpha(const World& world, const Classifier& h_star, double r, double eta, std::uint64_t n_mc,
                      int grid = 256);

// Invariant diagnostics on a run made with retain_samples.

struct EpochDiagnostics {
  int k = 0;
  double invariant1_margin = 0.0;  // worst lhs - rhs over probes, <= 0 when the inequality holds
  bool stopping_rule_holds = false;
  double concentration_worst = 0.0;  // worst lhs - rhs of the pairwise bound over probe pairs
  bool invariant2_holds = false;
  double fn_mass = 0.0;
  double fn_bound = 0.0;
  double pos_mass = 0.0;
  double pos_bound = 0.0;
  bool footnote = false;
};

struct DiagnosticReport {
  double invariant1_margin = 0.0;
  std::vector<EpochDiagnostics> epochs;
  std::vector<ThetaSample> theta_hat;
  std::vector<AlphaSample> alpha_hat;
};

struct DiagnosticsOptions {
  std::uint64_t n_mc = 200'000;
  int probes = 64;
};

/// Throws Unavailable when the world's shadow labels are disabled and
/// std::invalid_argument when the run did not retain its samples.
DiagnosticReport check_invariants(const RunResult& run, World& world, const DiagnosticsOptions& options = {});

nlohmann::json to_json(const DiagnosticReport& r);

}  // namespace wsal::lab
