#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsal/bounds.hpp"
#include "wsal/classifiers.hpp"
#include "wsal/errors.hpp"
#include "wsal/region.hpp"
#include "wsal/world.hpp"

namespace wsal {

/// Which epsilon the difference-classifier trainer receives: the epoch's
/// eps_k as in the pseudocode, or eps_k / 128 as in the appendix analysis.
/// The region threshold stays 3 eps_k / 2 in both modes.
enum class EpsilonPassMode { main_text, appendix };

std::string to_string(EpsilonPassMode m);
EpsilonPassMode pass_mode_from_string(const std::string& s);

struct AlgoConfig {
  double target_epsilon = 0.05;
  double delta = 0.1;
  bounds::BoundParams bound_params;
  EpsilonPassMode epsilon_pass_mode = EpsilonPassMode::main_text;
  std::uint64_t max_unlabeled = 4'000'000'000ULL;  // per sampling loop
  int max_doubling_t = 34;
  bool retain_samples = false;  // keep every S_hat_k for diagnostics

  /// d and d' of the class, constant_scale = scale.
  static AlgoConfig for_class(ClassId id, double scale = 0.01);
  void validate() const;
};

struct BiasOptions {
  std::uint64_t max_draws = 1ULL << 34;
  double ucb_floor = 0.0;  // stop once the upper confidence bound drops below this (0 disables)
};

struct BiasEstimate {
  double p_hat = 0.0;
  std::uint64_t draws = 0;
  int stages = 0;
  bool below_floor = false;  // stopped by ucb_floor; p_hat then holds the bound
  double empirical = 0.0;    // frequency at the final stage
};

/// Doubling estimator: with probability 1 - delta the result satisfies p_hat <= p <= 2 p_hat.
BiasEstimate estimate_bias(const std::function<bool()>& coin, double delta, const BiasOptions& options = {});

struct DifferenceTraining {
  DifferenceClassifier h_df = ConstantClassifier{Label::positive};
  BiasEstimate bias;
  bool footnote = false;  // region mass bound fell below eps/64
  std::uint64_t m = 0;
  std::uint64_t fn_budget = 0;
  std::uint64_t rejected = 0;
  TripleSet triples;
};

/// Estimates the region mass, collects m in-region points labeled by both
/// oracles and fits the cost-sensitive difference classifier.
DifferenceTraining train_difference_classifier(World& world, const DisagreementRegion& region, double epsilon,
                                               double delta, const AlgoConfig& config, int epoch);

struct RoundLog {
  int t = 0;
  std::uint64_t n = 0;
  std::int64_t errors = 0;
  double sigma = 0.0;  // scaled radius used by the stopping rule
  double lhs = 0.0;    // sigma + sqrt(sigma * err)
};

struct AdaptiveResult {
  double sigma = 0.0;
  int t0 = 0;
  std::optional<ErmIndex> index;  // holds S_hat as samples()
  std::vector<RoundLog> rounds;
};

/// Doubling loop that labels in-region points by O or W as h_df directs and
/// the rest by the previous ERM, until sigma + sqrt(sigma err) <= eps / 512.
AdaptiveResult adaptive_active_learn(World& world, const DisagreementRegion& region, const DifferenceClassifier& h_df,
                                     double epsilon, double delta, const AlgoConfig& config, int epoch);

struct EpochState {
  int k = 0;
  double epsilon = 1.0;
  double delta = 0.0;
  double sigma = 0.0;
  int t0 = 0;
  Classifier h_hat;
  std::optional<DifferenceClassifier> h_df;
  std::int64_t errors = 0;  // err(h_hat, S_hat) numerator
  std::uint64_t sample_size = 0;
  std::optional<double> p_hat;
  bool footnote = false;
  std::uint64_t m1 = 0;
  std::uint64_t m2 = 0;
  std::uint64_t weak = 0;
  std::uint64_t fn_budget = 0;
  std::optional<LabeledSet> s_hat;
  std::optional<TripleSet> triples;
  std::optional<DisagreementRegion> region;  // the region this epoch sampled from
  std::vector<RoundLog> rounds;

  Fraction error() const { return Fraction(errors, static_cast<std::int64_t>(std::max<std::uint64_t>(sample_size, 1))); }
};

nlohmann::json trace_record(const EpochState& s);

struct RunResult {
  bool baseline = false;
  Classifier h;
  QueryLedger ledger;
  std::uint64_t n0 = 0;
  std::uint64_t initial_digest = 0;  // hash of the epoch-0 points and labels, in draw order
  std::vector<EpochState> states;
};

/// Thrown when a subroutine fails mid-run; carries everything completed so far.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& cause, RunResult partial)
      : Error("run aborted: " + cause), partial_(std::move(partial)), cause_(cause) {}
  const RunResult& partial() const { return partial_; }
  const std::string& cause() const { return cause_; }

 private:
  RunResult partial_;
  std::string cause_;
};

RunResult run_main(World& world, const AlgoConfig& config);
/// Same loop with h_df fixed to the constant +1 and no difference-classifier training.
RunResult run_dbal_baseline(World& world, const AlgoConfig& config);

}  // namespace wsal
