#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsal/classifiers.hpp"
#include "wsal/piecewise.hpp"
#include "wsal/rng.hpp"
#include "wsal/types.hpp"

namespace wsal {

enum class Family { threshold_1d, halfspace_2d };
enum class WeakMode { identical, boundary_disagree, adversarial, random_flip };

std::string to_string(Family f);
std::string to_string(WeakMode m);
Family family_from_string(const std::string& s);
WeakMode weak_mode_from_string(const std::string& s);

struct InstanceSpec {
  Family family = Family::threshold_1d;
  double nu = 0.1;  // err of the best classifier under O
  WeakMode weak_mode = WeakMode::identical;
  double g = 0.0;     // mass where W = -O (boundary-disagree)
  double p = 0.0;     // flip rate (random-flip)
  double beta = 0.0;  // weight of W inside the mixture oracle
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument for out-of-range values and Infeasible
  /// for combinations the flip-region construction cannot realize.
  void validate() const;
  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

enum class Bucket { none, initial, difference, adaptive };

struct EpochQueries {
  int k = 0;
  std::uint64_t m1 = 0;    // strong labels bought while training the difference classifier
  std::uint64_t m2 = 0;    // strong labels bought by the adaptive sampler
  std::uint64_t weak = 0;  // weak labels in this epoch
  std::uint64_t unlabeled = 0;
  friend bool operator==(const EpochQueries&, const EpochQueries&) = default;
};

/// Query accounting. Strong queries are the label complexity being measured.
class QueryLedger {
 public:
  void enter(int epoch, Bucket bucket);
  void record_strong();
  void record_weak();
  void record_unlabeled(std::uint64_t n);
  void record_routed_to_weak() { ++routed_to_weak_; }

  std::uint64_t strong_queries() const { return strong_; }
  std::uint64_t weak_queries() const { return weak_; }
  std::uint64_t unlabeled_draws() const { return unlabeled_; }
  std::uint64_t routed_to_weak() const { return routed_to_weak_; }
  std::uint64_t initial_queries() const { return initial_; }
  std::uint64_t unattributed_queries() const { return unattributed_; }
  const std::vector<EpochQueries>& epochs() const { return epochs_; }

  /// strong = n0 + sum of per-epoch m1 + m2 (+ queries made outside any epoch).
  bool conserved() const;
  friend bool operator==(const QueryLedger&, const QueryLedger&) = default;

 private:
  EpochQueries& current();

  std::uint64_t strong_ = 0;
  std::uint64_t weak_ = 0;
  std::uint64_t unlabeled_ = 0;
  std::uint64_t routed_to_weak_ = 0;
  std::uint64_t initial_ = 0;
  std::uint64_t unattributed_ = 0;
  int epoch_ = 0;
  Bucket bucket_ = Bucket::none;
  std::vector<EpochQueries> epochs_;
};

struct WorldOptions {
  std::uint64_t max_unlabeled = 0;  // 0 = unlimited
  bool benchmark_mode = false;      // disables shadow labels
};

/// Unlabeled sampler, strong oracle O (or the mixture O' when beta > 0),
/// weak oracle W and the query ledger of one trial.
///
/// Label laws depend on x only through u: u = x on the line, u = angle / 2pi in the disc.
/// Each label query reads exactly one uniform from the label stream, so two
/// oracles with the same law answer identically.
class World {
 public:
  explicit World(const InstanceSpec& spec, WorldOptions options = {});

  const InstanceSpec& spec() const { return spec_; }
  const WorldOptions& options() const { return options_; }
  int dim() const { return spec_.family == Family::threshold_1d ? 1 : 2; }
  ClassId class_id() const { return spec_.family == Family::threshold_1d ? ClassId::threshold : ClassId::halfspace; }

  void select_stream(const rng::StreamKey& key);
  /// Convenience: stream keyed by the world's own seed.
  void select_stream(int epoch, rng::Phase phase, std::uint64_t round = 0);

  Point sample_unlabeled();
  /// A draw from U on a caller-owned engine; the ledger is untouched.
  Point draw_point(rng::Engine& e) const;
  std::vector<Point> sample_unlabeled(std::size_t n);

  Label query_strong(const Point& x);
  Label query_weak(const Point& x);
  /// A label from the strong oracle's law that bypasses the ledger.
  Label shadow_strong_label(const Point& x);

  double coordinate(const Point& x) const;
  /// P(+ | x) under the oracle that defines the target distribution (O, or O' with beta > 0).
  double strong_probability(const Point& x) const { return target_law_.at(coordinate(x)); }
  double weak_probability(const Point& x) const { return weak_law_.at(coordinate(x)); }
  /// P(+ | x) under O alone.
  double oracle_probability(const Point& x) const { return oracle_law_.at(coordinate(x)); }

  const PiecewiseLaw& target_law() const { return target_law_; }
  const PiecewiseLaw& oracle_law() const { return oracle_law_; }
  const PiecewiseLaw& weak_law() const { return weak_law_; }

  /// Best classifier of the world's class under the target distribution.
  const Classifier& best_in_class() const { return best_; }
  double best_error() const { return best_error_; }
  /// Exact err under the target distribution.
  double exact_error(const Classifier& h) const;
  /// Mass of {x : P_W(+|x) != P_O(+|x)}.
  double disagreement_mass() const;

  QueryLedger& ledger() { return ledger_; }
  const QueryLedger& ledger() const { return ledger_; }

 private:
  Label draw(double p_plus);

  InstanceSpec spec_;
  WorldOptions options_;
  PiecewiseLaw oracle_law_;
  PiecewiseLaw weak_law_;
  PiecewiseLaw target_law_;
  Classifier best_;
  double best_error_ = 0.0;
  QueryLedger ledger_;
  rng::Engine sampler_{1};
  rng::Engine labels_{2};
  rng::Engine coins_{3};
  rng::Engine shadow_{4};
};

/// Copy of the instance whose strong oracle answers from W with probability beta.
World make_mixture_oracle(const World& world, double beta);

/// The disc instance with a wedge of W errors of mass g around the near-boundary flip wedge.
World build_case_study(double nu, double g, std::uint64_t seed);

/// 0/1 profile of the positive region of h over u.
PiecewiseLaw positive_profile(const Classifier& h);
PiecewiseLaw positive_profile(const DifferenceClassifier& h);

/// Smallest disagreement with h (under U) that a class member needs in order to flip its label at x.
double flip_cost(const Classifier& h, const Point& x);

}  // namespace wsal
