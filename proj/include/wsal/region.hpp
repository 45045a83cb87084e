#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "wsal/classifiers.hpp"
#include "wsal/erm.hpp"
#include "wsal/fraction.hpp"
#include "wsal/types.hpp"

namespace wsal {

/// Direct region test: x is inside iff forcing the opposite of the ERM label at
/// x costs at most tau in empirical error. Two full ERM solves per call.
/// Returns false when no class member can take the opposite label at x.
bool in_disagreement_region(const LabeledSet& s_hat, const Fraction& tau, const Point& x, ClassId id);

class DisagreementRegion;

/// Error profile of a dataset over the threshold or halfspace class, built
/// once so that region tests cost O(log n) instead of two ERM solves.
class ErmIndex {
 public:
  /// Takes the dataset by value and keeps it; the threshold index refines lazily from it.
  ErmIndex(ClassId id, LabeledSet data);

  ClassId class_id() const;
  const Classifier& erm() const;
  std::int64_t min_errors() const;
  std::int64_t size() const;
  const LabeledSet& samples() const;
  Fraction min_error() const { return Fraction(min_errors(), std::max<std::int64_t>(size(), 1)); }

  DisagreementRegion region(const Fraction& tau) const;

  struct Data;

 private:
  std::shared_ptr<const Data> data_;
};

/// The disagreement region of the empirical confidence set {h : err(h) - min err <= tau}.
class DisagreementRegion {
 public:
  bool contains(const Point& x) const;

  const Classifier& erm() const;
  ClassId class_id() const;
  Fraction tau() const { return tau_; }
  /// Open interval (lo, hi) for the threshold class.
  std::optional<std::pair<double, double>> interval() const;

 private:
  friend class ErmIndex;
  DisagreementRegion() = default;

  std::shared_ptr<const ErmIndex::Data> data_;
  Fraction tau_{0, 1};
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<std::int32_t> good_prefix_;  // halfspace: good-cell counts over the doubled cell sequence
};

}  // namespace wsal
