#pragma once

#include <cstdint>
#include <vector>

#include "wsal/classifiers.hpp"
#include "wsal/types.hpp"

namespace wsal {

struct ErmSolution {
  Classifier h;
  std::int64_t errors = 0;  // misclassified examples of the dataset
  std::int64_t n = 0;

  Fraction error() const { return n == 0 ? Fraction(0, 1) : Fraction(errors, n); }
};

/// Exact (constrained) empirical risk minimization over `id`.
///
/// Every classifier in the result satisfies all constraints. Among the
/// optimal members the smallest canonical parameter wins: the smallest
/// threshold (orientation +1 before -1) or the smallest angle in [0, 2pi).
/// Throws Infeasible when no member satisfies the constraints.
ErmSolution erm_solve(ClassId id, const LabeledSet& data, const std::vector<LabeledExample>& constraints = {});

Classifier cons_learn(ClassId id, const std::vector<LabeledExample>& constraints, const LabeledSet& data);
Classifier cons_learn(ClassId id, const std::vector<LabeledExample>& constraints,
                      const std::vector<LabeledExample>& data);

struct DiffErmSolution {
  DifferenceClassifier h;
  std::int64_t positives = 0;        // triples predicted +1
  std::int64_t false_negatives = 0;  // triples predicted -1 whose labels differ
};

/// Minimizes the number of predicted positives subject to at most
/// `fn_budget` disagreeing triples predicted -1. Ties go to the arc or
/// interval with the smallest start.
DiffErmSolution cost_sensitive_diff_erm_solve(ClassId id, const TripleSet& triples, std::uint64_t fn_budget);

DifferenceClassifier cost_sensitive_diff_erm(ClassId id, const TripleSet& triples, std::uint64_t fn_budget);

/// Boundaries [start, end] of the closed arc of halfspace angles that label
/// a point with direction phi as +1, each reduced to [0, 2pi).
struct PositiveArc {
  double start;
  double end;
};
PositiveArc positive_arc(double phi);

}  // namespace wsal
