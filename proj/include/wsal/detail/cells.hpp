#pragma once

#include <cstdint>
#include <vector>

#include "wsal/types.hpp"

// Piecewise-constant error profiles over the parameter space of a
// hypothesis class. Shared by the ERM solvers and the region index.
namespace wsal::detail {

/// Cells of the threshold line. Cell j holds thresholds in (values[j-1], values[j]]
/// with values[-1] = -inf and values[m] = +inf, so there are m + 1 cells.
struct ThresholdCells {
  std::vector<double> values;  // sorted distinct x of data and constraints
  std::vector<std::int64_t> errors_up;
  std::vector<std::int64_t> violations_up;
  std::vector<std::int64_t> errors_down;  // only for both orientations
  std::vector<std::int64_t> violations_down;  // violation vectors stay empty without constraints

  bool feasible_up(std::size_t j) const { return violations_up.empty() || violations_up[j] == 0; }
  bool feasible_down(std::size_t j) const { return violations_down.empty() || violations_down[j] == 0; }
};

ThresholdCells build_threshold_cells(const LabeledSet& data, const std::vector<LabeledExample>& constraints,
                                     bool both_orientations);

double threshold_representative(const std::vector<double>& values, std::size_t j);

/// Cells of the halfspace circle. Cell j is the open arc (B[j], B[j+1]) and
/// the last one wraps through zero. With no breakpoints there is one cell.
struct HalfspaceCells {
  std::vector<double> breakpoints;
  std::vector<std::int64_t> errors;  // excludes origin_errors
  std::vector<std::int64_t> violations;
  std::int64_t origin_errors = 0;
  bool origin_conflict = false;

  double representative(std::size_t j) const;
};

HalfspaceCells build_halfspace_cells(const LabeledSet& data, const std::vector<LabeledExample>& constraints);

}  // namespace wsal::detail
