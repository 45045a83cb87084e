#include "wsal/erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wsal/detail/cells.hpp"
#include "wsal/detail/sort.hpp"
#include "wsal/errors.hpp"

namespace wsal {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

PositiveArc positive_arc(double phi) { return {wrap_two_pi(phi - kPi / 2.0), wrap_two_pi(phi + kPi / 2.0)}; }

namespace detail {

double threshold_representative(const std::vector<double>& values, std::size_t j) {
  if (j == 0) return -kInf;
  if (j == values.size()) return kInf;
  const double mid = 0.5 * (values[j - 1] + values[j]);
  return mid > values[j - 1] ? mid : values[j];
}

ThresholdCells build_threshold_cells(const LabeledSet& data, const std::vector<LabeledExample>& constraints,
                                     bool both_orientations) {
  struct Keyed {
    double key;
    std::int8_t label;
    std::int8_t constraint;
  };
  std::vector<Keyed> items;
  items.reserve(data.size() + constraints.size());
  const auto& xs = data.xs();
  const auto& ys = data.labels();
  for (std::size_t i = 0; i < data.size(); ++i) items.push_back({xs[i], ys[i], 0});
  for (const auto& c : constraints) {
    if (c.point.dim != 1) throw std::invalid_argument("cons_learn: constraint dimension mismatch");
    items.push_back({c.point.x, static_cast<std::int8_t>(c.label), 1});
  }
  sort_by_key<Keyed, &Keyed::key>(items);

  std::int64_t total_pos = 0, total_neg = 0, total_cpos = 0, total_cneg = 0;
  for (const auto& it : items) {
    const bool positive = it.label > 0;
    if (it.constraint) {
      (positive ? total_cpos : total_cneg) += 1;
    } else {
      (positive ? total_pos : total_neg) += 1;
    }
  }

  ThresholdCells cells;
  const bool constrained = !constraints.empty();
  // Cell j holds thresholds in (v[j-1], v[j]]: values with index >= j lie at or above the threshold.
  std::int64_t below_pos = 0, below_neg = 0, below_cpos = 0, below_cneg = 0;
  auto close_cell = [&] {
    const std::int64_t above_pos = total_pos - below_pos, above_neg = total_neg - below_neg;
    cells.errors_up.push_back(below_pos + above_neg);
    if (both_orientations) cells.errors_down.push_back(below_neg + above_pos);
    if (constrained) {
      const std::int64_t above_cpos = total_cpos - below_cpos, above_cneg = total_cneg - below_cneg;
      cells.violations_up.push_back(below_cpos + above_cneg);
      if (both_orientations) cells.violations_down.push_back(below_cneg + above_cpos);
    }
  };
  for (std::size_t i = 0; i < items.size();) {
    close_cell();
    const double v = items[i].key;
    for (; i < items.size() && items[i].key == v; ++i) {
      const bool positive = items[i].label > 0;
      if (items[i].constraint) {
        (positive ? below_cpos : below_cneg) += 1;
      } else {
        (positive ? below_pos : below_neg) += 1;
      }
    }
    cells.values.push_back(v);
  }
  close_cell();
  return cells;
}

HalfspaceCells build_halfspace_cells(const LabeledSet& data, const std::vector<LabeledExample>& constraints) {
  struct Event {
    double angle;
    std::int32_t derr;
    std::int32_t dviol;
  };
  std::vector<Event> events;
  events.reserve(2 * (data.size() + constraints.size()));
  HalfspaceCells cells;
  std::int64_t wrap_err = 0;
  std::int64_t wrap_viol = 0;

  auto add = [&](const Point& p, Label y, bool constraint) {
    if (p.x == 0.0 && p.y == 0.0) {
      // Every halfspace labels the origin +1.
      if (y == Label::negative) {
        if (constraint) {
          cells.origin_conflict = true;
        } else {
          ++cells.origin_errors;
        }
      }
      return;
    }
    const PositiveArc arc = positive_arc(direction_angle(p));
    const bool wrap_inside = arc.start > arc.end;
    const std::int32_t enter = y == Label::positive ? -1 : 1;
    const bool wrong_in_wrap = wrap_inside ? y == Label::negative : y == Label::positive;
    if (constraint) {
      wrap_viol += wrong_in_wrap;
      events.push_back({arc.start, 0, enter});
      events.push_back({arc.end, 0, -enter});
    } else {
      wrap_err += wrong_in_wrap;
      events.push_back({arc.start, enter, 0});
      events.push_back({arc.end, -enter, 0});
    }
  };
  for (std::size_t i = 0; i < data.size(); ++i) add(data.point(i), data.label(i), false);
  for (const auto& c : constraints) {
    if (c.point.dim != 2) throw std::invalid_argument("cons_learn: constraint dimension mismatch");
    add(c.point, c.label, true);
  }
  sort_by_key<Event, &Event::angle>(events);

  // Cell j is the open arc (B[j], B[j+1]); the last cell wraps through zero.
  std::int64_t err = wrap_err;
  std::int64_t viol = wrap_viol;
  for (std::size_t i = 0; i < events.size();) {
    const double b = events[i].angle;
    for (; i < events.size() && events[i].angle == b; ++i) {
      err += events[i].derr;
      viol += events[i].dviol;
    }
    cells.breakpoints.push_back(b);
    cells.errors.push_back(err);
    cells.violations.push_back(viol);
  }
  if (cells.breakpoints.empty()) {
    cells.errors.push_back(wrap_err);
    cells.violations.push_back(wrap_viol);
  }
  return cells;
}

double HalfspaceCells::representative(std::size_t j) const {
  const std::size_t m = breakpoints.size();
  if (m == 0) return 0.0;
  if (j + 1 < m) return 0.5 * (breakpoints[j] + breakpoints[j + 1]);
  return wrap_two_pi(0.5 * (breakpoints[m - 1] + breakpoints[0] + 2.0 * kPi));
}

}  // namespace detail

ErmSolution erm_solve(ClassId id, const LabeledSet& data, const std::vector<LabeledExample>& constraints) {
  if (data.dim() != input_dimension(id)) throw std::invalid_argument("erm: dataset dimension does not match class");
  const auto n = static_cast<std::int64_t>(data.size());

  if (id == ClassId::halfspace) {
    const auto cells = detail::build_halfspace_cells(data, constraints);
    if (cells.origin_conflict) throw Infeasible("cons_learn: origin constrained to -1");
    bool found = false;
    std::int64_t best = 0;
    double best_angle = 0.0;
    for (std::size_t j = 0; j < cells.errors.size(); ++j) {
      if (cells.violations[j] != 0) continue;
      const std::int64_t e = cells.errors[j] + cells.origin_errors;
      const double a = cells.representative(j);
      if (!found || e < best || (e == best && a < best_angle)) {
        found = true;
        best = e;
        best_angle = a;
      }
    }
    if (!found) throw Infeasible("cons_learn: no halfspace satisfies the constraints");
    return {HalfspaceClassifier{best_angle}, best, n};
  }

  const bool both = id == ClassId::signed_threshold;
  const auto cells = detail::build_threshold_cells(data, constraints, both);
  bool found = false;
  std::int64_t best = 0;
  std::size_t best_cell = 0;
  int best_orientation = 1;
  for (std::size_t j = 0; j < cells.errors_up.size(); ++j) {
    if (cells.feasible_up(j) && (!found || cells.errors_up[j] < best)) {
      found = true;
      best = cells.errors_up[j];
      best_cell = j;
      best_orientation = 1;
    }
    if (both && cells.feasible_down(j) && (!found || cells.errors_down[j] < best)) {
      found = true;
      best = cells.errors_down[j];
      best_cell = j;
      best_orientation = -1;
    }
  }
  if (!found) throw Infeasible("cons_learn: no threshold satisfies the constraints");
  return {ThresholdClassifier{detail::threshold_representative(cells.values, best_cell), best_orientation}, best, n};
}

Classifier cons_learn(ClassId id, const std::vector<LabeledExample>& constraints, const LabeledSet& data) {
  return erm_solve(id, data, constraints).h;
}

Classifier cons_learn(ClassId id, const std::vector<LabeledExample>& constraints,
                      const std::vector<LabeledExample>& data) {
  return erm_solve(id, LabeledSet::from_examples(input_dimension(id), data), constraints).h;
}

namespace {

DiffErmSolution count_solution(DifferenceClassifier h, const TripleSet& triples) {
  DiffErmSolution s{h, 0, 0};
  for (const auto& t : triples) {
    const bool positive = predict(h, t.point) == Label::positive;
    s.positives += positive;
    s.false_negatives += !positive && t.strong != t.weak;
  }
  return s;
}

DiffErmSolution diff_erm_line(const TripleSet& triples, std::int64_t budget) {
  std::vector<double> xs, dx;
  xs.reserve(triples.size());
  for (const auto& t : triples) {
    xs.push_back(t.point.x);
    if (t.strong != t.weak) dx.push_back(t.point.x);
  }
  const auto need = static_cast<std::int64_t>(dx.size()) - budget;
  if (need <= 0) return count_solution(ConstantClassifier{Label::negative}, triples);
  std::sort(xs.begin(), xs.end());
  std::sort(dx.begin(), dx.end());
  const auto k = static_cast<std::size_t>(need);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i + k <= dx.size(); ++i) {
    const double lo = dx[i], hi = dx[i + k - 1];
    const auto covered = std::upper_bound(xs.begin(), xs.end(), hi) - std::lower_bound(xs.begin(), xs.end(), lo);
    if (covered < best) {
      best = covered;
      best_i = i;
    }
  }
  return count_solution(IntervalClassifier{dx[best_i], dx[best_i + k - 1]}, triples);
}

DiffErmSolution diff_erm_plane(const TripleSet& triples, std::int64_t budget) {
  std::vector<double> psi, dpsi;
  psi.reserve(triples.size());
  std::int64_t origin_disagreements = 0;
  for (const auto& t : triples) {
    const bool differ = t.strong != t.weak;
    if (t.point.x == 0.0 && t.point.y == 0.0) {
      origin_disagreements += differ;
      continue;
    }
    const double a = axis_angle(t.point);
    psi.push_back(a);
    if (differ) dpsi.push_back(a);
  }
  // Wedges never cover the origin, so only the constant +1 absorbs those misses.
  if (origin_disagreements > budget) return count_solution(ConstantClassifier{Label::positive}, triples);
  const auto need = static_cast<std::int64_t>(dpsi.size()) - (budget - origin_disagreements);
  if (need <= 0) return count_solution(ConstantClassifier{Label::negative}, triples);
  std::sort(psi.begin(), psi.end());
  std::sort(dpsi.begin(), dpsi.end());
  const auto k = static_cast<std::size_t>(need);
  const std::size_t dn = dpsi.size();
  const auto total = static_cast<std::int64_t>(psi.size());
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  WedgeClassifier best_wedge;
  for (std::size_t i = 0; i < dn; ++i) {
    const std::size_t last = i + k - 1;
    const bool wraps = last >= dn;
    const double start = dpsi[i];
    const double end = dpsi[last % dn];
    double width = end - start;
    if (wraps || width < 0.0) width += kPi;
    std::int64_t covered;
    if (width >= kPi) {
      covered = total;
    } else if (!wraps && end >= start) {
      covered = std::upper_bound(psi.begin(), psi.end(), end) - std::lower_bound(psi.begin(), psi.end(), start);
    } else {
      covered = (total - (std::lower_bound(psi.begin(), psi.end(), start) - psi.begin())) +
                (std::upper_bound(psi.begin(), psi.end(), end) - psi.begin());
    }
    if (covered < best) {
      best = covered;
      best_wedge = WedgeClassifier{start, std::min(width, kPi)};
    }
  }
  return count_solution(best_wedge, triples);
}

}  // namespace

DiffErmSolution cost_sensitive_diff_erm_solve(ClassId id, const TripleSet& triples, std::uint64_t fn_budget) {
  if (triples.empty()) throw std::invalid_argument("cost_sensitive_diff_erm: no triples");
  if (triples.dim() != input_dimension(id)) {
    throw std::invalid_argument("cost_sensitive_diff_erm: triple dimension does not match class");
  }
  const auto budget = static_cast<std::int64_t>(std::min<std::uint64_t>(fn_budget, triples.size()));
  return id == ClassId::halfspace ? diff_erm_plane(triples, budget) : diff_erm_line(triples, budget);
}

DifferenceClassifier cost_sensitive_diff_erm(ClassId id, const TripleSet& triples, std::uint64_t fn_budget) {
  return cost_sensitive_diff_erm_solve(id, triples, fn_budget).h;
}

}  // namespace wsal
