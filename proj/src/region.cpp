#include "wsal/region.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

#include "wsal/detail/cells.hpp"
#include "wsal/errors.hpp"

namespace wsal {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest integer count difference allowed by tau on n examples: floor(tau * n).
std::int64_t slack_count(const Fraction& tau, std::int64_t n) {
  if (tau.num() < 0) return -1;
  const __int128 v = static_cast<__int128>(tau.num()) * n / tau.den();
  return v > std::numeric_limits<std::int64_t>::max() ? std::numeric_limits<std::int64_t>::max()
                                                      : static_cast<std::int64_t>(v);
}

// Threshold profile kept at bin resolution. Cell errors at the first value of
// every bin are exact. Bins are refined to exact cells only when their lower
// bound says they may hold the minimum or an end of the good-cell range.
struct ThresholdBins {
  struct Cell {
    double value;
    std::int64_t errors;
  };

  double origin = 0.0;
  double factor = 0.0;
  std::vector<std::int64_t> count;
  std::vector<std::int64_t> edge_errors;  // error of the cell at the bin's smallest value
  std::vector<std::int64_t> neg;
  std::vector<double> max_value;
  std::int64_t total_pos = 0;  // error of the final cell (v_m, +inf)

  std::size_t bins() const { return edge_errors.size(); }
  bool empty(std::size_t b) const { return count[b] == 0; }
  std::int64_t lower_bound(std::size_t b) const { return edge_errors[b] - neg[b]; }
  std::size_t bin_of(double v) const { return std::min(bins() - 1, static_cast<std::size_t>((v - origin) * factor)); }

  // Exact cells of every bin in `wanted`, gathered in one pass over the data.
  std::vector<std::vector<Cell>> refine(const LabeledSet& data, const std::vector<std::size_t>& wanted) const {
    std::vector<std::int32_t> slot(bins(), -1);
    for (std::size_t i = 0; i < wanted.size(); ++i) slot[wanted[i]] = static_cast<std::int32_t>(i);
    std::vector<std::vector<std::pair<double, std::int8_t>>> pts(wanted.size());
    for (std::size_t i = 0; i < wanted.size(); ++i) pts[i].reserve(static_cast<std::size_t>(count[wanted[i]]));
    const auto& x = data.xs();
    const auto& y = data.labels();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto k = slot[bin_of(x[i])];
      if (k >= 0) pts[static_cast<std::size_t>(k)].emplace_back(x[i], y[i]);
    }
    std::vector<std::vector<Cell>> out(wanted.size());
    for (std::size_t w = 0; w < wanted.size(); ++w) {
      auto& p = pts[w];
      std::sort(p.begin(), p.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
      std::int64_t e = edge_errors[wanted[w]];
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (i == 0 || p[i].first != p[i - 1].first) out[w].push_back({p[i].first, e});
        e += p[i].second > 0 ? 1 : -1;
      }
    }
    return out;
  }

  double prev_value(std::size_t b) const {
    for (std::size_t c = b; c-- > 0;) {
      if (!empty(c)) return max_value[c];
    }
    return -kInf;
  }
};

ThresholdBins build_bins(const LabeledSet& data) {
  ThresholdBins t;
  const auto n = static_cast<std::int64_t>(data.size());
  const auto& x = data.xs();
  const auto& y = data.labels();
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double width = *mx - *mn;
  const std::size_t nbins = width > 0.0 ? static_cast<std::size_t>(std::max<std::int64_t>(1, n / 4096)) : 1;
  t.origin = *mn;
  t.factor = width > 0.0 ? static_cast<double>(nbins) / width : 0.0;
  t.edge_errors.assign(nbins, 0);
  // One record per bin keeps the random-access pass to a single cache line per point.
  struct Acc {
    std::int64_t count = 0;
    std::int64_t pos = 0;
    double max = -kInf;
  };
  std::vector<Acc> acc(nbins);
  for (std::int64_t i = 0; i < n; ++i) {
    Acc& a = acc[t.bin_of(x[i])];
    ++a.count;
    a.pos += y[i] > 0;
    a.max = std::max(a.max, x[i]);
  }
  t.count.resize(nbins);
  t.neg.resize(nbins);
  t.max_value.resize(nbins);
  std::int64_t neg_total = 0;
  for (std::size_t b = 0; b < nbins; ++b) {
    t.count[b] = acc[b].count;
    t.neg[b] = acc[b].count - acc[b].pos;
    t.max_value[b] = acc[b].max;
    neg_total += t.neg[b];
  }
  std::int64_t pos_before = 0, neg_from = neg_total;
  for (std::size_t b = 0; b < nbins; ++b) {
    t.edge_errors[b] = pos_before + neg_from;
    pos_before += acc[b].pos;
    neg_from -= t.neg[b];
  }
  t.total_pos = pos_before;
  return t;
}

}  // namespace

struct ErmIndex::Data {
  ClassId id = ClassId::threshold;
  Classifier erm;
  std::int64_t min_errors = 0;
  std::int64_t n = 0;
  LabeledSet samples;
  ThresholdBins bins;
  std::vector<double> values;  // halfspace breakpoints
  std::vector<std::int64_t> errors;
};

bool in_disagreement_region(const LabeledSet& s_hat, const Fraction& tau, const Point& x, ClassId id) {
  if (s_hat.empty()) throw std::invalid_argument("in_disagreement_region: empty dataset");
  const ErmSolution base = erm_solve(id, s_hat);
  const Label forced = flip(predict(base.h, x));
  ErmSolution alt;
  try {
    alt = erm_solve(id, s_hat, {LabeledExample{x, forced}});
  } catch (const Infeasible&) {
    return false;
  }
  return alt.error() - base.error() <= tau;
}

ErmIndex::ErmIndex(ClassId id, LabeledSet data) {
  if (id == ClassId::signed_threshold) throw std::invalid_argument("ErmIndex: signed thresholds are not indexed");
  if (data.dim() != input_dimension(id)) throw std::invalid_argument("ErmIndex: dataset dimension mismatch");
  auto d = std::make_shared<Data>();
  d->id = id;
  d->n = static_cast<std::int64_t>(data.size());
  if (id == ClassId::threshold) {
    if (data.empty()) throw std::invalid_argument("ErmIndex: empty dataset");
    d->bins = build_bins(data);
    const auto& t = d->bins;
    std::int64_t upper = t.total_pos;
    for (std::size_t b = 0; b < t.bins(); ++b) {
      if (!t.empty(b)) upper = std::min(upper, t.edge_errors[b]);
    }
    // The first cell reaching the minimum wins, so every bin that could reach it is refined.
    std::vector<std::size_t> wanted;
    for (std::size_t b = 0; b < t.bins(); ++b) {
      if (!t.empty(b) && t.lower_bound(b) <= upper) wanted.push_back(b);
    }
    const auto refined = t.refine(data, wanted);
    std::optional<std::pair<double, double>> first;  // (previous value, value)
    std::int64_t best = t.total_pos;
    for (std::size_t w = 0; w < wanted.size(); ++w) {
      const auto& cells = refined[w];
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].errors < best || (cells[i].errors == best && !first)) {
          best = cells[i].errors;
          first = {i == 0 ? t.prev_value(wanted[w]) : cells[i - 1].value, cells[i].value};
        }
      }
    }
    d->min_errors = best;
    double rep = kInf;
    if (first) {
      const auto [prev, v] = *first;
      const double mid = 0.5 * (prev + v);
      rep = prev == -kInf ? -kInf : (mid > prev ? mid : v);
    }
    d->erm = ThresholdClassifier{rep, 1};
  } else {
    auto cells = detail::build_halfspace_cells(data, {});
    std::int64_t best = 0;
    double best_angle = 0.0;
    for (std::size_t j = 0; j < cells.errors.size(); ++j) {
      const std::int64_t e = cells.errors[j] + cells.origin_errors;
      const double a = cells.representative(j);
      if (j == 0 || e < best || (e == best && a < best_angle)) {
        best = e;
        best_angle = a;
      }
    }
    d->min_errors = best;
    d->erm = HalfspaceClassifier{best_angle};
    // Origin errors are shared by every cell, so relative comparisons ignore them.
    for (auto& e : cells.errors) e += cells.origin_errors;
    d->values = std::move(cells.breakpoints);
    d->errors = std::move(cells.errors);
  }
  d->samples = std::move(data);
  data_ = std::move(d);
}

ClassId ErmIndex::class_id() const { return data_->id; }
const Classifier& ErmIndex::erm() const { return data_->erm; }
std::int64_t ErmIndex::min_errors() const { return data_->min_errors; }
std::int64_t ErmIndex::size() const { return data_->n; }
const LabeledSet& ErmIndex::samples() const { return data_->samples; }

DisagreementRegion ErmIndex::region(const Fraction& tau) const {
  DisagreementRegion r;
  r.data_ = data_;
  r.tau_ = tau;
  const std::int64_t limit = data_->min_errors + slack_count(tau, data_->n);
  if (data_->id == ClassId::threshold) {
    const auto& t = data_->bins;
    r.lo_ = r.hi_ = 0.0;  // empty unless a good cell exists
    // Bins whose first cell is already good need no refinement for the lower end.
    std::vector<std::size_t> wanted;
    for (std::size_t b = 0; b < t.bins(); ++b) {
      if (!t.empty(b) && t.lower_bound(b) <= limit) wanted.push_back(b);
    }
    std::optional<double> lo;
    std::size_t lo_bin = 0;
    for (std::size_t b : wanted) {
      if (t.edge_errors[b] <= limit) {
        lo = t.prev_value(b);
        lo_bin = b;
        break;
      }
    }
    // The lower end lies before the first bin whose edge cell is good; the upper
    // end lies at or after the last such bin. Only candidates outside that span
    // (plus the last good-edge bin) need exact cells.
    std::optional<std::size_t> hi_bin;
    for (auto it = wanted.rbegin(); it != wanted.rend(); ++it) {
      if (t.edge_errors[*it] <= limit) {
        hi_bin = *it;
        break;
      }
    }
    std::vector<std::size_t> need;
    for (std::size_t b : wanted) {
      if (!lo || b < lo_bin || b >= *hi_bin) need.push_back(b);
    }
    std::sort(need.begin(), need.end());
    need.erase(std::unique(need.begin(), need.end()), need.end());
    const auto refined = t.refine(data_->samples, need);
    for (std::size_t w = 0; w < need.size() && (!lo || need[w] < lo_bin); ++w) {
      const auto& cells = refined[w];
      bool hit = false;
      for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i].errors <= limit) {
          lo = cells[i - 1].value;
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (!lo && t.total_pos <= limit) lo = t.prev_value(t.bins());
    if (!lo) return r;
    r.lo_ = *lo;
    if (t.total_pos <= limit) {
      r.hi_ = kInf;
      return r;
    }
    for (std::size_t w = need.size(); w-- > 0;) {
      const auto& cells = refined[w];
      for (std::size_t i = cells.size(); i-- > 0;) {
        if (cells[i].errors <= limit) {
          r.hi_ = cells[i].value;
          return r;
        }
      }
    }
  } else {
    const auto& e = data_->errors;
    const std::size_t m = e.size();
    r.good_prefix_.assign(2 * m + 1, 0);
    for (std::size_t i = 0; i < 2 * m; ++i) r.good_prefix_[i + 1] = r.good_prefix_[i] + (e[i % m] <= limit);
  }
  return r;
}

const Classifier& DisagreementRegion::erm() const { return data_->erm; }
ClassId DisagreementRegion::class_id() const { return data_->id; }

std::optional<std::pair<double, double>> DisagreementRegion::interval() const {
  if (data_->id != ClassId::threshold) return std::nullopt;
  return std::make_pair(lo_, hi_);
}

bool DisagreementRegion::contains(const Point& x) const {
  if (data_->id == ClassId::threshold) return lo_ < x.x && x.x < hi_;
  if (x.x == 0.0 && x.y == 0.0) return false;
  const auto& b = data_->values;
  const std::size_t m = data_->errors.size();
  if (b.empty()) return true;  // every halfspace has the same error, so all of them are in the set
  const PositiveArc arc = positive_arc(direction_angle(x));
  // Angles that flip the ERM label at x form an open arc (alpha, beta).
  const bool positive = predict(data_->erm, x) == Label::positive;
  const double alpha = positive ? arc.end : arc.start;
  const double beta = positive ? arc.start : arc.end;
  const auto ub_alpha = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), alpha) - b.begin());
  const auto lb_beta = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), beta) - b.begin());
  const std::size_t inside = alpha < beta ? lb_beta - std::min(lb_beta, ub_alpha) : (m - ub_alpha) + lb_beta;
  const std::size_t start = (ub_alpha + m - 1) % m;
  const std::size_t len = std::min(inside + 1, m);
  return good_prefix_[start + len] - good_prefix_[start] > 0;
}

}  // namespace wsal
