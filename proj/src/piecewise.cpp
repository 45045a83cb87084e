#include "wsal/piecewise.hpp"

#include <algorithm>
#include <cmath>

namespace wsal {

void PiecewiseLaw::assign(double a, double b, double value) {
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (!(a < b)) return;
  const double after = b < 1.0 ? at(b) : 0.0;
  std::vector<double> s, v;
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    if (starts_[i] < a) {
      s.push_back(starts_[i]);
      v.push_back(values_[i]);
    }
  }
  s.push_back(a);
  v.push_back(value);
  if (b < 1.0) {
    s.push_back(b);
    v.push_back(after);
    for (std::size_t i = 0; i < starts_.size(); ++i) {
      if (starts_[i] > b) {
        s.push_back(starts_[i]);
        v.push_back(values_[i]);
      }
    }
  }
  starts_ = std::move(s);
  values_ = std::move(v);
  normalize();
}

void PiecewiseLaw::assign_cyclic(double a, double b, double value) {
  if (b - a >= 1.0) {
    assign(0.0, 1.0, value);
    return;
  }
  if (!(a < b)) return;
  const double shift = std::floor(a);
  a -= shift;
  b -= shift;
  if (b <= 1.0) {
    assign(a, b, value);
  } else {
    assign(a, 1.0, value);
    assign(0.0, b - 1.0, value);
  }
}

double PiecewiseLaw::at(double u) const {
  // Instance laws have a handful of pieces; a branchless count beats a
  // binary search that mispredicts on random queries.
  if (starts_.size() <= 16) {
    std::size_t k = 0;
    for (double s : starts_) k += s <= u;
    return values_[k == 0 ? 0 : k - 1];
  }
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), u);
  if (it == starts_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - starts_.begin()) - 1];
}

PiecewiseLaw PiecewiseLaw::combine(const PiecewiseLaw& a, const PiecewiseLaw& b,
                                   const std::function<double(double, double)>& f) {
  std::vector<double> s;
  std::merge(a.starts_.begin(), a.starts_.end(), b.starts_.begin(), b.starts_.end(), std::back_inserter(s));
  s.erase(std::unique(s.begin(), s.end()), s.end());
  PiecewiseLaw out;
  out.starts_ = s;
  out.values_.clear();
  for (double u : s) out.values_.push_back(f(a.at(u), b.at(u)));
  out.normalize();
  return out;
}

PiecewiseLaw PiecewiseLaw::map(const std::function<double(double)>& f) const {
  PiecewiseLaw out = *this;
  for (auto& v : out.values_) v = f(v);
  out.normalize();
  return out;
}

double PiecewiseLaw::integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    const double end = i + 1 < starts_.size() ? starts_[i + 1] : 1.0;
    total += (end - starts_[i]) * values_[i];
  }
  return total;
}

double PiecewiseLaw::measure(const std::function<bool(double)>& pred) const {
  double total = 0.0;
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    const double end = i + 1 < starts_.size() ? starts_[i + 1] : 1.0;
    if (pred(values_[i])) total += end - starts_[i];
  }
  return total;
}

void PiecewiseLaw::normalize() {
  std::vector<double> s, v;
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    const double end = i + 1 < starts_.size() ? starts_[i + 1] : 1.0;
    if (end <= starts_[i]) continue;  // empty piece
    if (!v.empty() && v.back() == values_[i]) continue;
    s.push_back(starts_[i]);
    v.push_back(values_[i]);
  }
  if (s.empty()) {
    s.push_back(0.0);
    v.push_back(values_.empty() ? 0.0 : values_.front());
  }
  s.front() = 0.0;
  starts_ = std::move(s);
  values_ = std::move(v);
}

}  // namespace wsal
