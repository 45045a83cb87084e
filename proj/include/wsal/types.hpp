#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace wsal {

enum class Label : std::int8_t { negative = -1, positive = 1 };

constexpr Label flip(Label y) { return y == Label::positive ? Label::negative : Label::positive; }
constexpr int to_int(Label y) { return static_cast<int>(y); }
constexpr Label label_from_int(int v) { return v >= 0 ? Label::positive : Label::negative; }

/// A point of the input space: the unit interval (dim 1) or the unit disc (dim 2).
struct Point {
  double x = 0.0;
  double y = 0.0;
  int dim = 1;

  static constexpr Point line(double v) { return Point{v, 0.0, 1}; }
  static constexpr Point plane(double a, double b) { return Point{a, b, 2}; }

  double norm() const { return dim == 1 ? std::abs(x) : std::hypot(x, y); }
  friend bool operator==(const Point&, const Point&) = default;
};

struct LabeledExample {
  Point point;
  Label label = Label::positive;
};

struct TripleExample {
  Point point;
  Label strong = Label::positive;
  Label weak = Label::positive;
};

/// Column store of labeled points. Active-learning runs keep millions of
/// examples alive, so points are not stored as `LabeledExample` values.
class LabeledSet {
 public:
  explicit LabeledSet(int dim = 1) : dim_(dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("LabeledSet: dimension must be 1 or 2");
  }
  LabeledSet(int dim, std::initializer_list<LabeledExample> examples) : LabeledSet(dim) {
    for (const auto& e : examples) push_back(e.point, e.label);
  }
  static LabeledSet from_examples(int dim, const std::vector<LabeledExample>& examples) {
    LabeledSet s(dim);
    s.reserve(examples.size());
    for (const auto& e : examples) s.push_back(e.point, e.label);
    return s;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  void reserve(std::size_t n) {
    xs_.reserve(n);
    if (dim_ == 2) ys_.reserve(n);
    labels_.reserve(n);
  }
  void clear() {
    xs_.clear();
    ys_.clear();
    labels_.clear();
  }

  void push_back(const Point& p, Label y) {
    if (p.dim != dim_) throw std::invalid_argument("LabeledSet: point dimension mismatch");
    xs_.push_back(p.x);
    if (dim_ == 2) ys_.push_back(p.y);
    labels_.push_back(static_cast<std::int8_t>(y));
  }

  Point point(std::size_t i) const { return dim_ == 1 ? Point::line(xs_[i]) : Point::plane(xs_[i], ys_[i]); }
  Label label(std::size_t i) const { return static_cast<Label>(labels_[i]); }
  LabeledExample example(std::size_t i) const { return {point(i), label(i)}; }
  void set_label(std::size_t i, Label y) { labels_[i] = static_cast<std::int8_t>(y); }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<std::int8_t>& labels() const { return labels_; }

  std::vector<LabeledExample> to_examples() const {
    std::vector<LabeledExample> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(example(i));
    return out;
  }

 private:
  int dim_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<std::int8_t> labels_;
};

/// Points carrying both the strong and the weak label.
class TripleSet {
 public:
  explicit TripleSet(int dim = 1) : dim_(dim) {}
  TripleSet(int dim, std::initializer_list<TripleExample> examples) : dim_(dim) {
    for (const auto& e : examples) push_back(e);
  }

  int dim() const { return dim_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  void reserve(std::size_t n) { items_.reserve(n); }
  void push_back(const TripleExample& t) {
    if (t.point.dim != dim_) throw std::invalid_argument("TripleSet: point dimension mismatch");
    items_.push_back(t);
  }
  const TripleExample& operator[](std::size_t i) const { return items_[i]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::size_t disagreements() const {
    std::size_t n = 0;
    for (const auto& t : items_) n += t.strong != t.weak;
    return n;
  }

 private:
  int dim_;
  std::vector<TripleExample> items_;
};

}  // namespace wsal
