#include "wsal/classifiers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wsal {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(const Point& p, int dim) {
  if (p.dim != dim) throw std::invalid_argument("predict: point dimension does not match classifier");
}
}  // namespace

int input_dimension(ClassId id) { return id == ClassId::halfspace ? 2 : 1; }

int vc_dimension(ClassId id) {
  switch (id) {
    case ClassId::threshold: return 1;
    case ClassId::signed_threshold: return 2;
    case ClassId::halfspace: return 2;
  }
  return 1;
}

int difference_vc_dimension(ClassId id) { return id == ClassId::halfspace ? 3 : 2; }

std::string to_string(ClassId id) {
  switch (id) {
    case ClassId::threshold: return "threshold";
    case ClassId::signed_threshold: return "signed-threshold";
    case ClassId::halfspace: return "halfspace";
  }
  return "?";
}

ClassId class_from_string(const std::string& name) {
  if (name == "threshold") return ClassId::threshold;
  if (name == "signed-threshold") return ClassId::signed_threshold;
  if (name == "halfspace") return ClassId::halfspace;
  throw std::invalid_argument("unknown hypothesis class: " + name);
}

double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

double wrap_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  return r >= kPi ? 0.0 : r;
}

double direction_angle(const Point& p) {
  if (p.x == 0.0 && p.y == 0.0) return 0.0;
  return wrap_two_pi(std::atan2(p.y, p.x));
}

double axis_angle(const Point& p) { return wrap_pi(direction_angle(p)); }

Label predict(const ThresholdClassifier& h, const Point& p) {
  require_dim(p, 1);
  const Label inside = label_from_int(h.orientation);
  return p.x >= h.threshold ? inside : flip(inside);
}

Label predict(const HalfspaceClassifier& h, const Point& p) {
  require_dim(p, 2);
  return std::cos(h.angle) * p.x + std::sin(h.angle) * p.y >= 0.0 ? Label::positive : Label::negative;
}

Label predict(const Classifier& h, const Point& p) {
  return std::visit([&](const auto& c) { return predict(c, p); }, h);
}

Label predict(const ConstantClassifier& h, const Point&) { return h.value; }

Label predict(const IntervalClassifier& h, const Point& p) {
  require_dim(p, 1);
  return h.lo <= p.x && p.x <= h.hi ? Label::positive : Label::negative;
}

bool wedge_contains(const WedgeClassifier& h, double psi) {
  double d = psi - h.start;
  if (d < 0.0) d += kPi;
  return d <= h.width;
}

Label predict(const WedgeClassifier& h, const Point& p) {
  require_dim(p, 2);
  if (p.x == 0.0 && p.y == 0.0) return Label::negative;
  return wedge_contains(h, axis_angle(p)) ? Label::positive : Label::negative;
}

Label predict(const DifferenceClassifier& h, const Point& p) {
  return std::visit([&](const auto& c) { return predict(c, p); }, h);
}

int dimension_of(const Classifier& h) { return std::holds_alternative<HalfspaceClassifier>(h) ? 2 : 1; }

bool is_constant(const DifferenceClassifier& h, Label value) {
  const auto* c = std::get_if<ConstantClassifier>(&h);
  return c != nullptr && c->value == value;
}

Fraction empirical_error(const Classifier& h, const LabeledSet& data) {
  if (data.empty()) throw std::invalid_argument("empirical_error: empty dataset");
  std::int64_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) wrong += predict(h, data.point(i)) != data.label(i);
  return Fraction(wrong, static_cast<std::int64_t>(data.size()));
}

Fraction empirical_error(const Classifier& h, const std::vector<LabeledExample>& data) {
  if (data.empty()) throw std::invalid_argument("empirical_error: empty dataset");
  std::int64_t wrong = 0;
  for (const auto& e : data) wrong += predict(h, e.point) != e.label;
  return Fraction(wrong, static_cast<std::int64_t>(data.size()));
}

Fraction empirical_disagreement(const Classifier& a, const Classifier& b, const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("empirical_disagreement: empty point list");
  std::int64_t differ = 0;
  for (const auto& p : points) differ += predict(a, p) != predict(b, p);
  return Fraction(differ, static_cast<std::int64_t>(points.size()));
}

DifferenceClassifier symmetric_difference(const Classifier& a, const Classifier& b) {
  return std::visit(
      overloaded{
          [](const ThresholdClassifier& x, const ThresholdClassifier& y) -> DifferenceClassifier {
            if (x.orientation != y.orientation) {
              throw std::invalid_argument("symmetric_difference: opposite orientations are not an interval");
            }
            if (x.threshold == y.threshold) return ConstantClassifier{Label::negative};
            return IntervalClassifier{std::min(x.threshold, y.threshold), std::max(x.threshold, y.threshold)};
          },
          [](const HalfspaceClassifier& x, const HalfspaceClassifier& y) -> DifferenceClassifier {
            double delta = std::remainder(y.angle - x.angle, kTwoPi);  // in [-pi, pi]
            if (delta == 0.0) return ConstantClassifier{Label::negative};
            const double from = wrap_pi(x.angle + kPi / 2.0);
            const double to = wrap_pi(y.angle + kPi / 2.0);
            return WedgeClassifier{delta > 0.0 ? from : to, std::abs(delta)};
          },
          [](const auto&, const auto&) -> DifferenceClassifier {
            throw std::invalid_argument("symmetric_difference: classifiers live in different spaces");
          }},
      a, b);
}

std::string describe(const Classifier& h) {
  std::ostringstream os;
  std::visit(overloaded{[&](const ThresholdClassifier& c) {
                          os << "threshold(t=" << c.threshold << ",o=" << (c.orientation > 0 ? "+1" : "-1") << ")";
                        },
                        [&](const HalfspaceClassifier& c) { os << "halfspace(angle=" << c.angle << ")"; }},
             h);
  return os.str();
}

std::string describe(const DifferenceClassifier& h) {
  std::ostringstream os;
  std::visit(overloaded{[&](const ConstantClassifier& c) { os << "constant(" << to_int(c.value) << ")"; },
                        [&](const IntervalClassifier& c) { os << "interval[" << c.lo << "," << c.hi << "]"; },
                        [&](const WedgeClassifier& c) {
                          os << "wedge(start=" << c.start << ",width=" << c.width << ")";
                        }},
             h);
  return os.str();
}

}  // namespace wsal
