#pragma once

#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "wsal/fraction.hpp"
#include "wsal/types.hpp"

namespace wsal {

/// Hypothesis classes the learners can search over.
enum class ClassId {
  threshold,         // x >= t  ->  +1
  signed_threshold,  // both orientations
  halfspace,         // homogeneous separator in the plane
};

int input_dimension(ClassId id);
int vc_dimension(ClassId id);
/// VC dimension of the matching difference class (intervals: 2, double wedges: 3).
int difference_vc_dimension(ClassId id);
std::string to_string(ClassId id);
ClassId class_from_string(const std::string& name);

/// Predicts `orientation` iff x >= threshold. The threshold may be +-infinity.
struct ThresholdClassifier {
  double threshold = 0.0;
  int orientation = 1;
  friend bool operator==(const ThresholdClassifier&, const ThresholdClassifier&) = default;
};

/// Predicts +1 iff cos(angle) x + sin(angle) y >= 0, so the origin is always +1.
struct HalfspaceClassifier {
  double angle = 0.0;
  friend bool operator==(const HalfspaceClassifier&, const HalfspaceClassifier&) = default;
};

using Classifier = std::variant<ThresholdClassifier, HalfspaceClassifier>;

struct ConstantClassifier {
  Label value = Label::positive;
  friend bool operator==(const ConstantClassifier&, const ConstantClassifier&) = default;
};

/// Closed interval [lo, hi] predicting +1 inside.
struct IntervalClassifier {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const IntervalClassifier&, const IntervalClassifier&) = default;
};

/// Double wedge: points whose axis angle (direction mod pi) lies in the
/// closed arc [start, start + width] taken mod pi. The origin predicts -1.
struct WedgeClassifier {
  double start = 0.0;
  double width = 0.0;
  friend bool operator==(const WedgeClassifier&, const WedgeClassifier&) = default;
};

using DifferenceClassifier = std::variant<ConstantClassifier, IntervalClassifier, WedgeClassifier>;

/// Direction of p in [0, 2pi). The origin maps to 0.
double direction_angle(const Point& p);
/// Direction of p mod pi, in [0, pi).
double axis_angle(const Point& p);
/// Reduces an angle to [0, 2pi).
double wrap_two_pi(double a);
/// Reduces an angle to [0, pi).
double wrap_pi(double a);

Label predict(const ThresholdClassifier& h, const Point& p);
Label predict(const HalfspaceClassifier& h, const Point& p);
Label predict(const Classifier& h, const Point& p);

Label predict(const ConstantClassifier& h, const Point& p);
Label predict(const IntervalClassifier& h, const Point& p);
Label predict(const WedgeClassifier& h, const Point& p);
Label predict(const DifferenceClassifier& h, const Point& p);

/// Same as predict on an axis angle already reduced by `axis_angle`.
bool wedge_contains(const WedgeClassifier& h, double psi);

int dimension_of(const Classifier& h);
bool is_constant(const DifferenceClassifier& h, Label value);

Fraction empirical_error(const Classifier& h, const LabeledSet& data);
Fraction empirical_error(const Classifier& h, const std::vector<LabeledExample>& data);
Fraction empirical_disagreement(const Classifier& a, const Classifier& b, const std::vector<Point>& points);

/// The region where a and b disagree, as a member of the difference class.
/// Boundary points may differ from the exact symmetric difference.
DifferenceClassifier symmetric_difference(const Classifier& a, const Classifier& b);

std::string describe(const Classifier& h);
std::string describe(const DifferenceClassifier& h);

}  // namespace wsal
