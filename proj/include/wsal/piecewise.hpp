#pragma once

#include <functional>
#include <vector>

namespace wsal {

/// A step function on [0, 1): value[i] holds on [start[i], start[i+1]).
/// Used both for conditional label laws P(+ | u) and for 0/1 prediction
/// profiles of classifiers, where u is the position on the line or the
/// direction angle divided by 2pi.
class PiecewiseLaw {
 public:
  explicit PiecewiseLaw(double value = 0.0) : starts_{0.0}, values_{value} {}

  /// Sets the value on [a, b) intersected with [0, 1).
  void assign(double a, double b, double value);
  /// Sets the value on the arc from a to b read modulo 1. Arcs of length >= 1 cover everything.
  void assign_cyclic(double a, double b, double value);

  double at(double u) const;
  const std::vector<double>& starts() const { return starts_; }
  const std::vector<double>& values() const { return values_; }

  /// Pointwise f(a(u), b(u)) on the common refinement.
  static PiecewiseLaw combine(const PiecewiseLaw& a, const PiecewiseLaw& b,
                              const std::function<double(double, double)>& f);
  PiecewiseLaw map(const std::function<double(double)>& f) const;

  /// Integral of the step function over [0, 1).
  double integral() const;
  /// Lebesgue measure of {u : value(u) satisfies pred}.
  double measure(const std::function<bool(double)>& pred) const;

 private:
  void normalize();

  std::vector<double> starts_;
  std::vector<double> values_;
};

}  // namespace wsal
