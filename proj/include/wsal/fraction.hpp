#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace wsal {

/// Exact non-negative-denominator rational used for empirical errors and
/// rejection thresholds. Comparisons cross-multiply in 128-bit arithmetic so
/// they never round.
class Fraction {
 public:
  constexpr Fraction() = default;
  constexpr Fraction(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("Fraction: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Fraction reduced() const {
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    return g == 0 ? Fraction(0, 1) : Fraction(num_ / g, den_ / g);
  }

  friend Fraction operator-(const Fraction& a, const Fraction& b) {
    if (a.den_ == b.den_) return Fraction(a.num_ - b.num_, a.den_);
    const __int128 n = static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_;
    const __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return narrow(n, d);
  }

  friend Fraction operator+(const Fraction& a, const Fraction& b) {
    if (a.den_ == b.den_) return Fraction(a.num_ + b.num_, a.den_);
    const __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    const __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return narrow(n, d);
  }

  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Fraction& a, const Fraction& b) { return (a <=> b) == 0; }

  friend std::ostream& operator<<(std::ostream& os, const Fraction& f) {
    return os << f.num_ << '/' << f.den_;
  }

 private:
  static Fraction narrow(__int128 n, __int128 d) {
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (d > INT64_MAX || n > INT64_MAX || n < INT64_MIN) throw std::overflow_error("Fraction overflow");
    return Fraction(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace wsal
