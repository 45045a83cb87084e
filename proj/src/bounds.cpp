#include "wsal/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wsal::bounds {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

std::uint64_t ceil_to_count(double value) {
  const double c = std::ceil(value);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

double sigma_at(std::uint64_t n, int d, double delta) {
  const double nn = static_cast<double>(n);
  return (8.0 / nn) * (2.0 * d * std::log(2.0 * std::numbers::e * nn / d) + std::log(24.0 / delta));
}

double fact1_sigma(std::uint64_t n, int d, double delta) {
  const double l = std::log2(static_cast<double>(n));
  return sigma_at(n, d, delta / (l * (l + 1.0)));
}

}  // namespace

void BoundParams::validate() const {
  require(d >= 1, "BoundParams: d must be >= 1");
  require(d_prime >= 1, "BoundParams: d_prime must be >= 1");
  require(constant_scale > 0.0 && std::isfinite(constant_scale), "BoundParams: constant_scale must be > 0");
}

double sigma(std::uint64_t n, int d, double delta) {
  require(n >= 1, "sigma: n must be >= 1");
  require(d >= 1, "sigma: d must be >= 1");
  require(delta > 0.0 && delta < 1.0, "sigma: delta must lie in (0,1)");
  return sigma_at(n, d, delta);
}

double gamma(std::uint64_t n, double delta) {
  require(n >= 1, "gamma: n must be >= 1");
  require(delta > 0.0 && delta <= 2.0, "gamma: delta must lie in (0,2]");
  return (4.0 / static_cast<double>(n)) * std::log(2.0 / delta);
}

double scaled_sigma(std::uint64_t n, int d, double delta, double scale) {
  require(scale > 0.0, "scaled_sigma: scale must be > 0");
  return scale * sigma(n, d, delta);
}

double min_n_upper_bound(double epsilon, int d, double delta) {
  require(epsilon > 0.0 && epsilon <= 1.0, "min_n_upper_bound: epsilon must lie in (0,1]");
  require(d >= 1, "min_n_upper_bound: d must be >= 1");
  require(delta > 0.0 && delta < 1.0, "min_n_upper_bound: delta must lie in (0,1)");
  return (64.0 / epsilon) * (d * std::log(512.0 / epsilon) + std::log(24.0 / delta));
}

std::uint64_t min_n_for_sigma(double epsilon, int d, double delta) {
  require(epsilon > 0.0 && epsilon <= 1.0, "min_n_for_sigma: epsilon must lie in (0,1]");
  require(d >= 1, "min_n_for_sigma: d must be >= 1");
  require(delta > 0.0 && delta < 1.0, "min_n_for_sigma: delta must lie in (0,1)");
  // log2(1) = 0 makes the confidence split undefined, so the search starts at 2.
  std::uint64_t lo = 1;  // sigma(lo) > eps, or lo is the sentinel below the domain
  std::uint64_t hi = 2;
  while (fact1_sigma(hi, d, delta) > epsilon) {
    lo = hi;
    hi *= 2;
    if (hi > (std::uint64_t{1} << 62)) throw std::overflow_error("min_n_for_sigma: search diverged");
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (fact1_sigma(mid, d, delta) <= epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

int epoch_count(double target_epsilon) {
  require(target_epsilon > 0.0, "epoch_count: epsilon must be > 0");
  if (target_epsilon >= 1.0) return 0;
  return static_cast<int>(std::ceil(std::log2(1.0 / target_epsilon)));
}

std::vector<EpochSpec> epoch_schedule(double target_epsilon, double delta) {
  require(delta > 0.0 && delta < 1.0, "epoch_schedule: delta must lie in (0,1)");
  const int k0 = epoch_count(target_epsilon);
  if (k0 > 62) throw std::domain_error("epoch_schedule: target epsilon too small");
  std::vector<EpochSpec> out;
  out.reserve(static_cast<std::size_t>(k0) + 1);
  out.push_back(EpochSpec{0, Fraction(1, 1), 1.0, delta / 4.0});
  for (int k = 1; k <= k0; ++k) {
    const double kp1 = static_cast<double>(k + 1);
    out.push_back(EpochSpec{k, Fraction(1, std::int64_t{1} << k), std::ldexp(1.0, -k), delta / (4.0 * kp1 * kp1)});
  }
  return out;
}

double diff_classifier_sample_size_raw(double p_hat, double epsilon, int d_prime, double delta) {
  require(p_hat > 0.0 && p_hat <= 1.0, "diff_classifier_sample_size: p_hat must lie in (0,1]");
  require(epsilon > 0.0, "diff_classifier_sample_size: epsilon must be > 0");
  require(d_prime >= 1, "diff_classifier_sample_size: d_prime must be >= 1");
  require(delta > 0.0 && delta < 1.0, "diff_classifier_sample_size: delta must lie in (0,1)");
  const double ratio = p_hat / epsilon;
  return (64.0 * 1024.0 * ratio) * (d_prime * std::log(512.0 * 1024.0 * ratio) + std::log(72.0 / delta));
}

std::uint64_t diff_classifier_sample_size(double p_hat, double epsilon, int d_prime, double delta, double scale) {
  require(scale > 0.0, "diff_classifier_sample_size: scale must be > 0");
  return ceil_to_count(scale * diff_classifier_sample_size_raw(p_hat, epsilon, d_prime, delta));
}

double initial_sample_size_raw(double delta, int d) {
  require(delta > 0.0 && delta < 1.0, "initial_sample_size: delta must lie in (0,1)");
  require(d >= 1, "initial_sample_size: d must be >= 1");
  constexpr double mega = 1024.0 * 1024.0;
  return (64.0 * mega) * (2.0 * d * std::log(512.0 * mega) + std::log(96.0 / delta));
}

std::uint64_t initial_sample_size(double delta, int d, double scale) {
  require(scale > 0.0, "initial_sample_size: scale must be > 0");
  return ceil_to_count(scale * initial_sample_size_raw(delta, d));
}

}  // namespace wsal::bounds
