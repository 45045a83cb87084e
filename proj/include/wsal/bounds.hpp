#pragma once

#include <cstdint>
#include <vector>

#include "wsal/fraction.hpp"

// Concentration radii and sample-size schedules. Everything here is a pure
// function of its arguments.
namespace wsal::bounds {

struct BoundParams {
  int d = 1;                    // VC dimension of the target class
  int d_prime = 2;              // VC dimension of the difference class
  double constant_scale = 1.0;  // 1.0 reproduces the published constants

  void validate() const;
};

/// Normalized VC radius (8/n)(2d ln(2en/d) + ln(24/delta)).
double sigma(std::uint64_t n, int d, double delta);

/// Normalized Chernoff radius (4/n) ln(2/delta). Accepts delta up to 2, where it is zero.
double gamma(std::uint64_t n, double delta);

/// `scale * sigma(n, d, delta)`; the radius actually used by the stopping rules.
double scaled_sigma(std::uint64_t n, int d, double delta, double scale);

/// Closed-form upper bound (64/eps)(d ln(512/eps) + ln(24/delta)) on min_n_for_sigma.
double min_n_upper_bound(double epsilon, int d, double delta);

/// Smallest n >= 2 with sigma(n, d, delta / (log2 n (log2 n + 1))) <= epsilon.
std::uint64_t min_n_for_sigma(double epsilon, int d, double delta);

struct EpochSpec {
  int k = 0;
  Fraction epsilon_exact{1, 1};  // 2^-k
  double epsilon = 1.0;
  double delta = 0.0;
};

/// Epoch 0 followed by k = 1..k0 with k0 = ceil(log2(1/target_epsilon)); empty loop when target >= 1.
std::vector<EpochSpec> epoch_schedule(double target_epsilon, double delta);

int epoch_count(double target_epsilon);

/// Unscaled difference-classifier sample size before rounding.
double diff_classifier_sample_size_raw(double p_hat, double epsilon, int d_prime, double delta);

std::uint64_t diff_classifier_sample_size(double p_hat, double epsilon, int d_prime, double delta, double scale);

/// Unscaled size of the initial strong-labeled sample before rounding.
double initial_sample_size_raw(double delta, int d);

std::uint64_t initial_sample_size(double delta, int d, double scale);

}  // namespace wsal::bounds
