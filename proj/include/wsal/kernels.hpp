#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wsal/classifiers.hpp"
#include "wsal/region.hpp"
#include "wsal/types.hpp"

// Data-parallel loops of the harness. Every kernel has a serial reference
// and an OpenMP version; reductions use fixed blocks summed in block order,
// so both backends return bit-identical results for any thread count.
namespace wsal::kernels {

enum class Backend { serial, omp };

inline constexpr std::size_t kBlock = 4096;

/// out[i] = region.contains(xs[i]).
void region_mask(const DisagreementRegion& region, const std::vector<Point>& xs, std::vector<std::uint8_t>& out,
                 Backend backend);

struct PairedSums {
  double err_h = 0.0;       // sum of P(y != h(x))
  double err_ref = 0.0;     // sum of P(y != ref(x))
  double diff = 0.0;        // sum of the per-point differences
  double diff_sq = 0.0;     // sum of their squares
  double err_h_sq = 0.0;
  std::size_t n = 0;
};

/// Conditional-probability error sums of h and ref over xs, where p_plus[i] = P(+ | xs[i]).
PairedSums paired_error_sums(const Classifier& h, const Classifier& ref, const std::vector<Point>& xs,
                             const std::vector<double>& p_plus, Backend backend);

/// Per-bin sums of weights: out[bins[i]] += weights[i]. Bins outside [0, n_bins) are skipped.
void bin_sums(const std::vector<std::uint32_t>& bins, const std::vector<double>& weights, std::size_t n_bins,
              std::vector<double>& out, Backend backend);

namespace serial {
void region_mask(const DisagreementRegion& region, const std::vector<Point>& xs, std::vector<std::uint8_t>& out);
PairedSums paired_error_sums(const Classifier& h, const Classifier& ref, const std::vector<Point>& xs,
                             const std::vector<double>& p_plus);
void bin_sums(const std::vector<std::uint32_t>& bins, const std::vector<double>& weights, std::size_t n_bins,
              std::vector<double>& out);
}  // namespace serial

namespace omp {
void region_mask(const DisagreementRegion& region, const std::vector<Point>& xs, std::vector<std::uint8_t>& out);
PairedSums paired_error_sums(const Classifier& h, const Classifier& ref, const std::vector<Point>& xs,
                             const std::vector<double>& p_plus);
void bin_sums(const std::vector<std::uint32_t>& bins, const std::vector<double>& weights, std::size_t n_bins,
              std::vector<double>& out);
}  // namespace omp

}  // namespace wsal::kernels
