#include <algorithm>
#include <stdexcept>

#include "wsal/kernels.hpp"

namespace wsal::kernels {

namespace {
void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernels: input lengths differ");
}
}  // namespace

namespace serial {

void region_mask(const DisagreementRegion& region, const std::vector<Point>& xs, std::vector<std::uint8_t>& out) {
  out.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = region.contains(xs[i]);
}

PairedSums paired_error_sums(const Classifier& h, const Classifier& ref, const std::vector<Point>& xs,
                             const std::vector<double>& p_plus) {
  check_sizes(xs.size(), p_plus.size());
  PairedSums total;
  total.n = xs.size();
  for (std::size_t b = 0; b < xs.size(); b += kBlock) {
    PairedSums part;
    const std::size_t end = std::min(xs.size(), b + kBlock);
    for (std::size_t i = b; i < end; ++i) {
      const double p = p_plus[i];
      const double eh = predict(h, xs[i]) == Label::positive ? 1.0 - p : p;
      const double er = predict(ref, xs[i]) == Label::positive ? 1.0 - p : p;
      part.err_h += eh;
      part.err_ref += er;
      part.diff += eh - er;
      part.diff_sq += (eh - er) * (eh - er);
      part.err_h_sq += eh * eh;
    }
    total.err_h += part.err_h;
    total.err_ref += part.err_ref;
    total.diff += part.diff;
    total.diff_sq += part.diff_sq;
    total.err_h_sq += part.err_h_sq;
  }
  return total;
}

void bin_sums(const std::vector<std::uint32_t>& bins, const std::vector<double>& weights, std::size_t n_bins,
              std::vector<double>& out) {
  check_sizes(bins.size(), weights.size());
  out.assign(n_bins, 0.0);
  std::vector<double> part(n_bins);
  for (std::size_t b = 0; b < bins.size(); b += kBlock) {
    std::fill(part.begin(), part.end(), 0.0);
    const std::size_t end = std::min(bins.size(), b + kBlock);
    for (std::size_t i = b; i < end; ++i) {
      if (bins[i] < n_bins) part[bins[i]] += weights[i];
    }
    for (std::size_t j = 0; j < n_bins; ++j) out[j] += part[j];
  }
}

}  // namespace serial

void region_mask(const DisagreementRegion& region, const std::vector<Point>& xs, std::vector<std::uint8_t>& out,
                 Backend backend) {
  backend == Backend::omp ? omp::region_mask(region, xs, out) : serial::region_mask(region, xs, out);
}

PairedSums paired_error_sums(const Classifier& h, const Classifier& ref, const std::vector<Point>& xs,
                             const std::vector<double>& p_plus, Backend backend) {
  return backend == Backend::omp ? omp::paired_error_sums(h, ref, xs, p_plus)
                                 : serial::paired_error_sums(h, ref, xs, p_plus);
}

void bin_sums(const std::vector<std::uint32_t>& bins, const std::vector<double>& weights, std::size_t n_bins,
              std::vector<double>& out, Backend backend) {
  backend == Backend::omp ? omp::bin_sums(bins, weights, n_bins, out) : serial::bin_sums(bins, weights, n_bins, out);
}

}  // namespace wsal::kernels
