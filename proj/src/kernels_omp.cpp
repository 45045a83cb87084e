#include <omp.h>

#include <algorithm>
#include <stdexcept>

#include "wsal/kernels.hpp"

namespace wsal::kernels::omp {

void region_mask(const DisagreementRegion& region, const std::vector<Point>& xs, std::vector<std::uint8_t>& out) {
  out.resize(xs.size());
  const auto n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = region.contains(xs[i]);
}

PairedSums paired_error_sums(const Classifier& h, const Classifier& ref, const std::vector<Point>& xs,
                             const std::vector<double>& p_plus) {
  if (xs.size() != p_plus.size()) throw std::invalid_argument("kernels: input lengths differ");
  const std::size_t blocks = (xs.size() + kBlock - 1) / kBlock;
  std::vector<PairedSums> parts(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    PairedSums part;
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(xs.size(), begin + kBlock);
    for (std::size_t i = begin; i < end; ++i) {
      const double p = p_plus[i];
      const double eh = predict(h, xs[i]) == Label::positive ? 1.0 - p : p;
      const double er = predict(ref, xs[i]) == Label::positive ? 1.0 - p : p;
      part.err_h += eh;
      part.err_ref += er;
      part.diff += eh - er;
      part.diff_sq += (eh - er) * (eh - er);
      part.err_h_sq += eh * eh;
    }
    parts[b] = part;
  }
  PairedSums total;
  total.n = xs.size();
  for (const auto& part : parts) {
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
  if (bins.size() != weights.size()) throw std::invalid_argument("kernels: input lengths differ");
  const std::size_t blocks = (bins.size() + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> parts(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    std::vector<double> part(n_bins, 0.0);
    const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
    const std::size_t end = std::min(bins.size(), begin + kBlock);
    for (std::size_t i = begin; i < end; ++i) {
      if (bins[i] < n_bins) part[bins[i]] += weights[i];
    }
    parts[b] = std::move(part);
  }
  out.assign(n_bins, 0.0);
  for (const auto& part : parts) {
    for (std::size_t j = 0; j < n_bins; ++j) out[j] += part[j];
  }
}

}  // namespace wsal::kernels::omp
