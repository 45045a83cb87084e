#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#include <boost/sort/spreadsort/float_sort.hpp>

namespace wsal::detail {

/// Sorts records by a double member. Large inputs go through a radix-style
/// float sort; order among equal keys is unspecified.
template <class T, double T::*Key>
void sort_by_key(std::vector<T>& v) {
  if (v.size() < 4096) {
    std::sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.*Key < b.*Key; });
    return;
  }
  auto shift = [](const T& a, unsigned offset) {
    std::int64_t bits;
    std::memcpy(&bits, &(a.*Key), sizeof bits);
    return bits >> offset;
  };
  boost::sort::spreadsort::float_sort(v.begin(), v.end(), shift,
                                      [](const T& a, const T& b) { return a.*Key < b.*Key; });
}

}  // namespace wsal::detail
