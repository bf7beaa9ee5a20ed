#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace distrep {

// Euclidean projection of y onto the nondecreasing cone: the minimizer of
// Σ (z_i - y_i)² subject to z_1 ≤ ... ≤ z_n. Pool-adjacent-violators with
// block merging; each merged block takes its mean value.
inline std::vector<double> isotonic_projection(std::span<const double> y) {
  const std::size_t n = y.size();
  std::vector<double> value;   // block means
  std::vector<std::size_t> len;  // block lengths
  value.reserve(n);
  len.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    value.push_back(y[i]);
    len.push_back(1);
    while (value.size() > 1 && value[value.size() - 2] > value.back()) {
      const double merged = (value[value.size() - 2] * static_cast<double>(len[len.size() - 2]) +
                             value.back() * static_cast<double>(len.back())) /
                            static_cast<double>(len[len.size() - 2] + len.back());
      len[len.size() - 2] += len.back();
      value[value.size() - 2] = merged;
      value.pop_back();
      len.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < value.size(); ++b) {
    out.insert(out.end(), len[b], value[b]);
  }
  return out;
}

}  // namespace distrep
