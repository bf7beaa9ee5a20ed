#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distrep/errors.hpp"

namespace distrep {

// Seconds since the Unix epoch, UTC. All calendar math lives in timeutil.
using Instant = std::int64_t;

inline constexpr Instant kSecondsPerDay = 86400;

// One sensor reading. Glucose is in mg/dL.
struct CgmRecord {
  std::string subject_id;
  Instant timestamp = 0;
  double glucose = 0.0;
};

// One subject's readings, sorted by timestamp after cleaning.
struct CgmSeries {
  std::string subject_id;
  std::vector<CgmRecord> records;
  // Expected spacing between consecutive readings, seconds.
  Instant nominal_interval = 300;
};

// Density values over a shared, strictly increasing support grid.
struct Glucodensity {
  std::string subject_id;
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::size_t sample_size = 0;
};

// Quantile values q(p_k) over a shared probability grid. The probability
// grid uses half-offset points p_k = (k - 1/2) / M so that averages over it
// act as a midpoint rule for integrals over (0, 1).
struct QuantileFunction {
  std::string subject_id;
  std::vector<double> probs;
  std::vector<double> values;
};

// Returns {(k - 1/2) / m : k = 1..m}.
std::vector<double> default_prob_grid(std::size_t m = 500);

// Shared glucose support grid: 721 equally spaced points on [40, 400],
// spacing 0.5 mg/dL.
std::vector<double> default_support_grid();

// Proportions over ordered glycemic cells, summing to one.
struct Composition {
  std::string subject_id;
  std::vector<double> parts;
};

// Symmetric pairwise-distance matrix with optional row identities.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }

  double at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

  // Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(d_.data() + i * n_, n_);
  }

  std::vector<std::string> ids;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Outcome of a resampling-calibrated test.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  // Named intermediate quantities (group variances, decomposition terms, ...).
  std::vector<std::pair<std::string, double>> components;
};

}  // namespace distrep
