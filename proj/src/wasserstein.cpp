#include "distrep/wasserstein.hpp"

#include <cmath>

#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"

namespace distrep {

namespace {

void check_same_grid(const QuantileFunction& a, const QuantileFunction& b) {
  if (a.probs.size() != b.probs.size()) {
    raise(Errc::grid_mismatch, "quantile functions use different grid sizes");
  }
  for (std::size_t k = 0; k < a.probs.size(); ++k) {
    if (a.probs[k] != b.probs[k]) {
      raise(Errc::grid_mismatch, "quantile functions use different probability grids");
    }
  }
}

}  // namespace

void require_shared_grid(std::span<const QuantileFunction> sample) {
  for (std::size_t i = 1; i < sample.size(); ++i) check_same_grid(sample[0], sample[i]);
}

double w2_distance(const QuantileFunction& q1, const QuantileFunction& q2) {
  check_same_grid(q1, q2);
  const std::size_t m = q1.values.size();
  if (m == 0) raise(Errc::empty_sample, "quantile function has no values");
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double d = q1.values[k] - q2.values[k];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(m));
}

QuantileFunction frechet_mean(std::span<const QuantileFunction> sample) {
  if (sample.empty()) raise(Errc::empty_sample, "Frechet mean of empty sample");
  require_shared_grid(sample);
  QuantileFunction mean;
  mean.probs = sample[0].probs;
  mean.values.assign(sample[0].values.size(), 0.0);
  for (const QuantileFunction& q : sample) {
    for (std::size_t k = 0; k < mean.values.size(); ++k) mean.values[k] += q.values[k];
  }
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (double& v : mean.values) v *= inv_n;
  return mean;
}

double frechet_variance(std::span<const QuantileFunction> sample,
                        const std::optional<QuantileFunction>& mean) {
  if (sample.empty()) raise(Errc::empty_sample, "Frechet variance of empty sample");
  const QuantileFunction center = mean ? *mean : frechet_mean(sample);
  double s = 0.0;
  for (const QuantileFunction& q : sample) {
    const double d = w2_distance(q, center);
    s += d * d;
  }
  return s / static_cast<double>(sample.size());
}

DistanceMatrix distance_matrix(std::span<const QuantileFunction> sample, int threads) {
  require_shared_grid(sample);
  const std::size_t n = sample.size();
  DistanceMatrix dm(n);
  dm.ids.reserve(n);
  for (const QuantileFunction& q : sample) dm.ids.push_back(q.subject_id);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Row i owns the (i, j) and mirrored (j, i) slots for all j > i; rows
      // are disjoint in the upper triangle, and every mirrored slot (j, i)
      // is written by exactly one row.
      dm.set(i, j, w2_distance(sample[i], sample[j]));
    }
  });
  return dm;
}

}  // namespace distrep
