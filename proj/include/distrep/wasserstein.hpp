#pragma once

#include <optional>
#include <span>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

// 2-Wasserstein distance between one-dimensional distributions given by
// quantile functions on a shared probability grid:
//   sqrt( (1/M) sum_k (q1_k - q2_k)^2 ),
// the midpoint rule for the integral of the squared quantile difference.
double w2_distance(const QuantileFunction& q1, const QuantileFunction& q2);

// Wasserstein barycenter of one-dimensional distributions: the pointwise
// average of quantile values. Nondecreasing by construction.
QuantileFunction frechet_mean(std::span<const QuantileFunction> sample);

// (1/n) sum_i d^2(q_i, mean); mean defaults to frechet_mean(sample).
double frechet_variance(std::span<const QuantileFunction> sample,
                        const std::optional<QuantileFunction>& mean = std::nullopt);

// All pairwise distances. Fill is parallel over rows; entries do not depend
// on thread count.
DistanceMatrix distance_matrix(std::span<const QuantileFunction> sample, int threads = 1);

// Shared-grid check used by every consumer of cohorts of quantile functions.
void require_shared_grid(std::span<const QuantileFunction> sample);

}  // namespace distrep
