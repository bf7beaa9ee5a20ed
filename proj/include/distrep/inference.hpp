#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

// Cohort with group membership. Labels are 0-based group indices; CSV and
// CLI layers expose 1-based labels.
struct GroupedSample {
  std::vector<QuantileFunction> quantiles;
  std::vector<std::size_t> labels;

  std::size_t group_count() const;
  std::vector<std::size_t> group_sizes() const;
};

// Throws unless labels form a valid partition with every group nonempty.
void validate_grouped(const GroupedSample& sample);

struct AnovaComponents {
  double f_n = 0.0;
  double r_n = 0.0;
  double t_n = 0.0;
  double pooled_variance = 0.0;
  std::vector<double> group_variances;
  std::vector<double> group_sigma2;  // variance of the squared distances per group
  std::vector<double> lambdas;
};

// Frechet-variance decomposition statistic for k groups:
//   F_n = pooled variance minus the size-weighted group variances,
//   R_n = sum over group pairs of lambda_j lambda_l (V_j - V_l)^2 /
//         (sigma2_j sigma2_l),
//   T_n = n R_n / sum(lambda_j / sigma2_j) + n F_n^2 / sum(lambda_j sigma2_j).
// Requires each group's sigma2 > 0 (DegenerateGroupVariance otherwise).
AnovaComponents anova_statistic(const GroupedSample& sample);

// Calibrates T_n by an empirical bootstrap under the null: each replicate
// resamples n quantile functions with replacement from the pooled sample and
// refills the original group sizes. Replicates whose statistic is undefined
// (a constant resampled group) count as at least as extreme as the observed
// value. p = (1 + #{T* >= T_obs}) / (reps + 1).
TestResult anova_test(const GroupedSample& sample, std::size_t bootstrap_reps,
                      std::uint64_t seed, int threads = 1);

// Two-sample energy statistic with rho = d_W2, V-statistic normalization:
//   2 mean(cross) - mean(within a) - mean(within b),
// double sums over all index pairs including the diagonal.
double energy_statistic(std::span<const QuantileFunction> a,
                        std::span<const QuantileFunction> b);

// Permutation calibration of the two-sample statistic over pooled labels.
TestResult energy_permutation_test(std::span<const QuantileFunction> a,
                                   std::span<const QuantileFunction> b,
                                   std::size_t permutations, std::uint64_t seed,
                                   int threads = 1);

// k-sample energy statistic: sum over group pairs of
// (n_j n_l / 2n) [2 g_jl - g_jj - g_ll] with g the mean cross-distances.
double k_sample_energy(const GroupedSample& sample);

// Permutation calibration of the k-sample statistic.
TestResult k_sample_energy_test(const GroupedSample& sample, std::size_t permutations,
                                std::uint64_t seed, int threads = 1);

}  // namespace distrep
