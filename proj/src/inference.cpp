#include "distrep/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"
#include "distrep/rng.hpp"
#include "distrep/wasserstein.hpp"

namespace distrep {

namespace {

std::vector<std::vector<std::size_t>> members_by_group(const GroupedSample& sample) {
  std::vector<std::vector<std::size_t>> groups(sample.group_count());
  for (std::size_t i = 0; i < sample.labels.size(); ++i) {
    groups[sample.labels[i]].push_back(i);
  }
  return groups;
}

// Inner-product matrix of quantile values under the midpoint rule:
// gram(i, j) = (1/M) sum_k q_i(k) q_j(k). Squared Wasserstein distances to
// any weighted average of sample elements reduce to gram lookups, which
// makes bootstrap replicates O(n^2) instead of O(n^2 M).
Mat gram_matrix(std::span<const QuantileFunction> sample, int threads) {
  const std::size_t n = sample.size();
  const std::size_t m = sample.empty() ? 0 : sample[0].values.size();
  Mat gram(n, n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += sample[i].values[k] * sample[j].values[k];
      s /= static_cast<double>(m);
      gram(i, j) = s;
      gram(j, i) = s;
    }
  });
  return gram;
}

// ANOVA statistic evaluated through the gram matrix for an arbitrary
// multiset assignment of pooled indices to groups.
class GramAnova {
 public:
  explicit GramAnova(Mat gram) : gram_(std::move(gram)) {}

  // Returns nullopt when some group's sigma2 is not positive (degenerate).
  std::optional<AnovaComponents> components(
      const std::vector<std::vector<std::size_t>>& groups) const {
    const std::size_t k = groups.size();
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();

    AnovaComponents out;
    out.group_variances.resize(k);
    out.group_sigma2.resize(k);
    out.lambdas.resize(k);

    // Pooled squared distances need the pooled mean; accumulate its gram
    // cross terms from the flattened index list.
    std::vector<std::size_t> pooled;
    pooled.reserve(n);
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());

    double pooled_quad = 0.0;  // (1/n^2) sum over pooled pairs of gram
    {
      double s = 0.0;
      for (const std::size_t i : pooled) {
        for (const std::size_t j : pooled) s += gram_(i, j);
      }
      pooled_quad = s / (static_cast<double>(n) * static_cast<double>(n));
    }
    double pooled_var_sum = 0.0;
    for (const std::size_t i : pooled) {
      double cross = 0.0;
      for (const std::size_t j : pooled) cross += gram_(i, j);
      cross /= static_cast<double>(n);
      pooled_var_sum += gram_(i, i) - 2.0 * cross + pooled_quad;
    }
    out.pooled_variance = pooled_var_sum / static_cast<double>(n);

    for (std::size_t g = 0; g < k; ++g) {
      const auto& idx = groups[g];
      const double s = static_cast<double>(idx.size());
      double quad = 0.0;
      for (const std::size_t i : idx) {
        for (const std::size_t j : idx) quad += gram_(i, j);
      }
      quad /= s * s;
      double v_sum = 0.0;
      std::vector<double> d2(idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a) {
        double cross = 0.0;
        for (const std::size_t j : idx) cross += gram_(idx[a], j);
        cross /= s;
        d2[a] = gram_(idx[a], idx[a]) - 2.0 * cross + quad;
        v_sum += d2[a];
      }
      const double v = v_sum / s;
      double sig = 0.0;
      for (const double d : d2) sig += (d - v) * (d - v);
      sig /= s;
      out.group_variances[g] = v;
      out.group_sigma2[g] = sig;
      out.lambdas[g] = s / static_cast<double>(n);
      if (!(sig > 0.0)) return std::nullopt;
    }

    finish_statistic(static_cast<double>(n), out);
    return out;
  }

 private:
  static void finish_statistic(double n, AnovaComponents& out) {
    const std::size_t k = out.group_variances.size();
    double f = out.pooled_variance;
    for (std::size_t g = 0; g < k; ++g) f -= out.lambdas[g] * out.group_variances[g];
    double r = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
      for (std::size_t l = g + 1; l < k; ++l) {
        const double dv = out.group_variances[g] - out.group_variances[l];
        r += (out.lambdas[g] * out.lambdas[l]) / (out.group_sigma2[g] * out.group_sigma2[l]) *
             dv * dv;
      }
    }
    double inv_scale = 0.0;
    double scale = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
      inv_scale += out.lambdas[g] / out.group_sigma2[g];
      scale += out.lambdas[g] * out.group_sigma2[g];
    }
    out.f_n = f;
    out.r_n = r;
    out.t_n = n * r / inv_scale + n * f * f / scale;
  }

  Mat gram_;
};

// Direct quantile-space evaluation; group sums are accumulated per group so
// that bitwise-identical groups give exactly zero F_n, R_n, T_n.
AnovaComponents anova_components_direct(const GroupedSample& sample) {
  const auto groups = members_by_group(sample);
  const std::size_t k = groups.size();
  const std::size_t n = sample.quantiles.size();
  const std::size_t m = sample.quantiles[0].values.size();

  std::vector<std::vector<double>> group_means(k);
  AnovaComponents out;
  out.group_variances.resize(k);
  out.group_sigma2.resize(k);
  out.lambdas.resize(k);

  for (std::size_t g = 0; g < k; ++g) {
    const auto& idx = groups[g];
    std::vector<double> mu(m, 0.0);
    for (const std::size_t i : idx) {
      for (std::size_t kk = 0; kk < m; ++kk) mu[kk] += sample.quantiles[i].values[kk];
    }
    for (double& v : mu) v /= static_cast<double>(idx.size());
    group_means[g] = std::move(mu);
    out.lambdas[g] = static_cast<double>(idx.size()) / static_cast<double>(n);
  }

  std::vector<double> pooled_mean(m, 0.0);
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t kk = 0; kk < m; ++kk) pooled_mean[kk] += out.lambdas[g] * group_means[g][kk];
  }

  const auto sq_dist = [m](const std::vector<double>& values, const std::vector<double>& center) {
    double s = 0.0;
    for (std::size_t kk = 0; kk < m; ++kk) {
      const double d = values[kk] - center[kk];
      s += d * d;
    }
    return s / static_cast<double>(m);
  };

  double pooled_sum = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const auto& idx = groups[g];
    double part = 0.0;
    for (const std::size_t i : idx) part += sq_dist(sample.quantiles[i].values, pooled_mean);
    pooled_sum += part;
  }
  out.pooled_variance = pooled_sum / static_cast<double>(n);

  for (std::size_t g = 0; g < k; ++g) {
    const auto& idx = groups[g];
    std::vector<double> d2(idx.size());
    double v_sum = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      d2[a] = sq_dist(sample.quantiles[idx[a]].values, group_means[g]);
      v_sum += d2[a];
    }
    const double v = v_sum / static_cast<double>(idx.size());
    double sig = 0.0;
    for (const double d : d2) sig += (d - v) * (d - v);
    sig /= static_cast<double>(idx.size());
    out.group_variances[g] = v;
    out.group_sigma2[g] = sig;
    if (!(sig > 0.0)) {
      raise(Errc::degenerate_group_variance,
            "group " + std::to_string(g + 1) + " has constant squared distances");
    }
  }

  double f = out.pooled_variance;
  for (std::size_t g = 0; g < k; ++g) f -= out.lambdas[g] * out.group_variances[g];
  double r = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    for (std::size_t l = g + 1; l < k; ++l) {
      const double dv = out.group_variances[g] - out.group_variances[l];
      r += (out.lambdas[g] * out.lambdas[l]) / (out.group_sigma2[g] * out.group_sigma2[l]) * dv *
           dv;
    }
  }
  double inv_scale = 0.0;
  double scale = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    inv_scale += out.lambdas[g] / out.group_sigma2[g];
    scale += out.lambdas[g] * out.group_sigma2[g];
  }
  out.f_n = f;
  out.r_n = r;
  out.t_n = static_cast<double>(n) * r / inv_scale +
            static_cast<double>(n) * f * f / scale;
  return out;
}

void append_components(TestResult& result, const AnovaComponents& c) {
  result.components.emplace_back("f_n", c.f_n);
  result.components.emplace_back("r_n", c.r_n);
  result.components.emplace_back("pooled_variance", c.pooled_variance);
  for (std::size_t g = 0; g < c.group_variances.size(); ++g) {
    const std::string tag = std::to_string(g + 1);
    result.components.emplace_back("group_variance_" + tag, c.group_variances[g]);
    result.components.emplace_back("group_sigma2_" + tag, c.group_sigma2[g]);
    result.components.emplace_back("lambda_" + tag, c.lambdas[g]);
  }
}

// Two-sample energy statistic from a pooled distance matrix and an index
// split. V-statistic normalization (diagonals included).
double energy_from_matrix(const DistanceMatrix& dm, std::span<const std::size_t> a,
                          std::span<const std::size_t> b) {
  double within_a = 0.0;
  for (const std::size_t i : a) {
    for (const std::size_t j : a) within_a += dm.at(i, j);
  }
  within_a /= static_cast<double>(a.size()) * static_cast<double>(a.size());
  double within_b = 0.0;
  for (const std::size_t i : b) {
    for (const std::size_t j : b) within_b += dm.at(i, j);
  }
  within_b /= static_cast<double>(b.size()) * static_cast<double>(b.size());
  double cross = 0.0;
  for (const std::size_t i : a) {
    for (const std::size_t j : b) cross += dm.at(i, j);
  }
  cross /= static_cast<double>(a.size()) * static_cast<double>(b.size());
  return 2.0 * cross - within_a - within_b;
}

double k_sample_energy_from_matrix(const DistanceMatrix& dm,
                                   const std::vector<std::vector<std::size_t>>& groups,
                                   std::size_t n) {
  const std::size_t k = groups.size();
  // Mean cross/within distances g_jl.
  std::vector<std::vector<double>> g(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j; l < k; ++l) {
      double s = 0.0;
      for (const std::size_t a : groups[j]) {
        for (const std::size_t b : groups[l]) s += dm.at(a, b);
      }
      s /= static_cast<double>(groups[j].size()) * static_cast<double>(groups[l].size());
      g[j][l] = s;
      g[l][j] = s;
    }
  }
  double stat = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      const double nj = static_cast<double>(groups[j].size());
      const double nl = static_cast<double>(groups[l].size());
      stat += nj * nl / (2.0 * static_cast<double>(n)) *
              (2.0 * g[j][l] - g[j][j] - g[l][l]);
    }
  }
  return stat;
}

}  // namespace

std::size_t GroupedSample::group_count() const {
  std::size_t k = 0;
  for (const std::size_t l : labels) k = std::max(k, l + 1);
  return k;
}

std::vector<std::size_t> GroupedSample::group_sizes() const {
  std::vector<std::size_t> sizes(group_count(), 0);
  for (const std::size_t l : labels) ++sizes[l];
  return sizes;
}

void validate_grouped(const GroupedSample& sample) {
  if (sample.quantiles.empty()) raise(Errc::empty_sample, "grouped sample is empty");
  if (sample.quantiles.size() != sample.labels.size()) {
    raise(Errc::dimension_mismatch, "labels/quantiles size mismatch");
  }
  require_shared_grid(sample.quantiles);
  const auto sizes = sample.group_sizes();
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    if (sizes[g] == 0) {
      raise(Errc::invalid_argument, "group " + std::to_string(g + 1) + " is empty");
    }
  }
}

AnovaComponents anova_statistic(const GroupedSample& sample) {
  validate_grouped(sample);
  const auto sizes = sample.group_sizes();
  if (sizes.size() < 2) raise(Errc::invalid_argument, "ANOVA needs at least two groups");
  for (const std::size_t s : sizes) {
    // Two-member groups always have equal squared distances to their mean,
    // so the within-group variance estimate degenerates to zero.
    if (s < 3) raise(Errc::invalid_argument, "every group needs at least three members");
  }
  return anova_components_direct(sample);
}

TestResult anova_test(const GroupedSample& sample, std::size_t bootstrap_reps,
                      std::uint64_t seed, int threads) {
  validate_grouped(sample);
  const auto sizes = sample.group_sizes();
  if (sizes.size() < 2) raise(Errc::invalid_argument, "ANOVA needs at least two groups");
  for (const std::size_t s : sizes) {
    // Two-member groups always have equal squared distances to their mean,
    // so the within-group variance estimate degenerates to zero.
    if (s < 3) raise(Errc::invalid_argument, "every group needs at least three members");
  }
  if (bootstrap_reps == 0) raise(Errc::invalid_argument, "bootstrap needs >= 1 replicate");

  const std::size_t n = sample.quantiles.size();
  const GramAnova evaluator(gram_matrix(sample.quantiles, threads));

  const auto observed = evaluator.components(members_by_group(sample));
  if (!observed) {
    raise(Errc::degenerate_group_variance, "a group has constant squared distances");
  }
  const double t_obs = observed->t_n;

  std::vector<double> stats(bootstrap_reps, 0.0);
  parallel_for(bootstrap_reps, threads, [&](std::size_t rep) {
    Rng rng(substream_seed(seed, rep));
    std::vector<std::vector<std::size_t>> groups(sizes.size());
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      groups[g].resize(sizes[g]);
      for (std::size_t s = 0; s < sizes[g]; ++s) {
        groups[g][s] = static_cast<std::size_t>(rng.uniform_int(n));
      }
    }
    const auto rep_components = evaluator.components(groups);
    // Degenerate replicates count as extreme so they never shrink p.
    stats[rep] = rep_components ? rep_components->t_n
                                : std::numeric_limits<double>::infinity();
  });

  std::size_t extreme = 0;
  for (const double t : stats) {
    if (t >= t_obs) ++extreme;
  }

  TestResult result;
  result.statistic = t_obs;
  result.p_value = (1.0 + static_cast<double>(extreme)) /
                   (static_cast<double>(bootstrap_reps) + 1.0);
  result.resamples = bootstrap_reps;
  result.seed = seed;
  append_components(result, *observed);
  return result;
}

double energy_statistic(std::span<const QuantileFunction> a,
                        std::span<const QuantileFunction> b) {
  if (a.empty() || b.empty()) raise(Errc::empty_sample, "energy statistic needs both samples");
  std::vector<QuantileFunction> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  require_shared_grid(pooled);
  const DistanceMatrix dm = distance_matrix(pooled, 1);
  std::vector<std::size_t> ia(a.size()), ib(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ia[i] = i;
  for (std::size_t i = 0; i < b.size(); ++i) ib[i] = a.size() + i;
  return energy_from_matrix(dm, ia, ib);
}

TestResult energy_permutation_test(std::span<const QuantileFunction> a,
                                   std::span<const QuantileFunction> b,
                                   std::size_t permutations, std::uint64_t seed, int threads) {
  if (a.empty() || b.empty()) raise(Errc::empty_sample, "energy test needs both samples");
  if (permutations == 0) raise(Errc::invalid_argument, "permutation test needs >= 1 permutation");
  std::vector<QuantileFunction> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  require_shared_grid(pooled);
  const DistanceMatrix dm = distance_matrix(pooled, threads);
  const std::size_t na = a.size();
  const std::size_t p = pooled.size();

  std::vector<std::size_t> ia(na), ib(p - na);
  for (std::size_t i = 0; i < na; ++i) ia[i] = i;
  for (std::size_t i = na; i < p; ++i) ib[i - na] = i;
  const double observed = energy_from_matrix(dm, ia, ib);

  std::vector<double> stats(permutations, 0.0);
  parallel_for(permutations, threads, [&](std::size_t rep) {
    Rng rng(substream_seed(seed, rep));
    std::vector<std::size_t> order(p);
    for (std::size_t i = 0; i < p; ++i) order[i] = i;
    rng.shuffle(order);
    const std::span<const std::size_t> pa(order.data(), na);
    const std::span<const std::size_t> pb(order.data() + na, p - na);
    stats[rep] = energy_from_matrix(dm, pa, pb);
  });

  std::size_t extreme = 0;
  for (const double s : stats) {
    if (s >= observed) ++extreme;
  }

  TestResult result;
  result.statistic = observed;
  result.p_value = (1.0 + static_cast<double>(extreme)) /
                   (static_cast<double>(permutations) + 1.0);
  result.resamples = permutations;
  result.seed = seed;
  result.components.emplace_back("n_a", static_cast<double>(na));
  result.components.emplace_back("n_b", static_cast<double>(p - na));
  return result;
}

double k_sample_energy(const GroupedSample& sample) {
  validate_grouped(sample);
  const auto groups = members_by_group(sample);
  if (groups.size() < 2) raise(Errc::invalid_argument, "k-sample energy needs >= 2 groups");
  const DistanceMatrix dm = distance_matrix(sample.quantiles, 1);
  return k_sample_energy_from_matrix(dm, groups, sample.quantiles.size());
}

TestResult k_sample_energy_test(const GroupedSample& sample, std::size_t permutations,
                                std::uint64_t seed, int threads) {
  validate_grouped(sample);
  const auto sizes = sample.group_sizes();
  if (sizes.size() < 2) raise(Errc::invalid_argument, "k-sample energy needs >= 2 groups");
  if (permutations == 0) raise(Errc::invalid_argument, "permutation test needs >= 1 permutation");

  const std::size_t n = sample.quantiles.size();
  const DistanceMatrix dm = distance_matrix(sample.quantiles, threads);
  const double observed = k_sample_energy_from_matrix(dm, members_by_group(sample), n);

  std::vector<double> stats(permutations, 0.0);
  parallel_for(permutations, threads, [&](std::size_t rep) {
    Rng rng(substream_seed(seed, rep));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> groups(sizes.size());
    std::size_t next = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      groups[g].assign(order.begin() + static_cast<std::ptrdiff_t>(next),
                       order.begin() + static_cast<std::ptrdiff_t>(next + sizes[g]));
      next += sizes[g];
    }
    stats[rep] = k_sample_energy_from_matrix(dm, groups, n);
  });

  std::size_t extreme = 0;
  for (const double s : stats) {
    if (s >= observed) ++extreme;
  }

  TestResult result;
  result.statistic = observed;
  result.p_value = (1.0 + static_cast<double>(extreme)) /
                   (static_cast<double>(permutations) + 1.0);
  result.resamples = permutations;
  result.seed = seed;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    result.components.emplace_back("n_" + std::to_string(g + 1),
                                   static_cast<double>(sizes[g]));
  }
  return result;
}

}  // namespace distrep
