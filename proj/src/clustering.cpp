#include "distrep/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"
#include "distrep/rng.hpp"

namespace distrep {

namespace {

double objective_from(const Mat& rho, std::span<const std::size_t> labels, std::size_t k) {
  std::vector<double> pair_sum(k, 0.0);
  std::vector<std::size_t> size(k, 0);
  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) ++size[labels[i]];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) pair_sum[labels[i]] += rho(i, j);
    }
  }
  double w = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    if (size[g] == 0) raise(Errc::empty_cluster, "cluster " + std::to_string(g + 1) + " is empty");
    w += pair_sum[g] / (2.0 * static_cast<double>(size[g]));
  }
  return w;
}

// Working state for one restart: cluster sizes and within-cluster pair sums
// (over ordered pairs) maintained incrementally.
struct Partition {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> size;
  std::vector<double> pair_sum;

  void rebuild(const Mat& rho, std::size_t k) {
    size.assign(k, 0);
    pair_sum.assign(k, 0.0);
    const std::size_t n = labels.size();
    for (std::size_t i = 0; i < n; ++i) ++size[labels[i]];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[i] == labels[j]) pair_sum[labels[i]] += rho(i, j);
      }
    }
  }

  double objective() const {
    double w = 0.0;
    for (std::size_t g = 0; g < size.size(); ++g) {
      if (size[g] > 0) w += pair_sum[g] / (2.0 * static_cast<double>(size[g]));
    }
    return w;
  }
};

// Sums of distances from point i to every cluster.
void row_sums(const Mat& rho, const Partition& p, std::size_t i, std::vector<double>& r) {
  r.assign(p.size.size(), 0.0);
  for (std::size_t j = 0; j < p.labels.size(); ++j) r[p.labels[j]] += rho(i, j);
}

// Embedding-space distance from point i to cluster g's centroid (up to a
// term constant in g): R_ig / s_g - T_g / (2 s_g^2).
double centroid_score(const Partition& p, const std::vector<double>& r, std::size_t g) {
  const double s = static_cast<double>(p.size[g]);
  return r[g] / s - p.pair_sum[g] / (2.0 * s * s);
}

void move_point(Partition& p, std::size_t i, std::size_t to,
                const std::vector<double>& r) {
  const std::size_t from = p.labels[i];
  p.pair_sum[from] -= 2.0 * r[from];
  p.pair_sum[to] += 2.0 * r[to];
  --p.size[from];
  ++p.size[to];
  p.labels[i] = to;
}

// Reseeds every empty cluster with the point farthest (by centroid score)
// from its current cluster, never emptying another cluster.
void repair_empty(const Mat& rho, Partition& p) {
  const std::size_t n = p.labels.size();
  std::vector<double> r;
  for (std::size_t g = 0; g < p.size.size(); ++g) {
    if (p.size[g] != 0) continue;
    double worst = -1.0;
    std::size_t pick = n;
    std::vector<double> pick_r;
    for (std::size_t i = 0; i < n; ++i) {
      if (p.size[p.labels[i]] <= 1) continue;
      row_sums(rho, p, i, r);
      const double score = centroid_score(p, r, p.labels[i]);
      if (score > worst) {
        worst = score;
        pick = i;
        pick_r = r;
      }
    }
    if (pick == n) raise(Errc::empty_cluster, "cannot repair empty cluster");
    move_point(p, pick, g, pick_r);
  }
}

std::size_t run_lloyd(const Mat& rho, Partition& p, std::size_t max_iter) {
  const std::size_t n = p.labels.size();
  const std::size_t k = p.size.size();
  std::vector<double> r;
  std::vector<std::size_t> next(n);
  double w_prev = p.objective();
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      row_sums(rho, p, i, r);
      std::size_t best = p.labels[i];
      double best_score = centroid_score(p, r, best);
      for (std::size_t g = 0; g < k; ++g) {
        if (g == p.labels[i] || p.size[g] == 0) continue;
        const double score = centroid_score(p, r, g);
        if (score < best_score || (score == best_score && g < best && best != p.labels[i])) {
          best_score = score;
          best = g;
        }
      }
      next[i] = best;
      changed = changed || best != p.labels[i];
    }
    if (!changed) return iter;
    p.labels = next;
    p.rebuild(rho, k);
    bool empty = false;
    for (const std::size_t s : p.size) empty = empty || s == 0;
    if (empty) {
      repair_empty(rho, p);
      w_prev = p.objective();  // repair moves are outside the descent guarantee
    } else {
      const double w_new = p.objective();
      assert(w_new <= w_prev + 1e-9 * (1.0 + std::fabs(w_prev)));
      w_prev = w_new;
    }
  }
  return max_iter;
}

std::size_t run_hartigan(const Mat& rho, Partition& p, std::size_t max_iter) {
  const std::size_t n = p.labels.size();
  const std::size_t k = p.size.size();
  std::vector<double> r;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = p.labels[i];
      if (p.size[a] <= 1) continue;  // a move would empty the cluster
      row_sums(rho, p, i, r);
      const double sa = static_cast<double>(p.size[a]);
      const double leave = (p.pair_sum[a] - 2.0 * r[a]) / (2.0 * (sa - 1.0)) -
                           p.pair_sum[a] / (2.0 * sa);
      double best_delta = 0.0;
      std::size_t best_g = a;
      for (std::size_t g = 0; g < k; ++g) {
        if (g == a) continue;
        const double sg = static_cast<double>(p.size[g]);
        const double enter = (p.pair_sum[g] + 2.0 * r[g]) / (2.0 * (sg + 1.0)) -
                             p.pair_sum[g] / (2.0 * sg);
        const double delta = leave + enter;
        if (delta < best_delta) {
          best_delta = delta;
          best_g = g;
        }
      }
      const double tol = 1e-12 * (1.0 + std::fabs(p.objective()));
      if (best_g != a && best_delta < -tol) {
        move_point(p, i, best_g, r);
        moved = true;
      }
    }
    if (!moved) return iter;
  }
  return max_iter;
}

std::vector<std::size_t> farthest_point_labels(const Mat& rho, std::size_t n, std::size_t k) {
  std::vector<std::size_t> centers;
  centers.reserve(k);
  // Most eccentric point first.
  double best = -1.0;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += rho(i, j);
    if (total > best) {
      best = total;
      pick = i;
    }
  }
  centers.push_back(pick);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    for (std::size_t i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], rho(i, centers.back()));
    }
    double far = -1.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_dist[i] > far) {
        far = min_dist[i];
        next = i;
      }
    }
    centers.push_back(next);
  }
  std::vector<std::size_t> labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (rho(i, centers[c]) < nearest) {
        nearest = rho(i, centers[c]);
        labels[i] = c;
      }
    }
  }
  return labels;
}

// Renumbers clusters by first appearance so equivalent partitions from
// different restarts serialize identically.
void canonicalize(std::vector<std::size_t>& labels, std::size_t k) {
  std::vector<std::size_t> remap(k, k);
  std::size_t next = 0;
  for (std::size_t& l : labels) {
    if (remap[l] == k) remap[l] = next++;
    l = remap[l];
  }
}

}  // namespace

double within_objective(const DistanceMatrix& dm, std::span<const std::size_t> labels) {
  if (labels.size() != dm.size()) raise(Errc::dimension_mismatch, "labels/matrix size mismatch");
  if (labels.empty()) raise(Errc::empty_sample, "no points to score");
  std::size_t k = 0;
  for (const std::size_t l : labels) k = std::max(k, l + 1);
  Mat rho(dm.size(), dm.size());
  for (std::size_t i = 0; i < dm.size(); ++i) {
    for (std::size_t j = 0; j < dm.size(); ++j) rho(i, j) = dm.at(i, j);
  }
  return objective_from(rho, labels, k);
}

ClusteringResult kgroups_cluster(const DistanceMatrix& dm, const ClusteringOptions& options) {
  const std::size_t n = dm.size();
  if (n == 0) raise(Errc::empty_sample, "empty distance matrix");
  if (options.k < 1 || options.k > n) {
    raise(Errc::invalid_argument, "k must be between 1 and the number of points");
  }
  if (options.restarts == 0) raise(Errc::invalid_argument, "need at least one restart");

  Mat rho(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dm.at(i, j);
      rho(i, j) = options.squared_distance ? d * d : d;
    }
  }

  struct RestartOutcome {
    std::vector<std::size_t> labels;
    double objective = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
  };
  std::vector<RestartOutcome> outcomes(options.restarts);

  parallel_for(options.restarts, options.threads, [&](std::size_t restart) {
    Partition p;
    if (restart == 0) {
      p.labels = farthest_point_labels(rho, n, options.k);
    } else {
      Rng rng(substream_seed(options.seed, restart));
      p.labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        p.labels[i] = static_cast<std::size_t>(rng.uniform_int(options.k));
      }
    }
    p.rebuild(rho, options.k);
    bool empty = false;
    for (const std::size_t s : p.size) empty = empty || s == 0;
    if (empty) repair_empty(rho, p);

    const std::size_t iters = options.heuristic == ClusterHeuristic::lloyd
                                  ? run_lloyd(rho, p, options.max_iter)
                                  : run_hartigan(rho, p, options.max_iter);
    outcomes[restart].labels = std::move(p.labels);
    outcomes[restart].objective = objective_from(rho, outcomes[restart].labels, options.k);
    outcomes[restart].iterations = iters;
  });

  std::size_t winner = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].objective < outcomes[winner].objective) winner = r;
  }

  ClusteringResult result;
  result.labels = std::move(outcomes[winner].labels);
  canonicalize(result.labels, options.k);
  result.within_objective = outcomes[winner].objective;
  result.iterations = outcomes[winner].iterations;
  result.restarts_used = options.restarts;
  result.seed = options.seed;
  return result;
}

}  // namespace distrep
