#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

enum class ClusterHeuristic { lloyd, hartigan };

struct ClusteringOptions {
  std::size_t k = 2;
  ClusterHeuristic heuristic = ClusterHeuristic::hartigan;
  std::size_t restarts = 20;
  std::size_t max_iter = 100;
  std::uint64_t seed = 0;
  // Cluster on squared distances instead of the distances themselves
  // (classical k-means behavior in the embedding space).
  bool squared_distance = false;
  int threads = 1;
};

struct ClusteringResult {
  std::vector<std::size_t> labels;  // 0-based cluster indices
  double within_objective = 0.0;
  std::size_t iterations = 0;     // iterations used by the winning restart
  std::size_t restarts_used = 0;
  std::uint64_t seed = 0;
};

// W = sum_j (|C_j| / 2) * gbar_jj, with gbar_jj the mean pairwise distance
// within cluster j over all ordered pairs (diagonal included). Labels are
// 0-based; every cluster in 0..max(label) must be nonempty.
double within_objective(const DistanceMatrix& dm, std::span<const std::size_t> labels);

// Minimizes W over partitions into k clusters by the chosen heuristic, best
// of `restarts` initializations. The first restart uses a deterministic
// farthest-point initialization; the rest use random labels from per-restart
// substreams, so results do not depend on thread count.
ClusteringResult kgroups_cluster(const DistanceMatrix& dm, const ClusteringOptions& options);

}  // namespace distrep
