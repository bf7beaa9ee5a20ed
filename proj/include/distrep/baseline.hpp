#pragma once

#include <span>
#include <string>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

// Which side of each boundary a cell keeps.
enum class CellClosure {
  // Cells (b_{j-1}, b_j]; the first cell is (-inf, b_1].
  right_closed,
  // Cells [b_{j-1}, b_j); the first cell is (-inf, b_1).
  left_closed,
};

struct CutoffSpec {
  std::vector<double> boundaries;  // strictly increasing
  CellClosure closure = CellClosure::right_closed;
};

// Consensus clinical ranges: <54, 54-69, 70-180, 181-250, >250 mg/dL.
// Left-closed real cells at {54, 70, 181, 251} reproduce those printed
// integer ranges exactly for integer-valued readings.
CutoffSpec ada_cutoffs();

// Fraction of records per cell, then zero_repair added to every cell and the
// vector renormalized to sum 1 (so the log-ratio transform is defined).
Composition tir_composition(const CgmSeries& series, const CutoffSpec& cutoffs,
                            double zero_repair = 1e-6);
Composition tir_composition(const CgmSeries& series, std::span<const double> boundaries,
                            double zero_repair = 1e-6);

// Isometric log-ratio coordinates in the Helmert basis:
// coordinate j = sqrt(j/(j+1)) * ln(gm(x_1..x_j) / x_{j+1}), j = 1..D-1.
// The basis is fixed so outputs are reproducible; Euclidean distances are
// identical across orthonormal ilr bases.
std::vector<double> ilr_transform(const Composition& c);

// Unweighted k-nearest-neighbor mean response under Euclidean distance;
// distance ties break toward the smaller training index.
double knn_regress(std::span<const std::vector<double>> train_features,
                   std::span<const double> train_responses, std::span<const double> query,
                   std::size_t k = 10);

// Same, with one training index held out (for leave-one-out loops).
double knn_regress_excluding(std::span<const std::vector<double>> train_features,
                             std::span<const double> train_responses,
                             std::span<const double> query, std::size_t k,
                             std::size_t exclude);

// Pools the glucose records of the masked subjects and returns their nine
// empirical deciles (type-1 quantiles at p = 0.1..0.9).
std::vector<double> decile_cutoffs(std::span<const CgmSeries> series_set,
                                   std::span<const std::string> mask);

}  // namespace distrep
