#pragma once

#include <span>
#include <string>
#include <vector>

#include "distrep/io.hpp"
#include "distrep/types.hpp"

namespace distrep {

struct ReportOptions {
  std::size_t prob_grid_size = 500;
  std::size_t knn_k = 10;  // clamped to n - 1
  int threads = 1;
};

// Leave-one-out R-squared of one biomarker under each representation.
struct BiomarkerComparison {
  std::string biomarker;
  double r2_glucodensity = 0.0;  // Nadaraya-Watson on quantile functions
  double nw_bandwidth = 0.0;     // CV-selected
  double r2_tir_decile = 0.0;    // decile cells -> ilr -> kNN
  double r2_tir_ada = 0.0;       // clinical cells -> ilr -> kNN
  double r2_mean_glucose = 0.0;  // simple linear regression on mean glucose
};

struct ReportResult {
  std::vector<std::string> subject_ids;
  std::vector<double> decile_boundaries;
  std::vector<BiomarkerComparison> comparisons;
};

// Runs the representation comparison on a cleaned cohort. `biomarkers` rows
// are matched to series by subject_id; every series needs a row. The decile
// cells pool the records of `normo_mask` subjects (all subjects when the
// mask is empty).
ReportResult compare_representations(std::span<const CgmSeries> cleaned, const Table& biomarkers,
                                     std::span<const std::string> biomarker_cols,
                                     std::span<const std::string> normo_mask,
                                     const ReportOptions& options = {});

// Leave-one-out predictions from a simple linear regression on a scalar
// feature; falls back to the held-out mean when the feature is constant.
double loo_linear_prediction(std::span<const double> x, std::span<const double> y,
                             std::size_t held_out);

}  // namespace distrep
