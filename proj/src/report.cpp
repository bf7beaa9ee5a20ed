#include "distrep/report.hpp"

#include <algorithm>
#include <cstddef>
#include <unordered_map>
#include <unordered_set>

#include "distrep/baseline.hpp"
#include "distrep/densities.hpp"
#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"
#include "distrep/regression.hpp"
#include "distrep/wasserstein.hpp"

namespace distrep {

double loo_linear_prediction(std::span<const double> x, std::span<const double> y,
                             std::size_t held_out) {
  const std::size_t n = x.size();
  if (n != y.size()) raise(Errc::dimension_mismatch, "feature and response lengths differ");
  if (held_out >= n) raise(Errc::invalid_argument, "held-out index out of range");
  if (n < 3) raise(Errc::empty_sample, "need at least 3 points for leave-one-out fit");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == held_out) continue;
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double m = static_cast<double>(n - 1);
  const double denom = m * sxx - sx * sx;
  const double mean_y = sy / m;
  if (!(denom > 1e-12 * (1.0 + m * sxx))) return mean_y;  // constant feature
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = mean_y - slope * (sx / m);
  return intercept + slope * x[held_out];
}

namespace {

std::vector<double> tir_ilr_features(const CgmSeries& series, const CutoffSpec& spec) {
  return ilr_transform(tir_composition(series, spec));
}

double knn_loo_r2(const std::vector<std::vector<double>>& features, std::span<const double> y,
                  std::size_t k) {
  return loocv_r2_generic(y, [&](std::size_t i) {
    return knn_regress_excluding(features, y, features[i], k, i);
  });
}

}  // namespace

ReportResult compare_representations(std::span<const CgmSeries> cleaned, const Table& biomarkers,
                                     std::span<const std::string> biomarker_cols,
                                     std::span<const std::string> normo_mask,
                                     const ReportOptions& options) {
  const std::size_t n = cleaned.size();
  if (n < 3) raise(Errc::empty_sample, "need at least 3 subjects to compare representations");
  if (biomarker_cols.empty()) raise(Errc::invalid_argument, "no biomarker columns requested");

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < biomarkers.ids.size(); ++r) row_of.emplace(biomarkers.ids[r], r);

  ReportResult result;
  result.subject_ids.reserve(n);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = row_of.find(cleaned[i].subject_id);
    if (it == row_of.end())
      raise(Errc::dimension_mismatch, "no biomarker row for subject " + cleaned[i].subject_id);
    rows[i] = it->second;
    result.subject_ids.push_back(cleaned[i].subject_id);
  }

  const std::vector<double> probs = default_prob_grid(options.prob_grid_size);
  std::vector<QuantileFunction> quantiles;
  quantiles.reserve(n);
  std::vector<double> mean_glucose(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> values = glucose_values(cleaned[i]);
    quantiles.push_back(empirical_quantile(values, probs, cleaned[i].subject_id));
    mean_glucose[i] = mean(values);
  }
  const DistanceMatrix dm = distance_matrix(quantiles, options.threads);

  std::vector<std::string> mask_ids(normo_mask.begin(), normo_mask.end());
  if (mask_ids.empty())
    for (const CgmSeries& s : cleaned) mask_ids.push_back(s.subject_id);
  result.decile_boundaries = decile_cutoffs(cleaned, mask_ids);
  const CutoffSpec decile_spec{result.decile_boundaries, CellClosure::right_closed};
  const CutoffSpec ada_spec = ada_cutoffs();

  std::vector<std::vector<double>> decile_features(n), ada_features(n);
  for (std::size_t i = 0; i < n; ++i) {
    decile_features[i] = tir_ilr_features(cleaned[i], decile_spec);
    ada_features[i] = tir_ilr_features(cleaned[i], ada_spec);
  }
  const std::size_t knn_k = std::min(options.knn_k, n - 1);

  const std::vector<double> bandwidth_grid = default_bandwidth_grid(dm);
  for (const std::string& col : biomarker_cols) {
    const std::vector<double> raw = biomarkers.numeric_column(col);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = raw[rows[i]];

    BiomarkerComparison cmp;
    cmp.biomarker = col;
    cmp.nw_bandwidth = nw_cv_bandwidth(dm, y, bandwidth_grid);
    cmp.r2_glucodensity = loocv_r2(dm, y, cmp.nw_bandwidth);
    cmp.r2_tir_decile = knn_loo_r2(decile_features, y, knn_k);
    cmp.r2_tir_ada = knn_loo_r2(ada_features, y, knn_k);
    cmp.r2_mean_glucose =
        loocv_r2_generic(y, [&](std::size_t i) { return loo_linear_prediction(mean_glucose, y, i); });
    result.comparisons.push_back(std::move(cmp));
  }
  return result;
}

}  // namespace distrep
