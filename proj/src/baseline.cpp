#include "distrep/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "distrep/densities.hpp"
#include "distrep/errors.hpp"

namespace distrep {

namespace {

std::size_t cell_index(double value, const CutoffSpec& cutoffs) {
  const auto& b = cutoffs.boundaries;
  if (cutoffs.closure == CellClosure::right_closed) {
    // First boundary with value <= b_j.
    std::size_t j = 0;
    while (j < b.size() && value > b[j]) ++j;
    return j;
  }
  std::size_t j = 0;
  while (j < b.size() && value >= b[j]) ++j;
  return j;
}

}  // namespace

CutoffSpec ada_cutoffs() { return {{54.0, 70.0, 181.0, 251.0}, CellClosure::left_closed}; }

Composition tir_composition(const CgmSeries& series, const CutoffSpec& cutoffs,
                            double zero_repair) {
  if (series.records.empty()) raise(Errc::empty_series, "composition of empty series");
  if (cutoffs.boundaries.empty()) raise(Errc::invalid_argument, "no cutoff boundaries");
  for (std::size_t i = 1; i < cutoffs.boundaries.size(); ++i) {
    if (!(cutoffs.boundaries[i] > cutoffs.boundaries[i - 1])) {
      raise(Errc::invalid_argument, "cutoffs must be strictly increasing");
    }
  }
  if (!(zero_repair > 0.0)) raise(Errc::invalid_argument, "zero_repair must be positive");

  Composition c;
  c.subject_id = series.subject_id;
  c.parts.assign(cutoffs.boundaries.size() + 1, 0.0);
  for (const CgmRecord& r : series.records) c.parts[cell_index(r.glucose, cutoffs)] += 1.0;

  const double n = static_cast<double>(series.records.size());
  double total = 0.0;
  for (double& p : c.parts) {
    p = p / n + zero_repair;
    total += p;
  }
  for (double& p : c.parts) p /= total;
  return c;
}

Composition tir_composition(const CgmSeries& series, std::span<const double> boundaries,
                            double zero_repair) {
  CutoffSpec spec;
  spec.boundaries.assign(boundaries.begin(), boundaries.end());
  return tir_composition(series, spec, zero_repair);
}

std::vector<double> ilr_transform(const Composition& c) {
  const std::size_t d = c.parts.size();
  if (d < 2) raise(Errc::invalid_argument, "composition needs >= 2 parts");
  std::vector<double> logs(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(c.parts[i] > 0.0)) {
      raise(Errc::nonpositive_part, "composition part " + std::to_string(i + 1) +
                                        " is not positive; apply zero repair first");
    }
    logs[i] = std::log(c.parts[i]);
  }
  std::vector<double> out(d - 1);
  double log_prefix = 0.0;  // running sum of log parts 1..j
  for (std::size_t j = 1; j < d; ++j) {
    log_prefix += logs[j - 1];
    const double jf = static_cast<double>(j);
    out[j - 1] = std::sqrt(jf / (jf + 1.0)) * (log_prefix / jf - logs[j]);
  }
  return out;
}

double knn_regress_excluding(std::span<const std::vector<double>> train_features,
                             std::span<const double> train_responses,
                             std::span<const double> query, std::size_t k,
                             std::size_t exclude) {
  if (train_features.size() != train_responses.size()) {
    raise(Errc::dimension_mismatch, "features/responses size mismatch");
  }
  const std::size_t n = train_features.size();
  const bool excluding = exclude < n;
  const std::size_t usable = excluding ? n - 1 : n;
  if (k == 0 || k > usable) raise(Errc::invalid_argument, "k must be in [1, usable points]");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(usable);
  for (std::size_t i = 0; i < n; ++i) {
    if (excluding && i == exclude) continue;
    if (train_features[i].size() != query.size()) {
      raise(Errc::dimension_mismatch, "feature dimension mismatch");
    }
    double d2 = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double d = train_features[i][j] - query[j];
      d2 += d * d;
    }
    scored.emplace_back(d2, i);
  }
  // Pairs order ties by training index.
  std::sort(scored.begin(), scored.end());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += train_responses[scored[i].second];
  return s / static_cast<double>(k);
}

double knn_regress(std::span<const std::vector<double>> train_features,
                   std::span<const double> train_responses, std::span<const double> query,
                   std::size_t k) {
  return knn_regress_excluding(train_features, train_responses, query, k,
                               train_features.size());
}

std::vector<double> decile_cutoffs(std::span<const CgmSeries> series_set,
                                   std::span<const std::string> mask) {
  if (mask.empty()) raise(Errc::empty_mask, "decile cutoffs need a nonempty subject mask");
  std::unordered_set<std::string> wanted(mask.begin(), mask.end());
  std::vector<double> pooled;
  for (const CgmSeries& s : series_set) {
    if (wanted.count(s.subject_id) == 0) continue;
    for (const CgmRecord& r : s.records) pooled.push_back(r.glucose);
  }
  if (pooled.empty()) raise(Errc::empty_mask, "masked subjects have no records");

  std::vector<double> probs(9);
  for (std::size_t i = 0; i < 9; ++i) probs[i] = 0.1 * static_cast<double>(i + 1);
  const QuantileFunction q = empirical_quantile(pooled, probs, "pooled");
  return q.values;
}

}  // namespace distrep
