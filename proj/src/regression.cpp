#include "distrep/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distrep/errors.hpp"
#include "distrep/isotonic.hpp"
#include "distrep/wasserstein.hpp"

namespace distrep {

std::optional<double> nw_predict_from_distances(std::span<const double> distances,
                                                std::span<const double> responses,
                                                double bandwidth,
                                                std::optional<std::size_t> exclude) {
  if (distances.size() != responses.size()) {
    raise(Errc::dimension_mismatch, "distances/responses size mismatch");
  }
  if (!(bandwidth > 0.0)) raise(Errc::invalid_argument, "bandwidth must be positive");
  double wsum = 0.0;
  double ysum = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const double u = distances[i] / bandwidth;
    const double w = std::exp(-0.5 * u * u);
    wsum += w;
    ysum += w * responses[i];
  }
  if (!(wsum > 0.0)) return std::nullopt;
  return ysum / wsum;
}

double nw_predict(const ScalarOnDistTraining& model, const QuantileFunction& query) {
  if (model.predictors.empty()) raise(Errc::empty_sample, "no training predictors");
  if (model.predictors.size() != model.responses.size()) {
    raise(Errc::dimension_mismatch, "predictors/responses size mismatch");
  }
  std::vector<double> d(model.predictors.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = w2_distance(query, model.predictors[i]);
    dmax = std::max(dmax, d[i]);
  }
  const auto value = nw_predict_from_distances(d, model.responses, model.bandwidth);
  if (!value) {
    raise(Errc::all_weights_vanish,
          "all kernel weights underflowed (max distance " + std::to_string(dmax) +
              ", bandwidth " + std::to_string(model.bandwidth) + ")");
  }
  return *value;
}

std::vector<double> default_bandwidth_grid(const DistanceMatrix& dm, std::size_t count) {
  if (count == 0) raise(Errc::invalid_argument, "bandwidth grid needs >= 1 candidate");
  std::vector<double> positive;
  for (std::size_t i = 0; i < dm.size(); ++i) {
    for (std::size_t j = i + 1; j < dm.size(); ++j) {
      if (dm.at(i, j) > 0.0) positive.push_back(dm.at(i, j));
    }
  }
  const double anchor = positive.empty() ? 1.0 : median(positive);
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = anchor;
    return grid;
  }
  const double log_lo = std::log(anchor / 10.0);
  const double log_hi = std::log(anchor * 10.0);
  for (std::size_t c = 0; c < count; ++c) {
    const double t = static_cast<double>(c) / static_cast<double>(count - 1);
    grid[c] = std::exp(log_lo + t * (log_hi - log_lo));
  }
  return grid;
}

double nw_loo_sse(const DistanceMatrix& dm, std::span<const double> responses, double bandwidth) {
  if (dm.size() != responses.size()) {
    raise(Errc::dimension_mismatch, "distance matrix/responses size mismatch");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < dm.size(); ++i) {
    const auto pred = nw_predict_from_distances(dm.row(i), responses, bandwidth, i);
    if (!pred) return std::numeric_limits<double>::infinity();
    const double r = responses[i] - *pred;
    sse += r * r;
  }
  return sse;
}

double nw_cv_bandwidth(const DistanceMatrix& dm, std::span<const double> responses,
                       std::span<const double> candidates) {
  if (candidates.empty()) raise(Errc::invalid_argument, "empty candidate grid");
  if (responses.size() < 3) raise(Errc::degenerate_sample, "CV needs >= 3 points");
  bool found = false;
  double best_h = 0.0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (const double h : candidates) {
    if (!(h > 0.0)) raise(Errc::invalid_argument, "bandwidth candidates must be positive");
    const double sse = nw_loo_sse(dm, responses, h);
    if (!found || sse < best_sse || (sse == best_sse && h < best_h)) {
      found = true;
      best_sse = sse;
      best_h = h;
    }
  }
  return best_h;
}

double nw_cv_bandwidth(std::span<const QuantileFunction> predictors,
                       std::span<const double> responses, std::span<const double> candidates,
                       int threads) {
  const DistanceMatrix dm = distance_matrix(predictors, threads);
  return nw_cv_bandwidth(dm, responses, candidates);
}

double loocv_r2_generic(std::span<const double> responses,
                        const std::function<double(std::size_t)>& loo_prediction) {
  if (responses.size() < 3) raise(Errc::degenerate_sample, "LOO R^2 needs >= 3 points");
  const double ybar = mean(responses);
  double tss = 0.0;
  for (const double y : responses) tss += (y - ybar) * (y - ybar);
  if (!(tss > 0.0)) raise(Errc::zero_response_variance, "constant responses");
  double sse = 0.0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const double r = responses[i] - loo_prediction(i);
    sse += r * r;
  }
  return 1.0 - sse / tss;
}

double loocv_r2(const DistanceMatrix& dm, std::span<const double> responses, double bandwidth) {
  return loocv_r2_generic(responses, [&](std::size_t i) {
    const auto pred = nw_predict_from_distances(dm.row(i), responses, bandwidth, i);
    if (!pred) {
      raise(Errc::all_weights_vanish,
            "all kernel weights underflowed for held-out point " + std::to_string(i));
    }
    return *pred;
  });
}

double loocv_r2(const ScalarOnDistTraining& model, int threads) {
  const DistanceMatrix dm = distance_matrix(model.predictors, threads);
  return loocv_r2(dm, model.responses, model.bandwidth);
}

FrechetRegressionModel frechet_fit(const Mat& covariates,
                                   std::vector<QuantileFunction> responses) {
  const std::size_t n = covariates.rows;
  const std::size_t d = covariates.cols;
  if (n != responses.size()) {
    raise(Errc::dimension_mismatch, "covariate rows != number of responses");
  }
  if (n <= d) raise(Errc::degenerate_sample, "need more observations than covariates");
  require_shared_grid(responses);

  FrechetRegressionModel model;
  model.covariates = covariates;
  model.covariate_mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) model.covariate_mean[j] += covariates(i, j);
  }
  for (double& v : model.covariate_mean) v /= static_cast<double>(n);

  model.covariate_covariance = Mat(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = covariates(i, a) - model.covariate_mean[a];
      for (std::size_t b = a; b < d; ++b) {
        model.covariate_covariance(a, b) += ca * (covariates(i, b) - model.covariate_mean[b]);
      }
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      model.covariate_covariance(a, b) /= static_cast<double>(n);
      model.covariate_covariance(b, a) = model.covariate_covariance(a, b);
    }
  }

  if (!cholesky(model.covariate_covariance, model.covariance_cholesky)) {
    raise(Errc::singular_covariance, "covariate covariance is not positive definite");
  }
  model.training_quantiles = std::move(responses);
  return model;
}

std::vector<double> frechet_weights(const FrechetRegressionModel& model,
                                    std::span<const double> u) {
  const std::size_t d = model.covariate_mean.size();
  if (u.size() != d) raise(Errc::dimension_mismatch, "query dimension mismatch");
  std::vector<double> centered(d);
  for (std::size_t j = 0; j < d; ++j) centered[j] = u[j] - model.covariate_mean[j];
  const std::vector<double> solved = cholesky_solve(model.covariance_cholesky, centered);

  const std::size_t n = model.covariates.rows;
  std::vector<double> w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dot += (model.covariates(i, j) - model.covariate_mean[j]) * solved[j];
    }
    w[i] += dot;
  }
  return w;
}

QuantileFunction frechet_predict(const FrechetRegressionModel& model, std::span<const double> u) {
  const std::vector<double> w = frechet_weights(model, u);
  const std::size_t n = model.training_quantiles.size();
  const std::size_t m = model.training_quantiles.front().values.size();

  std::vector<double> avg(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& values = model.training_quantiles[i].values;
    for (std::size_t k = 0; k < m; ++k) avg[k] += w[i] * values[k];
  }
  for (double& v : avg) v /= static_cast<double>(n);

  QuantileFunction out;
  out.probs = model.training_quantiles.front().probs;
  out.values = isotonic_projection(avg);
  return out;
}

double frechet_r2(const FrechetRegressionModel& model, int threads) {
  const std::size_t n = model.training_quantiles.size();
  const QuantileFunction overall = frechet_mean(model.training_quantiles);

  double denom = 0.0;
  for (const QuantileFunction& q : model.training_quantiles) {
    const double dist = w2_distance(q, overall);
    denom += dist * dist;
  }
  if (!(denom > 0.0)) raise(Errc::zero_frechet_variance, "all training responses identical");

  std::vector<double> sq(n, 0.0);
  const std::size_t d = model.covariates.cols;
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> u(d);
    for (std::size_t j = 0; j < d; ++j) u[j] = model.covariates(i, j);
    const QuantileFunction fitted = frechet_predict(model, u);
    const double dist = w2_distance(model.training_quantiles[i], fitted);
    sq[i] = dist * dist;
  });
  double num = 0.0;
  for (const double v : sq) num += v;
  return 1.0 - num / denom;
}

std::size_t clamp_to_floor(QuantileFunction& q, double floor_value) {
  std::size_t raised = 0;
  for (double& v : q.values) {
    if (v < floor_value) {
      v = floor_value;
      ++raised;
    }
  }
  return raised;
}

}  // namespace distrep
