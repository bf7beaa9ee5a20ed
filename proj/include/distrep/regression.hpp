#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "distrep/numeric.hpp"
#include "distrep/types.hpp"

namespace distrep {

// ---- Scalar-on-distribution regression (Nadaraya-Watson) ----

struct ScalarOnDistTraining {
  std::vector<QuantileFunction> predictors;
  std::vector<double> responses;
  double bandwidth = 1.0;
};

// Kernel-weighted response average with Gaussian kernel on Wasserstein
// distances. Weights are computed naively (no rescaling), so a bandwidth far
// below the distance scale underflows every kernel value and raises
// all_weights_vanish instead of returning NaN.
double nw_predict(const ScalarOnDistTraining& model, const QuantileFunction& query);

// Same, from precomputed query-to-training distances. `exclude` marks one
// training index as held out (for leave-one-out loops). Returns nullopt when
// every weight underflows.
std::optional<double> nw_predict_from_distances(std::span<const double> distances,
                                                std::span<const double> responses,
                                                double bandwidth,
                                                std::optional<std::size_t> exclude = std::nullopt);

// 20 log-spaced candidates spanning [median/10, median*10] of the positive
// off-diagonal distances.
std::vector<double> default_bandwidth_grid(const DistanceMatrix& dm, std::size_t count = 20);

// Leave-one-out CV over the candidate grid; ties break toward the smaller
// bandwidth. Candidates whose weights vanish for some held-out point score
// +infinity.
double nw_cv_bandwidth(const DistanceMatrix& dm, std::span<const double> responses,
                       std::span<const double> candidates);
double nw_cv_bandwidth(std::span<const QuantileFunction> predictors,
                       std::span<const double> responses, std::span<const double> candidates,
                       int threads = 1);

// Leave-one-out squared error summed over held-out points.
double nw_loo_sse(const DistanceMatrix& dm, std::span<const double> responses, double bandwidth);

// 1 - LOO SSE / total sum of squares. Throws zero_response_variance when the
// responses are constant.
double loocv_r2(const ScalarOnDistTraining& model, int threads = 1);
double loocv_r2(const DistanceMatrix& dm, std::span<const double> responses, double bandwidth);

// Generic leave-one-out R-squared: loo_prediction(i) predicts response i
// from the sample with i removed.
double loocv_r2_generic(std::span<const double> responses,
                        const std::function<double(std::size_t)>& loo_prediction);

// ---- Distribution-on-vector regression (global Frechet) ----

struct FrechetRegressionModel {
  Mat covariates;                       // n x d
  std::vector<double> covariate_mean;   // d
  Mat covariate_covariance;             // d x d, denominator n
  Mat covariance_cholesky;              // lower factor of the covariance
  std::vector<QuantileFunction> training_quantiles;
};

// Stores moments and training data; throws singular_covariance when the
// covariate covariance is not positive definite.
FrechetRegressionModel frechet_fit(const Mat& covariates,
                                   std::vector<QuantileFunction> responses);

// Regression weights s_i(u) = 1 + (U_i - Ubar)' Cov^{-1} (u - Ubar); they
// average to exactly 1 and may be negative.
std::vector<double> frechet_weights(const FrechetRegressionModel& model,
                                    std::span<const double> u);

// Weighted average of training quantile functions projected onto the
// nondecreasing cone (isotonic regression), which is the exact minimizer of
// the weighted squared-distance criterion over monotone grid functions.
QuantileFunction frechet_predict(const FrechetRegressionModel& model, std::span<const double> u);

// Wasserstein variance-explained ratio of the fitted model over its own
// training covariates.
double frechet_r2(const FrechetRegressionModel& model, int threads = 1);

// Clips values below floor_value (physical support constraint); returns how
// many grid points were raised. Kept outside frechet_predict so the pure
// estimator stays comparable with external minimizers.
std::size_t clamp_to_floor(QuantileFunction& q, double floor_value);

}  // namespace distrep
