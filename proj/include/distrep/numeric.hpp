#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace distrep {

// Sample mean.
double mean(std::span<const double> x);

// Sample variance with denominator (n - 1). Requires n >= 2.
double sample_variance(std::span<const double> x);

// Sample standard deviation, denominator (n - 1).
double sample_stddev(std::span<const double> x);

// Trapezoidal integral of y over a strictly increasing grid x.
double trapezoid(std::span<const double> x, std::span<const double> y);

// Standard normal density, cdf, and quantile. The quantile uses Wichura's
// AS241 rational approximations (relative error below 1e-15 over (0,1)).
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

// Median of a sample (copies and partially sorts).
double median(std::span<const double> x);

// Dense row-major matrix, just big enough for the small covariate algebra
// used by the regression module.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Cholesky factorization of a symmetric matrix. Returns false if the matrix
// is not positive definite (within a scale-relative pivot tolerance).
bool cholesky(const Mat& m, Mat& lower);

// Solves L L^T x = b given the Cholesky factor L.
std::vector<double> cholesky_solve(const Mat& lower, std::span<const double> b);

// Runs fn(i) for i in [0, n), split across at most `threads` workers.
// Each index is processed exactly once; callers keep determinism by writing
// only to per-index slots. Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// FNV-1a 64-bit hash, used for input digests in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);

}  // namespace distrep
