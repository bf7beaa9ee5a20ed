#pragma once

#include <optional>
#include <span>
#include <string>

#include "distrep/types.hpp"

namespace distrep {

enum class KernelKind { gaussian, epanechnikov };

enum class BandwidthSelector { rule_of_thumb, least_squares_cv };

// Normal-reference bandwidth 1.06 * s * m^(-1/5), with s the sample standard
// deviation (denominator m - 1). Throws degenerate_sample when m < 2 or all
// values coincide.
double rule_of_thumb_bandwidth(std::span<const double> samples);

// Least-squares cross-validation bandwidth for the Gaussian kernel, by grid
// search over log-spaced multiples of the rule-of-thumb value. The CV score
// uses the closed-form Gaussian convolution, so cost is O(candidates * m^2);
// intended for moderate sample sizes.
double lscv_bandwidth(std::span<const double> samples);

struct DensityOptions {
  KernelKind kernel = KernelKind::gaussian;
  BandwidthSelector selector = BandwidthSelector::rule_of_thumb;
  // When set, overrides the selector entirely.
  std::optional<double> bandwidth;
};

// Kernel density estimate on the given grid, renormalized so the trapezoidal
// integral over the grid is exactly 1. Throws grid_too_coarse when any grid
// spacing exceeds the bandwidth.
Glucodensity estimate_glucodensity(std::span<const double> samples, std::span<const double> grid,
                                   const DensityOptions& options = {},
                                   const std::string& subject_id = "");
Glucodensity estimate_glucodensity(const CgmSeries& series, std::span<const double> grid,
                                   const DensityOptions& options = {});

// Left-continuous (type-1) empirical quantile Q(p) = inf{x : F(x) >= p}
// evaluated on prob_grid.
QuantileFunction empirical_quantile(std::span<const double> samples,
                                    std::span<const double> prob_grid,
                                    const std::string& subject_id = "");

// Integrates the density to a CDF (trapezoidal, normalized to end at 1) and
// inverts by monotone linear interpolation. Output is nondecreasing.
QuantileFunction density_to_quantile(const Glucodensity& g, std::span<const double> prob_grid);

// Glucose values of a series, in record order.
std::vector<double> glucose_values(const CgmSeries& series);

}  // namespace distrep
