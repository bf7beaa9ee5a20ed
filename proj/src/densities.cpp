#include "distrep/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"

namespace distrep {

namespace {

double kernel_value(KernelKind kind, double u) {
  switch (kind) {
    case KernelKind::gaussian:
      return normal_pdf(u);
    case KernelKind::epanechnikov:
      return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

void check_increasing(std::span<const double> grid, const char* what) {
  if (grid.size() < 2) raise(Errc::invalid_argument, std::string(what) + " needs >= 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      raise(Errc::invalid_argument, std::string(what) + " must be strictly increasing");
    }
  }
}

}  // namespace

double rule_of_thumb_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) raise(Errc::degenerate_sample, "bandwidth needs >= 2 samples");
  const double sd = sample_stddev(samples);
  if (!(sd > 0.0)) raise(Errc::degenerate_sample, "all sample values identical");
  return 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
}

double lscv_bandwidth(std::span<const double> samples) {
  const double anchor = rule_of_thumb_bandwidth(samples);
  const std::size_t m = samples.size();
  const double inv_sqrt_2pi = 0.3989422804014326779;

  double best_h = anchor;
  double best_score = std::numeric_limits<double>::infinity();
  const int candidates = 20;
  for (int c = 0; c < candidates; ++c) {
    // log-spaced over [anchor/5, anchor*5]
    const double t = static_cast<double>(c) / (candidates - 1);
    const double h = anchor * std::exp((2.0 * t - 1.0) * std::log(5.0));
    // Integral of the squared KDE has a closed form: Gaussian kernels
    // convolve to a Gaussian with spread sqrt(2) h.
    double conv = 0.0;    // sum over all (i, j) of phi_{sqrt(2) h}(xi - xj)
    double cross = 0.0;   // sum over i != j of phi_h(xi - xj)
    const double s2 = 1.4142135623730950488 * h;
    for (std::size_t i = 0; i < m; ++i) {
      conv += inv_sqrt_2pi / s2;  // diagonal term
      for (std::size_t j = i + 1; j < m; ++j) {
        const double d = samples[i] - samples[j];
        conv += 2.0 * (inv_sqrt_2pi / s2) * std::exp(-0.5 * (d / s2) * (d / s2));
        cross += 2.0 * (inv_sqrt_2pi / h) * std::exp(-0.5 * (d / h) * (d / h));
      }
    }
    const double mm = static_cast<double>(m);
    const double score = conv / (mm * mm) - 2.0 * cross / (mm * (mm - 1.0));
    if (score < best_score) {
      best_score = score;
      best_h = h;
    }
  }
  return best_h;
}

Glucodensity estimate_glucodensity(std::span<const double> samples, std::span<const double> grid,
                                   const DensityOptions& options, const std::string& subject_id) {
  if (samples.empty()) raise(Errc::empty_sample, "density estimation needs samples");
  check_increasing(grid, "support grid");

  double h;
  if (options.bandwidth) {
    h = *options.bandwidth;
    if (!(h > 0.0)) raise(Errc::invalid_argument, "bandwidth must be positive");
  } else if (options.selector == BandwidthSelector::rule_of_thumb) {
    h = rule_of_thumb_bandwidth(samples);
  } else {
    if (options.kernel != KernelKind::gaussian) {
      raise(Errc::invalid_argument, "least-squares CV selector supports the Gaussian kernel only");
    }
    h = lscv_bandwidth(samples);
  }

  double max_spacing = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) max_spacing = std::max(max_spacing, grid[i] - grid[i - 1]);
  if (max_spacing > h) {
    raise(Errc::grid_too_coarse, "grid spacing exceeds bandwidth; refine the grid");
  }

  Glucodensity g;
  g.subject_id = subject_id;
  g.grid.assign(grid.begin(), grid.end());
  g.density.assign(grid.size(), 0.0);
  g.bandwidth = h;
  g.sample_size = samples.size();

  const double inv_mh = 1.0 / (static_cast<double>(samples.size()) * h);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = 0.0;
    for (const double x : samples) v += kernel_value(options.kernel, (grid[i] - x) / h);
    g.density[i] = v * inv_mh;
  }

  const double mass = trapezoid(g.grid, g.density);
  if (!(mass > 1e-12)) {
    raise(Errc::invalid_argument, "no probability mass on the support grid");
  }
  for (double& v : g.density) v /= mass;
  return g;
}

Glucodensity estimate_glucodensity(const CgmSeries& series, std::span<const double> grid,
                                   const DensityOptions& options) {
  const std::vector<double> values = glucose_values(series);
  return estimate_glucodensity(values, grid, options, series.subject_id);
}

QuantileFunction empirical_quantile(std::span<const double> samples,
                                    std::span<const double> prob_grid,
                                    const std::string& subject_id) {
  if (samples.empty()) raise(Errc::empty_sample, "quantile of empty sample");
  check_increasing(prob_grid, "probability grid");
  if (!(prob_grid.front() > 0.0 && prob_grid.back() < 1.0)) {
    raise(Errc::invalid_argument, "probability grid must lie in (0, 1)");
  }

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  QuantileFunction q;
  q.subject_id = subject_id;
  q.probs.assign(prob_grid.begin(), prob_grid.end());
  q.values.resize(prob_grid.size());
  for (std::size_t k = 0; k < prob_grid.size(); ++k) {
    // Type-1 quantile: smallest order statistic indexed >= n p.
    auto idx = static_cast<std::size_t>(std::ceil(n * prob_grid[k] - 1e-9));
    if (idx == 0) idx = 1;
    idx = std::min(idx, sorted.size());
    q.values[k] = sorted[idx - 1];
  }
  return q;
}

QuantileFunction density_to_quantile(const Glucodensity& g, std::span<const double> prob_grid) {
  check_increasing(g.grid, "support grid");
  check_increasing(prob_grid, "probability grid");

  // Cumulative trapezoid, normalized so the last value is exactly 1.
  std::vector<double> cdf(g.grid.size(), 0.0);
  for (std::size_t i = 1; i < g.grid.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (g.grid[i] - g.grid[i - 1]) * (g.density[i] + g.density[i - 1]);
  }
  const double total = cdf.back();
  if (!(total > 0.0)) raise(Errc::invalid_argument, "density integrates to zero");
  for (double& v : cdf) v /= total;

  QuantileFunction q;
  q.subject_id = g.subject_id;
  q.probs.assign(prob_grid.begin(), prob_grid.end());
  q.values.resize(prob_grid.size());

  std::size_t i = 1;
  for (std::size_t k = 0; k < prob_grid.size(); ++k) {
    const double p = prob_grid[k];
    if (p <= cdf.front()) {
      q.values[k] = g.grid.front();
      continue;
    }
    while (i < cdf.size() && cdf[i] < p) ++i;
    if (i >= cdf.size()) {
      q.values[k] = g.grid.back();
      continue;
    }
    const double span = cdf[i] - cdf[i - 1];
    const double frac = span > 0.0 ? (p - cdf[i - 1]) / span : 1.0;
    q.values[k] = g.grid[i - 1] + frac * (g.grid[i] - g.grid[i - 1]);
  }
  return q;
}

std::vector<double> glucose_values(const CgmSeries& series) {
  std::vector<double> v;
  v.reserve(series.records.size());
  for (const CgmRecord& r : series.records) v.push_back(r.glucose);
  return v;
}

}  // namespace distrep
