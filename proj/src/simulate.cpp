#include "distrep/simulate.hpp"

#include <cmath>
#include <cstdio>

#include "distrep/errors.hpp"
#include "distrep/numeric.hpp"
#include "distrep/rng.hpp"
#include "distrep/timeutil.hpp"

namespace distrep {

namespace {

constexpr double kTwoPi = 6.283185307179586477;
// First sample instant: 2024-03-01T00:00:00Z.
constexpr Instant kStartInstant = Instant{19783} * kSecondsPerDay;
constexpr double kMealHours[3] = {8.0, 13.5, 20.5};
constexpr double kMealWidthHours = 0.75;
// Mean reversion: 45-minute relaxation scale for 5-minute steps.
constexpr double kRelaxMinutes = 45.0;
// Scale of the exponential biomarker.
constexpr double kHomaScale = 45.0;
constexpr double kHomaCenter = 120.0;
constexpr double kHyperThreshold = 140.0;
constexpr double kHyperWeight = 0.8;

struct Band {
  double lo, hi;
};

struct ArchetypeBands {
  Band level, amp, sigma, meal;
};

ArchetypeBands bands_for(Archetype a) {
  switch (a) {
    case Archetype::normoglycemic:
      return {{86, 98}, {3, 8}, {6, 12}, {12, 24}};
    case Archetype::prediabetic:
      return {{98, 118}, {5, 12}, {10, 20}, {25, 45}};
    case Archetype::diabetic:
      return {{120, 190}, {8, 18}, {18, 38}, {35, 70}};
  }
  raise(Errc::invalid_argument, "unknown archetype");
}

std::vector<double> tick_drifts(const SubjectTruth& truth, Instant interval) {
  const std::size_t ticks = static_cast<std::size_t>(kSecondsPerDay / interval);
  std::vector<double> m(ticks);
  for (std::size_t t = 0; t < ticks; ++t) {
    const double tau = static_cast<double>(t * static_cast<std::size_t>(interval)) / 3600.0;
    m[t] = diurnal_drift(truth, tau);
  }
  return m;
}

void plant_biomarkers(SubjectTruth& truth, Instant interval) {
  const std::vector<double> m = tick_drifts(truth, interval);
  const double sigma = truth.sigma_dev;

  const double mean_level = mean(m);
  double hyper = 0.0;   // E (X - threshold)_+ averaged over ticks
  double expo = 0.0;    // E exp((X - center)/scale) averaged over ticks
  double drift_var = 0.0;
  for (const double mk : m) {
    const double z = (mk - kHyperThreshold) / sigma;
    hyper += (mk - kHyperThreshold) * normal_cdf(z) + sigma * normal_pdf(z);
    expo += std::exp((mk - kHomaCenter) / kHomaScale +
                     sigma * sigma / (2.0 * kHomaScale * kHomaScale));
    drift_var += (mk - mean_level) * (mk - mean_level);
  }
  const double ticks = static_cast<double>(m.size());
  truth.a1c_like = mean_level + kHyperWeight * hyper / ticks;
  truth.variability_like = std::sqrt(drift_var / ticks + sigma * sigma);
  truth.homa_like = expo / ticks;
}

}  // namespace

const char* archetype_name(Archetype a) {
  switch (a) {
    case Archetype::normoglycemic: return "normo";
    case Archetype::prediabetic: return "prediabetic";
    case Archetype::diabetic: return "diabetic";
  }
  return "unknown";
}

double diurnal_drift(const SubjectTruth& truth, double tau_hours) {
  double v = truth.level +
             truth.circadian_amp * std::sin(kTwoPi * (tau_hours - 6.0) / 24.0);
  for (int meal = 0; meal < 3; ++meal) {
    const double d = tau_hours - kMealHours[meal];
    v += truth.meal_amps[static_cast<std::size_t>(meal)] *
         std::exp(-d * d / (2.0 * kMealWidthHours * kMealWidthHours));
  }
  return v;
}

QuantileFunction stationary_quantile(const SubjectTruth& truth, std::span<const double> prob_grid,
                                     Instant interval) {
  const std::vector<double> m = tick_drifts(truth, interval);
  const double sigma = truth.sigma_dev;
  const double ticks = static_cast<double>(m.size());

  const auto mixture_cdf = [&](double x) {
    double s = 0.0;
    for (const double mk : m) s += normal_cdf((x - mk) / sigma);
    return s / ticks;
  };

  double lo = m[0], hi = m[0];
  for (const double mk : m) {
    lo = std::min(lo, mk);
    hi = std::max(hi, mk);
  }
  lo -= 10.0 * sigma;
  hi += 10.0 * sigma;

  QuantileFunction q;
  q.subject_id = truth.subject_id;
  q.probs.assign(prob_grid.begin(), prob_grid.end());
  q.values.resize(prob_grid.size());
  // prob_grid is increasing, so the previous solution is a valid lower
  // bracket for the next point.
  double bracket_lo = lo;
  for (std::size_t k = 0; k < prob_grid.size(); ++k) {
    double a = bracket_lo, b = hi;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      if (mixture_cdf(mid) < prob_grid[k]) {
        a = mid;
      } else {
        b = mid;
      }
    }
    q.values[k] = 0.5 * (a + b);
    bracket_lo = a;
  }
  return q;
}

SimulatedCohort simulate_cohort(const CohortConfig& config, int threads) {
  if (config.days < 2 || config.days > 6) {
    raise(Errc::invalid_argument, "days must be between 2 and 6");
  }
  if (config.interval <= 0 || kSecondsPerDay % config.interval != 0) {
    raise(Errc::invalid_argument, "interval must divide one day");
  }
  const double mix_total =
      config.archetype_mix[0] + config.archetype_mix[1] + config.archetype_mix[2];
  if (!(std::fabs(mix_total - 1.0) < 1e-9) || config.archetype_mix[0] < 0.0 ||
      config.archetype_mix[1] < 0.0 || config.archetype_mix[2] < 0.0) {
    raise(Errc::invalid_argument, "archetype mix must be nonnegative and sum to 1");
  }
  if (!(config.noise_sd >= 0.0)) raise(Errc::invalid_argument, "noise_sd must be >= 0");

  SimulatedCohort cohort;
  cohort.series.resize(config.n_subjects);
  cohort.truths.resize(config.n_subjects);

  const std::size_t ticks_per_day = static_cast<std::size_t>(kSecondsPerDay / config.interval);

  parallel_for(config.n_subjects, threads, [&](std::size_t subject) {
    Rng rng(substream_seed(config.seed, subject));
    char name[16];
    std::snprintf(name, sizeof(name), "S%04zu", subject + 1);

    SubjectTruth truth;
    truth.subject_id = name;
    const double u = rng.uniform();
    if (u < config.archetype_mix[0]) {
      truth.archetype = Archetype::normoglycemic;
    } else if (u < config.archetype_mix[0] + config.archetype_mix[1]) {
      truth.archetype = Archetype::prediabetic;
    } else {
      truth.archetype = Archetype::diabetic;
    }
    const ArchetypeBands bands = bands_for(truth.archetype);
    truth.level = rng.uniform(bands.level.lo, bands.level.hi);
    truth.circadian_amp = rng.uniform(bands.amp.lo, bands.amp.hi);
    truth.sigma_dev = rng.uniform(bands.sigma.lo, bands.sigma.hi);
    for (auto& amp : truth.meal_amps) amp = rng.uniform(bands.meal.lo, bands.meal.hi);
    plant_biomarkers(truth, config.interval);

    const std::vector<double> drift = tick_drifts(truth, config.interval);
    // One-step autocorrelation of the mean-reverting deviation.
    const double step_minutes = static_cast<double>(config.interval) / 60.0;
    const double a = std::exp(-step_minutes / kRelaxMinutes);
    const double innovation_sd = truth.sigma_dev * std::sqrt(1.0 - a * a);

    CgmSeries series;
    series.subject_id = name;
    series.nominal_interval = config.interval;
    series.records.reserve(config.days * ticks_per_day);

    double deviation = truth.sigma_dev * rng.normal();
    for (std::size_t day = 0; day < config.days; ++day) {
      for (std::size_t t = 0; t < ticks_per_day; ++t) {
        const Instant when = kStartInstant +
                             static_cast<Instant>(day) * kSecondsPerDay +
                             static_cast<Instant>(t) * config.interval;
        const double x = drift[t] + deviation;
        double reading = x + config.noise_sd * rng.normal();
        reading = std::min(std::max(reading, 40.5), 399.5);
        series.records.push_back({truth.subject_id, when, reading});
        deviation = a * deviation + innovation_sd * rng.normal();
      }
    }
    cohort.series[subject] = std::move(series);
    cohort.truths[subject] = truth;
  });
  return cohort;
}

}  // namespace distrep
