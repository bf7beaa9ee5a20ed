#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

enum class Archetype { normoglycemic, prediabetic, diabetic };

const char* archetype_name(Archetype a);

struct CohortConfig {
  std::size_t n_subjects = 100;
  std::size_t days = 4;                    // monitoring days, 2..6
  Instant interval = 300;                  // seconds between readings
  std::array<double, 3> archetype_mix = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  double noise_sd = 2.0;                   // sensor noise, mg/dL
  std::uint64_t seed = 0;
};

// Generating parameters and planted biomarkers for one subject. Biomarkers
// are exact functionals of the subject's stationary distribution (a uniform
// mixture over the day's tick times of normals around the diurnal drift), so
// regression targets have known information ceilings.
struct SubjectTruth {
  std::string subject_id;
  Archetype archetype = Archetype::normoglycemic;
  double level = 0.0;                  // baseline of the diurnal drift
  double circadian_amp = 0.0;          // amplitude of the sine component
  double sigma_dev = 0.0;              // stationary deviation scale
  std::array<double, 3> meal_amps = {0.0, 0.0, 0.0};
  double a1c_like = 0.0;               // mean plus weighted hyperglycemic excess
  double variability_like = 0.0;       // stationary standard deviation
  double homa_like = 0.0;              // convex exponential functional
};

struct SimulatedCohort {
  std::vector<CgmSeries> series;
  std::vector<SubjectTruth> truths;
};

// Diurnal drift (mg/dL) at hour-of-day tau for a subject's parameters:
// level + circadian sine (trough near 06:00) + three meal bumps.
double diurnal_drift(const SubjectTruth& truth, double tau_hours);

// Quantile function of the subject's stationary distribution on prob_grid,
// inverted numerically from the mixture CDF.
QuantileFunction stationary_quantile(const SubjectTruth& truth, std::span<const double> prob_grid,
                                     Instant interval = 300);

// Seeded synthetic cohort: per subject, an archetype draw, parameter draws,
// then a mean-reverting diurnal process sampled at `interval` plus sensor
// noise, clamped inside the device range so ingest cleaning never discards
// anything. Deterministic given config.seed, independent of thread count.
SimulatedCohort simulate_cohort(const CohortConfig& config, int threads = 1);

}  // namespace distrep
