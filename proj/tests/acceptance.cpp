// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each.
// Exits nonzero if any criterion fails. Reference values are recomputed here
// with independent methods (bisection inverse CDFs, closed-form covariance
// inverses, projected gradient descent, exhaustive search) rather than by
// calling back into the library paths under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "distrep/baseline.hpp"
#include "distrep/clustering.hpp"
#include "distrep/inference.hpp"
#include "distrep/ingest.hpp"
#include "distrep/io.hpp"
#include "distrep/numeric.hpp"
#include "distrep/regression.hpp"
#include "distrep/report.hpp"
#include "distrep/rng.hpp"
#include "distrep/simulate.hpp"
#include "distrep/types.hpp"
#include "distrep/wasserstein.hpp"
#include "test_util.hpp"

using namespace distrep;
using testutil::gaussian_quantile;
using testutil::random_quantile;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::string(buf);
}

// ---- independent normal quantile: bisection on the complementary error
// function, no shared code with the production estimator ----
double oracle_normal_quantile(double p) {
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 90; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- criterion 1 ----
Outcome gaussian_w2_oracle() {
  const std::vector<double> probs = default_prob_grid(500);
  std::vector<double> z(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) z[k] = oracle_normal_quantile(probs[k]);
  auto make = [&](double mu, double sigma) {
    QuantileFunction q;
    q.probs = probs;
    q.values.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) q.values[k] = mu + sigma * z[k];
    return q;
  };

  Rng rng(901);
  double max_rel = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double mu1 = rng.uniform(60.0, 250.0), mu2 = rng.uniform(60.0, 250.0);
    const double s1 = rng.uniform(5.0, 40.0), s2 = rng.uniform(5.0, 40.0);
    const double got = w2_distance(make(mu1, s1), make(mu2, s2));
    const double ref = std::hypot(mu1 - mu2, s1 - s2);
    max_rel = std::max(max_rel, std::fabs(got - ref) / ref);
  }
  return {max_rel <= 0.005, "100 pairs, max relative error " + num(max_rel)};
}

// ---- criterion 2 ----
Outcome metric_axioms() {
  Rng rng(902);
  const std::vector<double> probs = default_prob_grid(500);
  double worst_sym = 0.0, worst_tri = 0.0, worst_self = 0.0;
  double min_shifted = 1e300;
  for (int t = 0; t < 1000; ++t) {
    const QuantileFunction a = random_quantile(rng, probs);
    const QuantileFunction b = random_quantile(rng, probs);
    const QuantileFunction c = random_quantile(rng, probs);
    const double ab = w2_distance(a, b), ba = w2_distance(b, a);
    const double ac = w2_distance(a, c), bc = w2_distance(b, c);
    worst_sym = std::max(worst_sym, std::fabs(ab - ba));
    worst_tri = std::max(worst_tri, ac - (ab + bc));
    worst_self = std::max(worst_self, w2_distance(a, a));
    QuantileFunction shifted = a;
    for (double& v : shifted.values) v += 1.0;
    min_shifted = std::min(min_shifted, w2_distance(a, shifted));
  }
  const bool ok = worst_sym <= 1e-9 && worst_tri <= 1e-9 && worst_self <= 1e-9 &&
                  min_shifted >= 1.0 - 1e-9;
  return {ok, "1000 triples; symmetry gap " + num(worst_sym) + ", triangle slack " +
                  num(worst_tri) + ", self distance " + num(worst_self) +
                  ", unit shift " + num(min_shifted, 10)};
}

// ---- criterion 3 ----
Outcome frechet_mean_optimality() {
  Rng rng(903);
  const std::vector<double> probs = default_prob_grid(200);
  auto objective = [](std::span<const QuantileFunction> sample, const QuantileFunction& m) {
    double f = 0.0;
    for (const QuantileFunction& q : sample) {
      const double d = w2_distance(q, m);
      f += d * d;
    }
    return f;
  };

  std::size_t trials = 0;
  for (int s = 0; s < 20; ++s) {
    std::vector<QuantileFunction> sample;
    for (int i = 0; i < 5; ++i) sample.push_back(random_quantile(rng, probs));
    const QuantileFunction mean = frechet_mean(sample);
    const double at_mean = objective(sample, mean);

    for (int t = 0; t < 100; ++t) {
      QuantileFunction m = mean;
      switch (t % 3) {
        case 0: {  // constant shift
          const double delta = rng.uniform(-5.0, 5.0);
          for (double& v : m.values) v += delta;
          break;
        }
        case 1: {  // monotone tilt
          const double eps = rng.uniform(0.001, 0.05);
          double bump = 0.0;
          for (double& v : m.values) {
            bump += eps * rng.uniform();
            v += bump;
          }
          break;
        }
        default: {  // convex combination toward a sample element
          const double w = rng.uniform(0.05, 1.0);
          const QuantileFunction& q = sample[rng.uniform_int(sample.size())];
          for (std::size_t k = 0; k < m.values.size(); ++k)
            m.values[k] = (1.0 - w) * m.values[k] + w * q.values[k];
          break;
        }
      }
      ++trials;
      if (objective(sample, m) < at_mean - 1e-9 * (1.0 + at_mean)) {
        return {false, "perturbation beat the barycenter on sample " + num(s, 2)};
      }
    }
  }
  return {true, num(static_cast<double>(trials), 5) + " monotone perturbations, none improved"};
}

// ---- criterion 4 ----

// Uniform-weight isotonic regression via the greatest convex minorant of the
// cumulative-sum diagram (lower hull, Andrew monotone chain); the projector
// used by the oracle minimizer below.
std::vector<double> oracle_isotonic(const std::vector<double>& v) {
  const std::size_t m = v.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + v[i];
  // Hull vertices as indices into the (i, cum[i]) diagram.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i <= m; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      const double cross = (static_cast<double>(b - a)) * (cum[i] - cum[a]) -
                           (cum[b] - cum[a]) * (static_cast<double>(i - a));
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(m);
  for (std::size_t seg = 0; seg + 1 < hull.size(); ++seg) {
    const std::size_t a = hull[seg], b = hull[seg + 1];
    const double slope = (cum[b] - cum[a]) / static_cast<double>(b - a);
    for (std::size_t i = a; i < b; ++i) out[i] = slope;
  }
  return out;
}

Outcome frechet_regression_projection() {
  Rng rng(904);
  double worst = 0.0;
  for (int inst = 0; inst < 25; ++inst) {
    const std::size_t d = 1 + static_cast<std::size_t>(inst % 2);
    std::size_t n = 3 + static_cast<std::size_t>(inst % 3);
    if (n < d + 2) n = d + 2;
    const std::size_t m = 5 + static_cast<std::size_t>(rng.uniform_int(16));
    const std::vector<double> probs = default_prob_grid(m);

    Mat x(n, d);
    std::vector<QuantileFunction> qs;
    FrechetRegressionModel model;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) x(i, c) = rng.uniform(-2.0, 2.0);
      qs.clear();
      for (std::size_t i = 0; i < n; ++i) {
        QuantileFunction q;
        q.probs = probs;
        double v = rng.uniform(80.0, 120.0);
        for (std::size_t k = 0; k < m; ++k) {
          q.values.push_back(v);
          v += rng.uniform(0.0, 5.0);
        }
        qs.push_back(std::move(q));
      }
      try {
        model = frechet_fit(x, qs);
        break;
      } catch (const Error&) {
        continue;  // redraw a near-singular covariate set
      }
    }

    // Own moments: mean, covariance (denominator n), closed-form inverse.
    std::vector<double> xbar(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) xbar[c] += x(i, c) / static_cast<double>(n);
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          cov[a * d + b] += (x(i, a) - xbar[a]) * (x(i, b) - xbar[b]) / static_cast<double>(n);
    std::vector<double> inv(d * d, 0.0);
    if (d == 1) {
      inv[0] = 1.0 / cov[0];
    } else {
      const double det = cov[0] * cov[3] - cov[1] * cov[2];
      inv[0] = cov[3] / det;
      inv[1] = -cov[1] / det;
      inv[2] = -cov[2] / det;
      inv[3] = cov[0] / det;
    }

    std::vector<double> u(d);
    for (std::size_t c = 0; c < d; ++c) u[c] = xbar[c] + rng.uniform(-3.0, 3.0);

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 1.0;
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          acc += (x(i, a) - xbar[a]) * inv[a * d + b] * (u[b] - xbar[b]);
      s[i] = acc;
    }

    // Projected gradient descent on the weighted squared-distance criterion,
    // initialized at the unweighted mean.
    std::vector<double> q(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k) q[k] += qs[i].values[k] / static_cast<double>(n);
    q = oracle_isotonic(q);
    const double eta = 0.3 * static_cast<double>(m) / (2.0 * static_cast<double>(n));
    std::vector<double> grad(m);
    for (int it = 0; it < 400; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k)
          grad[k] += 2.0 * s[i] * (q[k] - qs[i].values[k]) / static_cast<double>(m);
      for (std::size_t k = 0; k < m; ++k) q[k] -= eta * grad[k];
      q = oracle_isotonic(q);
    }

    const QuantileFunction got = frechet_predict(model, u);
    for (std::size_t k = 0; k < m; ++k)
      worst = std::max(worst, std::fabs(got.values[k] - q[k]));
  }
  return {worst <= 1e-6, "25 instances, sup-norm gap to the PGD minimizer " + num(worst)};
}

// ---- criterion 5 ----
Outcome anova_null_level() {
  const std::size_t runs = 500;
  const std::vector<double> probs = default_prob_grid(100);
  std::vector<char> reject(runs, 0);
  parallel_for(runs, 4, [&](std::size_t r) {
    Rng rng(substream_seed(905, r));
    GroupedSample sample;
    for (int g = 0; g < 2; ++g) {
      for (int i = 0; i < 25; ++i) {
        sample.quantiles.push_back(
            gaussian_quantile(rng.uniform(100.0, 140.0), rng.uniform(10.0, 20.0), probs));
        sample.labels.push_back(static_cast<std::size_t>(g));
      }
    }
    const TestResult res = anova_test(sample, 200, substream_seed(9050, r), 1);
    reject[r] = res.p_value <= 0.05 ? 1 : 0;
  });
  const double rate =
      std::accumulate(reject.begin(), reject.end(), 0.0) / static_cast<double>(runs);
  return {rate >= 0.03 && rate <= 0.08,
          "rejection rate " + num(rate) + " over 500 null runs at alpha 0.05"};
}

// ---- criterion 6 ----
Outcome energy_test_power() {
  const std::size_t runs = 100;
  const std::vector<double> probs = default_prob_grid(100);
  std::vector<char> hit(runs, 0);
  parallel_for(runs, 4, [&](std::size_t r) {
    Rng rng(substream_seed(906, r));
    std::vector<QuantileFunction> a, b;
    for (int i = 0; i < 30; ++i)
      a.push_back(gaussian_quantile(rng.uniform(90.0, 110.0), rng.uniform(8.0, 12.0), probs));
    for (int i = 0; i < 30; ++i)
      b.push_back(gaussian_quantile(rng.uniform(130.0, 150.0), rng.uniform(8.0, 12.0), probs));
    const TestResult res = energy_permutation_test(a, b, 199, substream_seed(9060, r), 1);
    hit[r] = res.p_value <= 0.01 ? 1 : 0;
  });
  const int hits = std::accumulate(hit.begin(), hit.end(), 0);
  return {hits >= 95, std::to_string(hits) + "/100 shifted cohorts at p <= 0.01"};
}

// ---- criterion 7 ----

// Between-cluster statistic, transcribed independently of the library.
double oracle_between(const DistanceMatrix& dm, const std::vector<std::size_t>& labels,
                      std::size_t k) {
  const double n = static_cast<double>(dm.size());
  auto g_mean = [&](std::size_t ga, std::size_t gb) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < dm.size(); ++i)
      for (std::size_t j = 0; j < dm.size(); ++j) {
        if (labels[i] != ga || labels[j] != gb) continue;
        total += dm.at(i, j);
        ++count;
      }
    return total / static_cast<double>(count);
  };
  std::vector<double> sizes(k, 0.0);
  for (std::size_t l : labels) sizes[l] += 1.0;
  double s = 0.0;
  for (std::size_t ga = 0; ga < k; ++ga)
    for (std::size_t gb = ga + 1; gb < k; ++gb)
      s += (sizes[ga] * sizes[gb] / (2.0 * n)) *
           (2.0 * g_mean(ga, gb) - g_mean(ga, ga) - g_mean(gb, gb));
  return s;
}

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t ka = 1 + *std::max_element(a.begin(), a.end());
  const std::size_t kb = 1 + *std::max_element(b.begin(), b.end());
  std::vector<double> table(ka * kb, 0.0), ra(ka, 0.0), rb(kb, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[a[i] * kb + b[i]] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cells = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (double v : table) sum_cells += choose2(v);
  for (double v : ra) sum_a += choose2(v);
  for (double v : rb) sum_b += choose2(v);
  const double total = choose2(static_cast<double>(a.size()));
  const double expected = sum_a * sum_b / total;
  return (sum_cells - expected) / (0.5 * (sum_a + sum_b) - expected);
}

Outcome clustering_duality_and_recovery() {
  // (a) duality: within + between is the constant total dispersion.
  {
    Rng rng(907);
    const std::vector<double> probs = default_prob_grid(40);
    std::vector<QuantileFunction> qs;
    for (int i = 0; i < 10; ++i) qs.push_back(random_quantile(rng, probs));
    const DistanceMatrix dm = distance_matrix(qs, 1);
    double total = 0.0;
    for (std::size_t i = 0; i < dm.size(); ++i)
      for (std::size_t j = 0; j < dm.size(); ++j) total += dm.at(i, j);
    total /= 2.0 * static_cast<double>(dm.size());

    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::size_t> labels(dm.size());
      for (std::size_t& l : labels) l = rng.uniform_int(3);
      labels[0] = 0;
      labels[1] = 1;
      labels[2] = 2;
      const double sum = within_objective(dm, labels) + oracle_between(dm, labels, 3);
      if (std::fabs(sum - total) > 1e-9) {
        return {false, "duality gap " + num(std::fabs(sum - total)) + " on partition " +
                           std::to_string(trial)};
      }
    }
  }

  // (b) heuristic vs exhaustive optimum on n = 8, k = 2.
  int optimal_hits = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    Rng rng(substream_seed(9071, r));
    const std::vector<double> probs = default_prob_grid(30);
    std::vector<QuantileFunction> qs;
    for (int i = 0; i < 8; ++i) qs.push_back(random_quantile(rng, probs));
    const DistanceMatrix dm = distance_matrix(qs, 1);

    double best = 1e300;
    for (std::uint32_t mask = 1; mask < 128; ++mask) {  // index 0 pinned to cluster 0
      std::vector<std::size_t> labels(8, 0);
      for (int i = 0; i < 7; ++i) labels[static_cast<std::size_t>(i) + 1] = (mask >> i) & 1u;
      best = std::min(best, within_objective(dm, labels));
    }

    ClusteringOptions opt;
    opt.k = 2;
    opt.seed = substream_seed(9072, r);
    const ClusteringResult res = kgroups_cluster(dm, opt);
    if (res.within_objective <= best + 1e-9) ++optimal_hits;
  }
  if (optimal_hits < 18) {
    return {false, "exhaustive optimum matched in only " + std::to_string(optimal_hits) +
                       "/20 runs"};
  }

  // (c) planted two-bundle recovery.
  {
    Rng rng(9073);
    const std::vector<double> probs = default_prob_grid(60);
    std::vector<QuantileFunction> qs;
    std::vector<std::size_t> truth;
    for (int i = 0; i < 6; ++i) {
      qs.push_back(gaussian_quantile(rng.uniform(98.0, 102.0), rng.uniform(9.0, 11.0), probs));
      truth.push_back(0);
    }
    for (int i = 0; i < 6; ++i) {
      qs.push_back(gaussian_quantile(rng.uniform(198.0, 202.0), rng.uniform(19.0, 21.0), probs));
      truth.push_back(1);
    }
    ClusteringOptions opt;
    opt.k = 2;
    opt.seed = 3;
    const ClusteringResult res = kgroups_cluster(distance_matrix(qs, 1), opt);
    const double ari = adjusted_rand_index(res.labels, truth);
    if (!(ari >= 1.0 - 1e-12)) return {false, "planted bundles: ARI " + num(ari)};
  }

  return {true, "duality within 1e-9 on 50 partitions; exhaustive optimum " +
                    std::to_string(optimal_hits) + "/20; planted-bundle ARI 1"};
}

// ---- criterion 8 ----
Outcome representation_ordering() {
  CohortConfig cfg;
  cfg.n_subjects = 200;
  cfg.days = 4;
  cfg.seed = 20240301;
  const SimulatedCohort cohort = simulate_cohort(cfg, 4);

  std::vector<CgmSeries> cleaned;
  cleaned.reserve(cohort.series.size());
  for (const CgmSeries& s : cohort.series) cleaned.push_back(clean_series(s));

  Table table;
  table.columns = {"archetype", "a1c_like", "variability_like", "homa_like"};
  std::vector<std::string> normo_ids;
  for (const SubjectTruth& t : cohort.truths) {
    table.ids.push_back(t.subject_id);
    table.rows.push_back({archetype_name(t.archetype), format_double(t.a1c_like),
                          format_double(t.variability_like), format_double(t.homa_like)});
    if (t.archetype == Archetype::normoglycemic) normo_ids.push_back(t.subject_id);
  }

  const std::vector<std::string> cols{"a1c_like", "variability_like", "homa_like"};
  ReportOptions opt;
  opt.threads = 4;
  const ReportResult rep = compare_representations(cleaned, table, cols, normo_ids, opt);

  bool ok = true;
  std::ostringstream detail;
  for (const BiomarkerComparison& c : rep.comparisons) {
    const double rivals =
        std::max({c.r2_tir_decile, c.r2_tir_ada, c.r2_mean_glucose});
    ok = ok && c.r2_glucodensity > rivals;
    detail << c.biomarker << " " << num(c.r2_glucodensity) << ">" << num(rivals) << "; ";
  }
  return {ok, "n=200, 4 days: " + detail.str() + "glucodensity leads all three"};
}

// ---- criterion 9 ----
Outcome cleaning_day_rule() {
  constexpr Instant day0 = Instant{19783} * kSecondsPerDay;
  CgmSeries raw;
  raw.subject_id = "A";
  raw.nominal_interval = 300;
  for (int day = 0; day < 4; ++day) {
    for (int tick = 0; tick < 288; ++tick) {
      const Instant when = day0 + Instant{day} * kSecondsPerDay + Instant{tick} * 300;
      const Instant in_day = when - day0 - Instant{day} * kSecondsPerDay;
      // Three missing hours on day 2: readings from 10:00 to 12:55 dropped.
      if (day == 1 && in_day >= 10 * 3600 && in_day < 13 * 3600) continue;
      raw.records.push_back({"A", when, 110.0});
    }
  }

  const CgmSeries cleaned = clean_series(raw);
  std::size_t day_counts[4] = {0, 0, 0, 0};
  for (const CgmRecord& r : cleaned.records)
    ++day_counts[(r.timestamp - day0) / kSecondsPerDay];
  const bool ok = day_counts[0] == 288 && day_counts[1] == 0 && day_counts[2] == 288 &&
                  day_counts[3] == 288;
  return {ok, "per-day survivors " + std::to_string(day_counts[0]) + "/" +
                  std::to_string(day_counts[1]) + "/" + std::to_string(day_counts[2]) + "/" +
                  std::to_string(day_counts[3]) + " (day 2 dropped whole)"};
}

// ---- criterion 10 ----
Outcome determinism() {
  Rng rng(910);
  const std::vector<double> probs = default_prob_grid(60);

  std::vector<QuantileFunction> qs;
  GroupedSample grouped;
  for (int g = 0; g < 3; ++g) {
    for (int i = 0; i < 5; ++i) {
      QuantileFunction q =
          gaussian_quantile(100.0 + 10.0 * g + rng.uniform(-4.0, 4.0),
                            10.0 + rng.uniform(0.0, 4.0), probs);
      qs.push_back(q);
      grouped.quantiles.push_back(std::move(q));
      grouped.labels.push_back(static_cast<std::size_t>(g));
    }
  }

  const DistanceMatrix d1 = distance_matrix(qs, 1);
  const DistanceMatrix d4 = distance_matrix(qs, 4);
  const DistanceMatrix d1b = distance_matrix(qs, 1);
  for (std::size_t i = 0; i < d1.size(); ++i)
    for (std::size_t j = 0; j < d1.size(); ++j)
      if (d1.at(i, j) != d4.at(i, j) || d1.at(i, j) != d1b.at(i, j))
        return {false, "distance matrix differs across runs or thread counts"};

  const TestResult a1 = anova_test(grouped, 100, 77, 1);
  const TestResult a4 = anova_test(grouped, 100, 77, 4);
  const TestResult a1b = anova_test(grouped, 100, 77, 1);
  if (a1.statistic != a4.statistic || a1.p_value != a4.p_value ||
      a1.p_value != a1b.p_value)
    return {false, "anova differs across runs or thread counts"};

  const TestResult e1 = k_sample_energy_test(grouped, 99, 78, 1);
  const TestResult e4 = k_sample_energy_test(grouped, 99, 78, 4);
  if (e1.statistic != e4.statistic || e1.p_value != e4.p_value)
    return {false, "energy test differs across thread counts"};

  ClusteringOptions copt;
  copt.k = 3;
  copt.seed = 79;
  copt.threads = 1;
  const ClusteringResult c1 = kgroups_cluster(d1, copt);
  copt.threads = 4;
  const ClusteringResult c4 = kgroups_cluster(d1, copt);
  if (c1.labels != c4.labels || c1.within_objective != c4.within_objective)
    return {false, "clustering differs across thread counts"};

  CohortConfig cfg;
  cfg.n_subjects = 25;
  cfg.days = 2;
  cfg.seed = 80;
  const SimulatedCohort s1 = simulate_cohort(cfg, 1);
  const SimulatedCohort s4 = simulate_cohort(cfg, 4);
  const SimulatedCohort s1b = simulate_cohort(cfg, 1);
  for (std::size_t i = 0; i < s1.series.size(); ++i) {
    for (std::size_t k = 0; k < s1.series[i].records.size(); ++k) {
      const CgmRecord &r1 = s1.series[i].records[k], &r4 = s4.series[i].records[k],
                      &r1b = s1b.series[i].records[k];
      if (r1.glucose != r4.glucose || r1.glucose != r1b.glucose ||
          r1.timestamp != r4.timestamp)
        return {false, "simulator differs across runs or thread counts"};
    }
    if (s1.truths[i].a1c_like != s4.truths[i].a1c_like)
      return {false, "planted biomarkers differ across thread counts"};
  }

  return {true, "distance matrix, anova, energy, clustering, simulator bit-identical "
                "across reruns and threads {1,4}"};
}

struct Entry {
  const char* name;
  Outcome (*fn)();
  double time_cap_seconds;  // 0 = no cap
};

}  // namespace

int main() {
  const Entry entries[] = {
      {"gaussian_w2_oracle", gaussian_w2_oracle, 5.0},
      {"metric_axioms", metric_axioms, 10.0},
      {"frechet_mean_optimality", frechet_mean_optimality, 10.0},
      {"frechet_regression_projection", frechet_regression_projection, 0.0},
      {"anova_null_level", anova_null_level, 300.0},
      {"energy_test_power", energy_test_power, 120.0},
      {"clustering_duality_and_recovery", clustering_duality_and_recovery, 0.0},
      {"representation_ordering", representation_ordering, 180.0},
      {"cleaning_day_rule", cleaning_day_rule, 0.0},
      {"determinism", determinism, 0.0},
  };

  bool all_pass = true;
  for (const Entry& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (e.time_cap_seconds > 0.0 && secs >= e.time_cap_seconds) {
      o.pass = false;
      o.details += " [over time budget " + num(e.time_cap_seconds, 3) + " s]";
    }
    std::printf("%s - %s (%s; %.1f s)\n", o.pass ? "PASS" : "FAIL", e.name,
                o.details.c_str(), secs);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
