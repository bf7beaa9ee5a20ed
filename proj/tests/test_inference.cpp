#include "doctest.h"

#include <cmath>
#include <vector>

#include "distrep/densities.hpp"
#include "distrep/inference.hpp"
#include "distrep/wasserstein.hpp"
#include "test_util.hpp"

using namespace distrep;
using testutil::gaussian_quantile;
using testutil::random_quantile;
using testutil::thrown_code;

namespace {

// Direct transcription of the statistic for a reference computation: all
// means and variances via plain loops over w2 distances.
struct NaiveAnova {
  double f_n = 0.0, r_n = 0.0, t_n = 0.0;
};

NaiveAnova naive_anova(const std::vector<QuantileFunction>& qs,
                       const std::vector<std::size_t>& labels, std::size_t k) {
  const std::size_t n = qs.size();
  auto group_mean = [&](std::size_t g) {
    std::vector<const QuantileFunction*> members;
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i] == g) members.push_back(&qs[i]);
    QuantileFunction m = *members[0];
    for (std::size_t p = 0; p < m.values.size(); ++p) {
      double s = 0.0;
      for (const QuantileFunction* q : members) s += q->values[p];
      m.values[p] = s / static_cast<double>(members.size());
    }
    return m;
  };
  QuantileFunction pooled = qs[0];
  for (std::size_t p = 0; p < pooled.values.size(); ++p) {
    double s = 0.0;
    for (const QuantileFunction& q : qs) s += q.values[p];
    pooled.values[p] = s / static_cast<double>(n);
  }

  std::vector<double> lambda(k), vj(k), sigma2(k);
  double vp = 0.0;
  for (const QuantileFunction& q : qs) {
    const double d = w2_distance(q, pooled);
    vp += d * d / static_cast<double>(n);
  }
  for (std::size_t g = 0; g < k; ++g) {
    const QuantileFunction m = group_mean(g);
    double nj = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != g) continue;
      nj += 1.0;
      const double d = w2_distance(qs[i], m);
      sum2 += d * d;
      sum4 += d * d * d * d;
    }
    lambda[g] = nj / static_cast<double>(n);
    vj[g] = sum2 / nj;
    sigma2[g] = sum4 / nj - vj[g] * vj[g];
  }

  NaiveAnova out;
  double weighted = 0.0;
  for (std::size_t g = 0; g < k; ++g) weighted += lambda[g] * vj[g];
  out.f_n = vp - weighted;
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t l = g + 1; l < k; ++l)
      out.r_n += lambda[g] * lambda[l] * (vj[g] - vj[l]) * (vj[g] - vj[l]) /
                 (sigma2[g] * sigma2[l]);
  double denom_r = 0.0, denom_f = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    denom_r += lambda[g] / sigma2[g];
    denom_f += lambda[g] * sigma2[g];
  }
  out.t_n = static_cast<double>(n) * out.r_n / denom_r +
            static_cast<double>(n) * out.f_n * out.f_n / denom_f;
  return out;
}

GroupedSample two_group_sample(std::uint64_t seed, std::size_t n_per, double shift,
                               std::size_t m = 60) {
  Rng rng(seed);
  GroupedSample s;
  const std::vector<double> probs = default_prob_grid(m);
  for (std::size_t i = 0; i < 2 * n_per; ++i) {
    const bool second = i >= n_per;
    const double mu = rng.uniform(100.0, 130.0) + (second ? shift : 0.0);
    const double sigma = rng.uniform(8.0, 16.0);
    s.quantiles.push_back(gaussian_quantile(mu, sigma, probs));
    s.labels.push_back(second ? 1 : 0);
  }
  return s;
}

}  // namespace

TEST_CASE("anova statistic matches a naive transcription") {
  GroupedSample s = two_group_sample(7001, 3, 15.0);
  const AnovaComponents c = anova_statistic(s);
  const NaiveAnova ref = naive_anova(s.quantiles, s.labels, 2);
  CHECK(c.f_n == doctest::Approx(ref.f_n).epsilon(1e-12));
  CHECK(c.r_n == doctest::Approx(ref.r_n).epsilon(1e-12));
  CHECK(c.t_n == doctest::Approx(ref.t_n).epsilon(1e-12));
}

TEST_CASE("anova statistic on three groups matches the naive transcription") {
  Rng rng(7002);
  GroupedSample s;
  const std::vector<double> probs = default_prob_grid(40);
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t i = 0; i < 4 + g; ++i) {
      s.quantiles.push_back(
          gaussian_quantile(rng.uniform(90.0, 160.0), rng.uniform(5.0, 25.0), probs));
      s.labels.push_back(g);
    }
  const AnovaComponents c = anova_statistic(s);
  const NaiveAnova ref = naive_anova(s.quantiles, s.labels, 3);
  CHECK(c.f_n == doctest::Approx(ref.f_n).epsilon(1e-12));
  CHECK(c.r_n == doctest::Approx(ref.r_n).epsilon(1e-12));
  CHECK(c.t_n == doctest::Approx(ref.t_n).epsilon(1e-12));
}

TEST_CASE("identical groups give an exactly zero statistic") {
  Rng rng(7003);
  const std::vector<double> probs = default_prob_grid(50);
  std::vector<QuantileFunction> base;
  for (int i = 0; i < 5; ++i) base.push_back(random_quantile(rng, probs));
  GroupedSample s;
  for (int copy = 0; copy < 2; ++copy)
    for (const QuantileFunction& q : base) {
      s.quantiles.push_back(q);
      s.labels.push_back(static_cast<std::size_t>(copy));
    }
  const AnovaComponents c = anova_statistic(s);
  CHECK(c.f_n == 0.0);
  CHECK(c.r_n == 0.0);
  CHECK(c.t_n == 0.0);

  const TestResult r = anova_test(s, 99, 1234);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("anova test is deterministic and thread-count independent") {
  const GroupedSample s = two_group_sample(7004, 10, 8.0);
  const TestResult a = anova_test(s, 100, 42, 1);
  const TestResult b = anova_test(s, 100, 42, 4);
  const TestResult c = anova_test(s, 100, 42, 1);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_value == b.p_value);
  CHECK(a.p_value == c.p_value);
  CHECK(a.p_value >= 1.0 / 101.0);
  CHECK(a.p_value <= 1.0);
  const AnovaComponents direct = anova_statistic(s);
  CHECK(a.statistic == doctest::Approx(direct.t_n).epsilon(1e-9));
}

TEST_CASE("anova test rejects an obvious shift and accepts the null law") {
  const GroupedSample shifted = two_group_sample(7005, 20, 60.0);
  CHECK(anova_test(shifted, 199, 7).p_value < 0.02);
  const GroupedSample null = two_group_sample(7006, 20, 0.0);
  CHECK(anova_test(null, 199, 7).p_value > 0.05);
}

TEST_CASE("anova input validation") {
  GroupedSample s = two_group_sample(7007, 3, 0.0);
  s.labels.assign(s.labels.size(), 0);
  CHECK(thrown_code([&] { anova_statistic(s); }) == Errc::invalid_argument);

  GroupedSample gap = two_group_sample(7008, 3, 0.0);
  for (std::size_t& l : gap.labels)
    if (l == 1) l = 2;  // group index 1 empty
  CHECK(thrown_code([&] { validate_grouped(gap); }) == Errc::invalid_argument);

  // A constant group has zero variance of squared distances.
  const std::vector<double> probs = default_prob_grid(30);
  GroupedSample degen;
  for (int i = 0; i < 3; ++i) {
    degen.quantiles.push_back(gaussian_quantile(100.0, 10.0, probs));
    degen.labels.push_back(0);
    degen.quantiles.push_back(gaussian_quantile(120.0 + i, 10.0, probs));
    degen.labels.push_back(1);
  }
  CHECK(thrown_code([&] { anova_statistic(degen); }) == Errc::degenerate_group_variance);
}

TEST_CASE("two singleton samples give twice their distance as energy") {
  const std::vector<double> probs = default_prob_grid(80);
  const QuantileFunction x = gaussian_quantile(100.0, 10.0, probs);
  const QuantileFunction y = gaussian_quantile(140.0, 15.0, probs);
  const std::vector<QuantileFunction> a{x}, b{y};
  CHECK(energy_statistic(a, b) ==
        doctest::Approx(2.0 * w2_distance(x, y)).epsilon(1e-12));
}

TEST_CASE("energy statistic matches brute-force double sums") {
  Rng rng(8001);
  const std::vector<double> probs = default_prob_grid(40);
  std::vector<QuantileFunction> a, b;
  for (int i = 0; i < 5; ++i) a.push_back(random_quantile(rng, probs));
  for (int i = 0; i < 7; ++i) b.push_back(random_quantile(rng, probs));
  double cross = 0.0, within_a = 0.0, within_b = 0.0;
  for (const auto& qa : a)
    for (const auto& qb : b) cross += w2_distance(qa, qb);
  for (const auto& q1 : a)
    for (const auto& q2 : a) within_a += w2_distance(q1, q2);
  for (const auto& q1 : b)
    for (const auto& q2 : b) within_b += w2_distance(q1, q2);
  const double expected = 2.0 * cross / 35.0 - within_a / 25.0 - within_b / 49.0;
  CHECK(energy_statistic(a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("k-sample energy reduces to the weighted two-sample statistic") {
  Rng rng(8002);
  const std::vector<double> probs = default_prob_grid(40);
  GroupedSample s;
  std::vector<QuantileFunction> a, b;
  for (int i = 0; i < 6; ++i) {
    a.push_back(random_quantile(rng, probs));
    s.quantiles.push_back(a.back());
    s.labels.push_back(0);
  }
  for (int i = 0; i < 4; ++i) {
    b.push_back(random_quantile(rng, probs));
    s.quantiles.push_back(b.back());
    s.labels.push_back(1);
  }
  const double expected = (6.0 * 4.0 / (2.0 * 10.0)) * energy_statistic(a, b);
  CHECK(k_sample_energy(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("k-sample energy matches brute force on three groups") {
  Rng rng(8003);
  const std::vector<double> probs = default_prob_grid(30);
  GroupedSample s;
  const std::vector<std::size_t> sizes{3, 5, 4};
  for (std::size_t g = 0; g < sizes.size(); ++g)
    for (std::size_t i = 0; i < sizes[g]; ++i) {
      s.quantiles.push_back(random_quantile(rng, probs));
      s.labels.push_back(g);
    }
  auto g_mean = [&](std::size_t ga, std::size_t gb) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.quantiles.size(); ++i)
      for (std::size_t j = 0; j < s.quantiles.size(); ++j) {
        if (s.labels[i] != ga || s.labels[j] != gb) continue;
        total += w2_distance(s.quantiles[i], s.quantiles[j]);
        ++count;
      }
    return total / static_cast<double>(count);
  };
  double expected = 0.0;
  const double n = 12.0;
  for (std::size_t ga = 0; ga < 3; ++ga)
    for (std::size_t gb = ga + 1; gb < 3; ++gb) {
      const double nj = static_cast<double>(sizes[ga]), nl = static_cast<double>(sizes[gb]);
      expected +=
          (nj * nl / (2.0 * n)) * (2.0 * g_mean(ga, gb) - g_mean(ga, ga) - g_mean(gb, gb));
    }
  CHECK(k_sample_energy(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("energy permutation test calibrates and is deterministic") {
  Rng rng(8004);
  const std::vector<double> probs = default_prob_grid(40);
  std::vector<QuantileFunction> a, b;
  for (int i = 0; i < 15; ++i) {
    a.push_back(gaussian_quantile(rng.uniform(95.0, 125.0), rng.uniform(8.0, 14.0), probs));
    b.push_back(gaussian_quantile(rng.uniform(155.0, 185.0), rng.uniform(8.0, 14.0), probs));
  }
  const TestResult r1 = energy_permutation_test(a, b, 199, 99, 1);
  const TestResult r4 = energy_permutation_test(a, b, 199, 99, 4);
  CHECK(r1.p_value == r4.p_value);
  CHECK(r1.statistic == r4.statistic);
  CHECK(r1.p_value == doctest::Approx(1.0 / 200.0).epsilon(1e-12));  // total separation

  // Same law in both groups: p should not be extreme.
  std::vector<QuantileFunction> c, d;
  for (int i = 0; i < 15; ++i) {
    c.push_back(gaussian_quantile(rng.uniform(95.0, 125.0), rng.uniform(8.0, 14.0), probs));
    d.push_back(gaussian_quantile(rng.uniform(95.0, 125.0), rng.uniform(8.0, 14.0), probs));
  }
  CHECK(energy_permutation_test(c, d, 199, 99).p_value > 0.05);
}

TEST_CASE("k-sample permutation test is deterministic across threads") {
  Rng rng(8005);
  const std::vector<double> probs = default_prob_grid(30);
  GroupedSample s;
  for (std::size_t g = 0; g < 3; ++g)
    for (int i = 0; i < 8; ++i) {
      s.quantiles.push_back(
          gaussian_quantile(rng.uniform(100.0, 150.0), rng.uniform(8.0, 14.0), probs));
      s.labels.push_back(g);
    }
  const TestResult r1 = k_sample_energy_test(s, 99, 321, 1);
  const TestResult r4 = k_sample_energy_test(s, 99, 321, 4);
  CHECK(r1.p_value == r4.p_value);
  CHECK(r1.statistic == r4.statistic);
  CHECK(r1.resamples == 99);
}
