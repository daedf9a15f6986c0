#include "doctest.h"

#include <cmath>
#include <random>

#include "impure/densities.hpp"
#include "impure/error.hpp"
#include "impure/measures.hpp"
#include "impure/partitions.hpp"
#include "impure/prevalence.hpp"
#include "impure/sampling.hpp"
#include "oracles.hpp"

using namespace impure;

namespace {

std::vector<std::pair<double, double>> random_alpha_pairs(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> out;
  while (out.size() < n) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a > 1e-9) out.emplace_back(a, b);
  }
  return out;
}

EmpiricalPopulation line_population(std::vector<double> xs) {
  EmpiricalPopulation pop;
  pop.dim = 1;
  for (double x : xs) pop.points.push_back({x});
  return pop;
}

struct GaussianRegion {
  Region region;
  double p_d;
  double n_d;
};

// Positive side of the delta = 1/2 partition, with its pure measures.
GaussianRegion gaussian_region() {
  const auto [P, N] = gaussian_example_densities();
  const auto engine = MeasureEngine::quadrature(Box::cube(2, -8.0, 12.0), 64, 1e-10);
  Region r{optimal_partition_pure(P, N, 0.5), Label::positive, "delta=0.5 positive"};
  return {r, measure(P, r.partition, Label::positive, engine),
          measure(N, r.partition, Label::positive, engine)};
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double mse = 0.0;
};

template <class F>
Moments repeat(std::size_t reps, double truth, F&& estimate) {
  std::vector<double> v;
  for (std::size_t i = 0; i < reps; ++i) v.push_back(estimate(i));
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(reps);
  for (double x : v) {
    m.var += (x - m.mean) * (x - m.mean);
    m.mse += (x - truth) * (x - truth);
  }
  m.var /= static_cast<double>(reps - 1);
  m.mse /= static_cast<double>(reps);
  return m;
}

}  // namespace

TEST_CASE("mixture matrix structure") {
  const MixtureMatrix m(0.2, 0.8);
  const auto e = m.entries();
  CHECK(e[0][0] + e[0][1] == 1.0);
  CHECK(e[1][0] + e[1][1] == 1.0);
  CHECK(m.determinant() == doctest::Approx(e[0][0] * e[1][1] - e[0][1] * e[1][0]));
  CHECK(m.determinant() == doctest::Approx(-0.6));
}

TEST_CASE("mixture matrix round trip on random pairs") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& [a, h] : random_alpha_pairs(1000, 11)) {
    const MixtureMatrix m(a, h);
    const double p = u(rng);
    const double n = u(rng);
    const auto [ql, qh] = m.forward(p, n);
    const auto [p2, n2] = m.inverse(ql, qh);
    CHECK(std::abs(p2 - p) < 1e-12);
    CHECK(std::abs(n2 - n) < 1e-12);
    // Independent solve of the same system.
    const auto [po, no] = oracle::solve2(a, 1 - a, h, 1 - h, ql, qh);
    CHECK(std::abs(p2 - po) < 1e-12);
    CHECK(std::abs(n2 - no) < 1e-12);
  }
}

TEST_CASE("pure measures from impure: closed cases") {
  const auto [p, n] = pure_measures_from_impure(0.3, 0.7, 0.0, 1.0);
  CHECK(p == 0.7);
  CHECK(n == 0.3);
  for (const auto& [a, h] : random_alpha_pairs(20, 3)) {
    const auto [pc, nc] = pure_measures_from_impure(0.42, 0.42, a, h);
    CHECK(pc == doctest::Approx(0.42).epsilon(1e-9));
    CHECK(nc == doctest::Approx(0.42).epsilon(1e-9));
  }
  const auto [p2, n2] = pure_measures_from_impure(0.3, 0.7, 0.2, 0.8);
  const auto [po, no] = oracle::solve2(0.2, 0.8, 0.8, 0.2, 0.3, 0.7);
  CHECK(p2 == doctest::Approx(po).epsilon(1e-14));
  CHECK(n2 == doctest::Approx(no).epsilon(1e-14));
  // Substituting back reproduces the impure measures.
  CHECK(0.2 * p2 + 0.8 * n2 == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(0.8 * p2 + 0.2 * n2 == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("singular or invalid mixture matrices") {
  CHECK_THROWS_AS(MixtureMatrix(0.4, 0.4), LinearDependenceError);
  CHECK_THROWS_AS(MixtureMatrix(0.5, 0.4), LinearDependenceError);
  CHECK_THROWS_AS(MixtureMatrix(0.4, 0.4 + 1e-12), LinearDependenceError);
  CHECK_THROWS_AS(MixtureMatrix(-0.1, 0.4), InputError);
  CHECK_THROWS_AS(MixtureMatrix(0.1, 1.4), InputError);
  CHECK_THROWS_AS(pure_measures_from_impure(0.3, 0.5, 0.6, 0.6), LinearDependenceError);
}

TEST_CASE("alpha from delta") {
  const auto [a0, h0] = alpha_from_delta(0.0, 1.0);
  CHECK(a0 == 0.0);
  CHECK(h0 == 1.0);
  const auto [a1, h1] = alpha_from_delta(0.2, 0.8);
  CHECK(a1 == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(h1 == doctest::Approx(0.8).epsilon(1e-14));

  for (const auto& [a, h] : random_alpha_pairs(100, 8)) {
    const auto b = pseudoprevalence_bounds(a, h);
    const auto [ar, hr] = alpha_from_delta(b.delta_low, b.delta_high);
    CHECK(std::abs(ar - a) < 1e-12);
    CHECK(std::abs(hr - h) < 1e-12);
    // a_l/a_h = d_l/(1-d_l) and (1-a_h)/(1-a_l) = (1-d_h)/d_h.
    CHECK(ar / hr == doctest::Approx(b.delta_low / (1 - b.delta_low)).epsilon(1e-10));
    CHECK((1 - hr) / (1 - ar) == doctest::Approx((1 - b.delta_high) / b.delta_high).epsilon(1e-10));
    CHECK(ar >= 0.0);
    CHECK(hr <= 1.0 + 1e-15);
    CHECK(ar < hr);
  }

  CHECK_THROWS_AS(alpha_from_delta(0.6, 0.6), InputError);
  CHECK_THROWS_AS(alpha_from_delta(0.7, 0.3), InputError);
  CHECK_THROWS_AS(alpha_from_delta(0.1, 0.5), RangeError);
  CHECK_THROWS_AS(alpha_from_delta(0.5, 0.9), RangeError);
  CHECK_THROWS_AS(alpha_from_delta(-0.1, 0.9), RangeError);
  CHECK_THROWS_AS(alpha_from_delta(0.1, 1.1), RangeError);
}

TEST_CASE("prevalence estimator endpoints, clamping and conditioning") {
  // Three of ten points lie in D = {x >= 0.5}.
  const auto pop = line_population({0.1, 0.2, 0.3, 0.4, 0.45, 0.6, 0.7, 0.8, 0.05, 0.15});
  const Region d{half_space_partition({1.0}, 0.5), Label::positive, "x >= 0.5"};
  CHECK(estimate_prevalence(pop, d, 0.8, 0.3).q_hat == doctest::Approx(0.0));
  CHECK(estimate_prevalence(pop, d, 0.3, 0.1).q_hat == doctest::Approx(1.0));
  const auto mid = estimate_prevalence(pop, d, 0.5, 0.1);
  CHECK(mid.q_hat == doctest::Approx(0.5));
  CHECK(mid.test_measure == doctest::Approx(0.3));
  CHECK(mid.test_size == 10);

  const auto raw = estimate_prevalence(pop, d, 0.2, 0.0);
  CHECK(raw.q_hat == doctest::Approx(1.5));
  CHECK_FALSE(raw.clamped);
  const auto clipped = estimate_prevalence(pop, d, 0.2, 0.0, {0.05, true});
  CHECK(clipped.q_hat == 1.0);
  CHECK(clipped.q_raw == doctest::Approx(1.5));
  CHECK(clipped.clamped);

  CHECK_THROWS_AS(estimate_prevalence(pop, d, 0.5, 0.46), ConditioningError);
  CHECK_THROWS_AS(estimate_prevalence(pop, d, 0.5, 0.5), ConditioningError);
  CHECK_NOTHROW(estimate_prevalence(pop, d, 0.5, 0.46, {0.01, false}));
}

TEST_CASE("prevalence estimator is unbiased on the gaussian example") {
  const auto [P, N] = gaussian_example_densities();
  const auto g = gaussian_region();
  CHECK(std::abs(g.p_d - g.n_d) > 0.5);

  {
    const std::size_t s = 10000;
    const auto m = repeat(100, 0.3, [&](std::size_t i) {
      return estimate_prevalence(sample_population(P, N, 0.3, s, 1000 + i), g.region, g.p_d, g.n_d)
          .q_hat;
    });
    CHECK(std::abs(m.mean - 0.3) < 3.0 * std::sqrt(m.var / 100.0));
  }
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const std::size_t s = 1000;
    const auto m = repeat(200, q, [&](std::size_t i) {
      return estimate_prevalence(sample_population(P, N, q, s, 5000 + i), g.region, g.p_d, g.n_d)
          .q_hat;
    });
    // Exact-count populations: the spread comes from where the points land.
    const double se = std::sqrt(std::max(m.var, 1e-30) / 200.0);
    CHECK(std::abs(m.mean - q) < 4.0 * se + 1e-12);
  }
}

TEST_CASE("prevalence estimator converges in mean square") {
  const auto [P, N] = gaussian_example_densities();
  const auto g = gaussian_region();
  std::vector<double> log_s;
  std::vector<double> log_mse;
  for (std::size_t s : {100u, 1000u, 10000u}) {
    const auto m = repeat(200, 0.3, [&](std::size_t i) {
      return estimate_prevalence(
                 sample_population(P, N, 0.3, s, 90000 + 1000 * s + i, SamplingMode::bernoulli),
                 g.region, g.p_d, g.n_d)
          .q_hat;
    });
    log_s.push_back(std::log10(static_cast<double>(s)));
    log_mse.push_back(std::log10(m.mse));
  }
  CHECK(log_mse[1] < log_mse[0]);
  CHECK(log_mse[2] < log_mse[1]);
  // Least-squares slope.
  const double xm = (log_s[0] + log_s[1] + log_s[2]) / 3.0;
  const double ym = (log_mse[0] + log_mse[1] + log_mse[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (log_s[i] - xm) * (log_mse[i] - ym);
    sxx += (log_s[i] - xm) * (log_s[i] - xm);
  }
  CHECK(sxy / sxx == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("impure prevalence estimator") {
  const auto [P, N] = gaussian_example_densities();
  const auto g = gaussian_region();

  SUBCASE("pure training populations reduce to the pure estimator") {
    const auto neg = sample_population(P, N, 0.0, 2000, 1);
    const auto pos = sample_population(P, N, 1.0, 2000, 2);
    const auto test = sample_population(P, N, 0.4, 2000, 3);
    const auto imp = estimate_prevalence_impure(test, g.region, neg, pos, 0.0, 1.0);
    const double p_emp = empirical_measure(pos, g.region.partition, Label::positive);
    const double n_emp = empirical_measure(neg, g.region.partition, Label::positive);
    const auto pure = estimate_prevalence(test, g.region, p_emp, n_emp);
    CHECK(imp.estimate.q_hat == pure.q_hat);
    CHECK(imp.estimate.p_d == p_emp);
    CHECK(imp.estimate.n_d == n_emp);
  }

  SUBCASE("equal training prevalences are rejected") {
    const auto pop = sample_population(P, N, 0.5, 100, 1);
    CHECK_THROWS_AS(estimate_prevalence_impure(pop, g.region, pop, pop, 0.5, 0.5),
                    LinearDependenceError);
  }

  SUBCASE("the low training population estimates its own prevalence") {
    const auto low = sample_population(P, N, 0.2, 500, 7);
    const auto high = sample_population(P, N, 0.8, 500, 8);
    const auto est = estimate_prevalence_impure(low, g.region, low, high, 0.2, 0.8);
    CHECK(est.estimate.q_hat == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("gaussian example at s = 10^4") {
    const std::size_t s = 10000;
    auto run = [&](std::size_t i) {
      const auto low = sample_population(P, N, 0.2, s, 100 + 3 * i);
      const auto high = sample_population(P, N, 0.8, s, 101 + 3 * i);
      const auto test = sample_population(P, N, 0.3, s, 102 + 3 * i);
      return estimate_prevalence_impure(test, g.region, low, high, 0.2, 0.8).estimate.q_hat;
    };
    const auto m = repeat(40, 0.3, run);
    const double sd = std::sqrt(m.var);
    CHECK(std::abs(run(0) - 0.3) < 3.0 * sd);
    CHECK(std::abs(m.mean - 0.3) < 3.0 * sd / std::sqrt(40.0));
  }
}
