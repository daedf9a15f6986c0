// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "impure/alpha_estimation.hpp"
#include "impure/densities.hpp"
#include "impure/error.hpp"
#include "impure/measures.hpp"
#include "impure/partitions.hpp"
#include "impure/prevalence.hpp"
#include "impure/sampling.hpp"

using namespace impure;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

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

MeasureEngine gaussian_engine(double tol) {
  return MeasureEngine::quadrature(Box::cube(2, -8.0, 12.0), 64, tol);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

// 1. delta map identities.
Outcome delta_map() {
  double worst_fixed = 0.0, worst_ends = 0.0, worst_inverse = 0.0;
  for (const auto& [a, h] : random_alpha_pairs(50, 1)) {
    worst_fixed = std::max(worst_fixed, std::abs(delta_of_q(0.5, a, h) - 0.5));
    worst_ends = std::max(worst_ends, std::abs(delta_of_q(0.0, a, h) - a / (a + h)));
    worst_ends = std::max(worst_ends, std::abs(delta_of_q(1.0, a, h) - (1 - a) / (2 - a - h)));
    for (int i = 0; i < 100; ++i) {
      const double q = i / 99.0;
      worst_inverse = std::max(worst_inverse, std::abs(q_of_delta(delta_of_q(q, a, h), a, h) - q));
    }
  }
  return {worst_fixed <= 1e-12 && worst_ends <= 1e-12 && worst_inverse <= 1e-10,
          "max |d(0.5)-0.5| " + fmt(worst_fixed, 2) + ", endpoints " + fmt(worst_ends, 2) +
              ", inverse " + fmt(worst_inverse, 2)};
}

// 2. Pure and impure optimal partitions agree.
Outcome classifier_equivalence() {
  const auto [P, N] = gaussian_example_densities();
  const MixturePair pair(P, N, 0.2, 0.8);
  double worst = 1.0;
  for (int i = 1; i <= 9; ++i) {
    const double q = i / 10.0;
    const auto pts = sample_population(P, N, q, 10000, 100 + i);
    const auto pure = optimal_partition_pure(P, N, q);
    const auto imp = optimal_partition_impure(pair, delta_of_q(q, 0.2, 0.8));
    std::size_t agree = 0;
    for (const auto& r : pts.points) agree += pure(r) == imp(r);
    worst = std::min(worst, agree / 10000.0);
  }
  return {worst >= 0.999, "worst agreement " + fmt(100.0 * worst, 6) + "%"};
}

// 3. E_I - (a_h - a_l) E does not depend on the partition.
Outcome affine_relation() {
  const auto [P, N] = gaussian_example_densities();
  const double a = 0.2, h = 0.8;
  const MixturePair pair(P, N, a, h);
  const double tol = 1e-9;
  const auto engine = gaussian_engine(tol);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> offset(-1.0, 4.0);
  std::uniform_real_distribution<double> level(0.05, 0.95);
  std::vector<Partition> us;
  for (int i = 0; i < 12; ++i) {
    const double t = angle(rng);
    us.push_back(half_space_partition({std::cos(t), std::sin(t)}, offset(rng)));
  }
  for (int i = 0; i < 8; ++i) us.push_back(optimal_partition_pure(P, N, level(rng)));

  double worst = 0.0;
  for (double q : {0.2, 0.5, 0.8}) {
    const double d = delta_of_q(q, a, h);
    double lo = 1e300, hi = -1e300;
    for (const auto& u : us) {
      const double c = expected_error_impure(u, pair, d, engine) -
                       (h - a) * expected_error_pure(u, P, N, q, engine);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    worst = std::max(worst, hi - lo);
  }
  return {worst <= 3.0 * tol, "max spread " + fmt(worst, 3) + " (limit " + fmt(3 * tol, 2) +
                                  ") over " + std::to_string(us.size()) + " partitions"};
}

// 4. Boundary jump on the uniform-overlap fixture.
Outcome boundary_jump() {
  const auto [P, N] = uniform_overlap_densities(0.0, 2.0, 1.0, 3.0);
  const MixturePair pair(P, N, 0.2, 0.8);
  const auto engine = MeasureEngine::quadrature(Box({0.0}, {3.0}), 64, 1e-10);
  auto p_measure = [&](double d) {
    return measure(P, optimal_partition_impure(pair, d), Label::positive, engine);
  };
  const double jump = p_measure(0.21) - p_measure(0.19);
  const DeltaGrid grid(DeltaGrid::default_values(), pair.low().as_density(),
                       pair.high().as_density());
  const auto b = exact_delta_bounds(pair, engine, grid);
  const bool ok = jump >= 0.49 && std::abs(b.delta_low - 0.2) <= 1e-6 &&
                  std::abs(b.delta_high - 0.8) <= 1e-6;
  std::ostringstream s;
  s << "jump " << fmt(jump) << ", bounds (" << std::setprecision(10) << b.delta_low << ", "
    << b.delta_high << ")";
  return {ok, s.str()};
}

struct GaussianRun {
  double alpha_low, alpha_high;
  bool low_covered, high_covered;
};

GaussianRun gaussian_run(const DeltaGrid& grid, std::uint64_t seed, double z) {
  const auto [P, N] = gaussian_example_densities();
  const auto low = sample_population(P, N, 0.2, 500, 2 * seed + 1);
  const auto high = sample_population(P, N, 0.8, 500, 2 * seed + 2);
  const auto est = bayesian_alpha_estimate(low, high, grid, z);
  return {est.alpha_low.point, est.alpha_high.point,
          est.alpha_low.lower <= 0.2 && 0.2 <= est.alpha_low.upper,
          est.alpha_high.lower <= 0.8 && 0.8 <= est.alpha_high.upper};
}

// 5. Gaussian experiment over 20 seeds.
Outcome gaussian_experiment() {
  const auto [P, N] = gaussian_example_densities();
  const MixturePair pair(P, N, 0.2, 0.8);
  const DeltaGrid grid(DeltaGrid::default_values(), pair.low().as_density(),
                       pair.high().as_density());
  std::vector<double> err_l, err_h;
  int cov_l = 0, cov_h = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = gaussian_run(grid, seed, 2.0);
    err_l.push_back(std::abs(r.alpha_low - 0.2));
    err_h.push_back(std::abs(r.alpha_high - 0.8));
    cov_l += r.low_covered;
    cov_h += r.high_covered;
  }
  const double ml = median(err_l), mh = median(err_h);
  return {ml <= 0.08 && mh <= 0.12 && cov_l >= 15 && cov_h >= 15,
          "median |err| low " + fmt(ml, 3) + ", high " + fmt(mh, 3) + "; coverage " +
              std::to_string(cov_l) + "/20, " + std::to_string(cov_h) + "/20"};
}

// Informational: coverage of delta_low by the 95% interval over 200 runs.
std::string calibration() {
  const auto [P, N] = gaussian_example_densities();
  const MixturePair pair(P, N, 0.2, 0.8);
  const DeltaGrid grid(DeltaGrid::default_values(), pair.low().as_density(),
                       pair.high().as_density());
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto low = sample_population(P, N, 0.2, 500, 10000 + 2 * seed);
    const auto high = sample_population(P, N, 0.8, 500, 10001 + 2 * seed);
    const auto s = bayesian_delta_estimate(low, high, grid, 1.96, Side::low);
    covered += s.delta.lower <= 0.2 && 0.2 <= s.delta.upper;
  }
  return std::to_string(covered) + "/200 intervals at z = 1.96 cover delta_low = 0.2";
}

// 6. Prevalence estimator: unbiased and mean-square convergent.
Outcome prevalence_estimator() {
  const auto [P, N] = gaussian_example_densities();
  const auto engine = gaussian_engine(1e-10);
  const Region region{optimal_partition_pure(P, N, 0.5), Label::positive, "delta=0.5"};
  const double p_d = measure(P, region.partition, Label::positive, engine);
  const double n_d = measure(N, region.partition, Label::positive, engine);
  const std::size_t reps = 200;

  auto estimates = [&](double q, std::size_t s, std::uint64_t base) {
    std::vector<double> v;
    for (std::size_t i = 0; i < reps; ++i) {
      v.push_back(
          estimate_prevalence(sample_population(P, N, q, s, base + i), region, p_d, n_d).q_hat);
    }
    return v;
  };

  bool unbiased = true;
  double worst_z = 0.0;
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto v = estimates(q, 1000, 1000000 + static_cast<std::uint64_t>(q * 1e5));
    double m = 0.0, var = 0.0;
    for (double x : v) m += x;
    m /= reps;
    for (double x : v) var += (x - m) * (x - m);
    var /= reps - 1;
    const double z = std::abs(m - q) / std::sqrt(var / reps);
    worst_z = std::max(worst_z, z);
    unbiased = unbiased && z <= 4.0;
  }

  std::vector<double> xs, ys;
  for (std::size_t s : {100u, 1000u, 10000u}) {
    const auto v = estimates(0.3, s, 2000000 + 10 * s);
    double mse = 0.0;
    for (double x : v) mse += (x - 0.3) * (x - 0.3);
    xs.push_back(std::log10(static_cast<double>(s)));
    ys.push_back(std::log10(mse / reps));
  }
  const double xm = (xs[0] + xs[1] + xs[2]) / 3.0, ym = (ys[0] + ys[1] + ys[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (xs[i] - xm) * (ys[i] - ym);
    sxx += (xs[i] - xm) * (xs[i] - xm);
  }
  const double slope = sxy / sxx;
  return {unbiased && std::abs(slope + 1.0) <= 0.2,
          "worst |mean-q|/se " + fmt(worst_z, 3) + ", MSE slope " + fmt(slope, 4)};
}

// 7. Mixture matrix round trip.
Outcome matrix_algebra() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (const auto& [a, h] : random_alpha_pairs(1000, 77)) {
    const MixtureMatrix m(a, h);
    const double p = u(rng), n = u(rng);
    const auto [ql, qh] = m.forward(p, n);
    const auto [p2, n2] = m.inverse(ql, qh);
    worst = std::max({worst, std::abs(p2 - p), std::abs(n2 - n)});
  }
  bool rejected = false;
  try {
    MixtureMatrix(0.4, 0.4);
  } catch (const LinearDependenceError&) {
    rejected = true;
  }
  return {worst <= 1e-12 && rejected, "max round-trip error " + fmt(worst, 2) +
                                          (rejected ? ", equal alphas rejected"
                                                    : ", equal alphas NOT rejected")};
}

// 8. Asymptotic estimator error shrinks with R.
Outcome asymptotic_estimator() {
  const auto [P, N] = gaussian_example_densities();
  const MixturePair pair(P, N, 0.2, 0.8);
  const auto ql = pair.low().as_density();
  const auto qh = pair.high().as_density();
  const auto engine = gaussian_engine(1e-10);
  const auto minus = half_space_partition({-1.0, -1.0}, 0.0);
  auto at = [&](double t) {
    const auto plus = half_space_partition({1.0, 1.0}, t);
    const double r = measure(N, plus, Label::positive, engine) /
                     measure(P, plus, Label::positive, engine);
    const AsymptoticMeasures m{measure(ql, plus, Label::positive, engine),
                               measure(qh, plus, Label::positive, engine),
                               measure(ql, minus, Label::positive, engine),
                               measure(qh, minus, Label::positive, engine)};
    return std::pair{r, std::abs(asymptotic_delta_estimate(m).first - 0.2)};
  };
  const auto [r4, e4] = at(4.0);
  const auto [r5, e5] = at(5.0);
  const double r_ratio = r4 / r5, e_ratio = e4 / e5;
  return {r_ratio >= 2.0 && e_ratio >= 1.5,
          "R ratio " + fmt(r_ratio) + ", error " + fmt(e4, 3) + " -> " + fmt(e5, 3) +
              " (ratio " + fmt(e_ratio) + ")"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "delta map identities", 1, delta_map},
      {2, "classifier equivalence", 10, classifier_equivalence},
      {3, "affine error relation", 30, affine_relation},
      {4, "boundary jump", 5, boundary_jump},
      {5, "gaussian experiment", 300, gaussian_experiment},
      {6, "prevalence estimator", 120, prevalence_estimator},
      {7, "matrix algebra", 1, matrix_algebra},
      {8, "asymptotic estimator", 30, asymptotic_estimator},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name
              << "): " << o.detail << " [" << fmt(secs, 3) << " s"
              << (in_time ? "" : ", over the " + fmt(c.budget_s) + " s budget") << "]"
              << std::endl;
  }
  try {
    std::cout << "INFO  calibration: " << calibration() << std::endl;
  } catch (const std::exception& e) {
    std::cout << "INFO  calibration failed: " << e.what() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
