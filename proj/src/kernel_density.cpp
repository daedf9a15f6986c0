#include "impure/kernel_density.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "impure/error.hpp"

namespace impure {

std::vector<double> scott_bandwidth(const EmpiricalPopulation& population) {
  const std::size_t n = population.size();
  if (n < 2) throw InputError("kernel density needs at least two points");
  const std::size_t m = population.dim;
  std::vector<double> h(m);
  const double factor = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(m) + 4.0));
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (const auto& p : population.points) mean += p[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& p : population.points) ss += (p[i] - mean) * (p[i] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw InputError("kernel density: population has zero spread on an axis");
    h[i] = sd * factor;
  }
  return h;
}

Density kernel_density(const EmpiricalPopulation& population, std::string name,
                       std::vector<double> bandwidth) {
  if (population.empty()) throw InputError("kernel density of an empty population");
  const std::size_t m = population.dim;
  if (bandwidth.empty()) bandwidth = scott_bandwidth(population);
  if (bandwidth.size() != m) throw InputError("bandwidth dimension mismatch");
  for (double h : bandwidth) {
    if (!(h > 0.0)) throw InputError("bandwidths must be positive");
  }

  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& p : population.points) {
    for (std::size_t i = 0; i < m; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    lo[i] -= 5.0 * bandwidth[i];
    hi[i] += 5.0 * bandwidth[i];
  }

  struct Data {
    std::vector<Point> points;
    std::vector<double> h;
    double norm;
  };
  auto data = std::make_shared<Data>();
  data->points = population.points;
  data->h = bandwidth;
  data->norm = 1.0 / static_cast<double>(population.size());
  for (double h : bandwidth) data->norm /= h * std::sqrt(2.0 * std::numbers::pi);

  auto eval = [data](PointView r) {
    double sum = 0.0;
    for (const auto& p : data->points) {
      double e = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double u = (r[i] - p[i]) / data->h[i];
        e += u * u;
      }
      sum += std::exp(-0.5 * e);
    }
    return sum * data->norm;
  };
  auto sampler = [data](Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, data->points.size() - 1);
    std::normal_distribution<double> noise;
    Point out = data->points[pick(rng)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += data->h[i] * noise(rng);
    return out;
  };
  return Density(std::move(name), m, eval, Box(lo, hi), sampler);
}

}  // namespace impure
