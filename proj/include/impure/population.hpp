#ifndef IMPURE_POPULATION_HPP
#define IMPURE_POPULATION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "impure/densities.hpp"

namespace impure {

/// i.i.d. measurement vectors from one population.
///
/// Hidden labels (1 = positive) are ground truth kept for validation
/// harnesses only; no estimator in this library reads them.
struct EmpiricalPopulation {
  std::size_t dim = 0;
  std::vector<Point> points;
  std::optional<double> declared_prevalence;
  std::optional<std::vector<std::uint8_t>> hidden_labels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace impure

#endif  // IMPURE_POPULATION_HPP
