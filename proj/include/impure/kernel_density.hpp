#ifndef IMPURE_KERNEL_DENSITY_HPP
#define IMPURE_KERNEL_DENSITY_HPP

#include <vector>

#include "impure/densities.hpp"
#include "impure/population.hpp"

namespace impure {

/// Product-Gaussian kernel density estimate of a population. Bandwidths
/// default to Scott's rule, sigma_i * n^(-1/(m+4)) per axis. The support box
/// is the data range padded by five bandwidths. Carries a sampler (smoothed
/// bootstrap).
Density kernel_density(const EmpiricalPopulation& population, std::string name,
                       std::vector<double> bandwidth = {});

/// Scott's-rule bandwidths for a population.
std::vector<double> scott_bandwidth(const EmpiricalPopulation& population);

}  // namespace impure

#endif  // IMPURE_KERNEL_DENSITY_HPP
