#ifndef IMPURE_REPORT_HPP
#define IMPURE_REPORT_HPP

#include "json.hpp"

#include "impure/alpha_estimation.hpp"
#include "impure/prevalence.hpp"

namespace impure {

/// {side, z, grid, admissible_set, posterior, point, interval, alpha_point,
///  alpha_interval, sentinel, cells, warnings}
nlohmann::json alpha_side_report(const SideEstimate& side, const IntervalEstimate& alpha,
                                 const DeltaGrid& grid);

/// {"low": ..., "high": ...}
nlohmann::json alpha_report(const AlphaEstimate& estimate, const DeltaGrid& grid);

/// {q_hat, region_descriptor, P_D, N_D, sample_sizes, clamped, ...}
nlohmann::json prevalence_report(const PrevalenceEstimate& estimate,
                                 const std::string& region_descriptor);
nlohmann::json prevalence_report(const ImpurePrevalenceEstimate& estimate,
                                 const std::string& region_descriptor);

}  // namespace impure

#endif  // IMPURE_REPORT_HPP
