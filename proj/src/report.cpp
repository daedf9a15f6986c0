#include "impure/report.hpp"

#include <cmath>

namespace impure {

namespace {

// JSON has no infinity; undefined ratios are written as null.
nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json alpha_side_report(const SideEstimate& side, const IntervalEstimate& alpha,
                                 const DeltaGrid& grid) {
  nlohmann::json j;
  j["side"] = side.side == Side::low ? "low" : "high";
  j["z"] = side.delta.z;
  j["grid"] = grid.values();
  j["admissible_set"] = side.admissible_set;
  j["sentinel"] = side.sentinel;
  auto posterior = nlohmann::json::array();
  if (side.delta.posterior) {
    for (const auto& c : *side.delta.posterior) {
      posterior.push_back({{"delta", c.delta}, {"weight", c.weight}});
    }
  }
  j["posterior"] = posterior;
  j["point"] = side.delta.point;
  j["interval"] = {side.delta.lower, side.delta.upper};
  j["alpha_point"] = alpha.point;
  j["alpha_interval"] = {alpha.lower, alpha.upper};
  auto cells = nlohmann::json::array();
  for (const auto& c : side.cells) {
    cells.push_back({{"delta", c.delta},
                     {"measure_low", c.measure_low},
                     {"measure_high", c.measure_high},
                     {"wilson_low", {c.lower_low, c.upper_low}},
                     {"wilson_high", {c.lower_high, c.upper_high}},
                     {"bound_ratio", finite_or_null(c.bound_ratio)},
                     {"threshold", c.threshold},
                     {"admissible", c.admissible},
                     {"likelihood", c.likelihood}});
  }
  j["cells"] = cells;
  j["warnings"] = side.warnings;
  return j;
}

nlohmann::json alpha_report(const AlphaEstimate& estimate, const DeltaGrid& grid) {
  return {{"low", alpha_side_report(estimate.low, estimate.alpha_low, grid)},
          {"high", alpha_side_report(estimate.high, estimate.alpha_high, grid)}};
}

nlohmann::json prevalence_report(const PrevalenceEstimate& estimate,
                                 const std::string& region_descriptor) {
  return {{"q_hat", estimate.q_hat},
          {"q_raw", estimate.q_raw},
          {"region_descriptor", region_descriptor},
          {"P_D", estimate.p_d},
          {"N_D", estimate.n_d},
          {"test_measure", estimate.test_measure},
          {"sample_sizes", {{"test", estimate.test_size}}},
          {"clamped", estimate.clamped}};
}

nlohmann::json prevalence_report(const ImpurePrevalenceEstimate& estimate,
                                 const std::string& region_descriptor) {
  auto j = prevalence_report(estimate.estimate, region_descriptor);
  j["sample_sizes"]["low"] = estimate.low_size;
  j["sample_sizes"]["high"] = estimate.high_size;
  j["Q_low_D"] = estimate.q_low_d;
  j["Q_high_D"] = estimate.q_high_d;
  return j;
}

}  // namespace impure
