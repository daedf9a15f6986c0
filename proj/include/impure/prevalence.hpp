#ifndef IMPURE_PREVALENCE_HPP
#define IMPURE_PREVALENCE_HPP

#include <array>
#include <string>
#include <utility>

#include "impure/partitions.hpp"
#include "impure/population.hpp"

namespace impure {

/// Row-stochastic [[a_l, 1-a_l], [a_h, 1-a_h]] mapping pure measures
/// (P_D, N_D) to impure measures (Q_{l,D}, Q_{h,D}).
class MixtureMatrix {
 public:
  /// LinearDependenceError when a_h - a_l < singularity threshold.
  MixtureMatrix(double alpha_low, double alpha_high, double singularity = 1e-9);

  double alpha_low() const { return alpha_low_; }
  double alpha_high() const { return alpha_high_; }
  /// a_l - a_h.
  double determinant() const { return alpha_low_ - alpha_high_; }
  std::array<std::array<double, 2>, 2> entries() const;

  /// (P_D, N_D) -> (Q_{l,D}, Q_{h,D}).
  std::pair<double, double> forward(double p_d, double n_d) const;
  /// (Q_{l,D}, Q_{h,D}) -> (P_D, N_D).
  std::pair<double, double> inverse(double q_low_d, double q_high_d) const;

 private:
  double alpha_low_;
  double alpha_high_;
};

/// (P_D, N_D) = 1/(a_h-a_l) [[a_h-1, 1-a_l], [a_h, -a_l]] (Q_{l,D}, Q_{h,D}).
std::pair<double, double> pure_measures_from_impure(double q_low_d, double q_high_d,
                                                    double alpha_low, double alpha_high);

/// a_l = d_l(2d_h-1)/(d_h-d_l), a_h = (1-d_l)(2d_h-1)/(d_h-d_l).
/// InputError if d_l >= d_h; RangeError unless 0 <= d_l < 1/2 < d_h <= 1.
std::pair<double, double> alpha_from_delta(double delta_low, double delta_high);

/// One side of a partition, used as the estimation region D.
struct Region {
  Partition partition;
  Label label = Label::positive;
  std::string descriptor;
};

struct PrevalenceOptions {
  /// Minimum |P_D - N_D|; below it ConditioningError.
  double separation = 0.05;
  /// Clip the estimate to [0,1]. Off by default since clipping biases it.
  bool clamp = false;
};

struct PrevalenceEstimate {
  double q_hat = 0.0;
  double q_raw = 0.0;       ///< before any clamping
  bool clamped = false;     ///< clamping was requested and changed the value
  double test_measure = 0.0;
  double p_d = 0.0;
  double n_d = 0.0;
  std::size_t test_size = 0;
};

/// q~ = (Q~_D - N_D) / (P_D - N_D) with Q~_D the empirical measure of D.
PrevalenceEstimate estimate_prevalence(const EmpiricalPopulation& test, const Region& region,
                                       double p_d, double n_d,
                                       const PrevalenceOptions& options = {});

struct ImpurePrevalenceEstimate {
  PrevalenceEstimate estimate;
  double q_low_d = 0.0;   ///< empirical Q_{l,D}
  double q_high_d = 0.0;  ///< empirical Q_{h,D}
  std::size_t low_size = 0;
  std::size_t high_size = 0;
};

/// Empirical Q_{l,D}, Q_{h,D} from the training populations, converted to
/// pure measures, then estimate_prevalence.
ImpurePrevalenceEstimate estimate_prevalence_impure(const EmpiricalPopulation& test,
                                                    const Region& region,
                                                    const EmpiricalPopulation& pop_low,
                                                    const EmpiricalPopulation& pop_high,
                                                    double alpha_low, double alpha_high,
                                                    const PrevalenceOptions& options = {});

}  // namespace impure

#endif  // IMPURE_PREVALENCE_HPP
