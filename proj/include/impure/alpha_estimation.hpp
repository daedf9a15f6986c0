#ifndef IMPURE_ALPHA_ESTIMATION_HPP
#define IMPURE_ALPHA_ESTIMATION_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "impure/densities.hpp"
#include "impure/measures.hpp"
#include "impure/partitions.hpp"
#include "impure/population.hpp"

namespace impure {

/// Strictly increasing pseudoprevalence values in (0,1) with the matching
/// impure-optimal partitions.
class DeltaGrid {
 public:
  /// Builds partitions from a pair of impure densities (true or estimated).
  DeltaGrid(std::vector<double> values, const Density& q_low, const Density& q_high,
            TieRule tie = TieRule::positive);
  DeltaGrid(std::vector<double> values, std::vector<Partition> partitions);

  /// start, start + step, ..., up to stop (inclusive within 1e-9).
  static std::vector<double> range(double start, double stop, double step);
  /// 0.05, 0.10, ..., 0.95.
  static std::vector<double> default_values();

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  double value(std::size_t k) const { return values_[k]; }
  const Partition& partition(std::size_t k) const { return partitions_[k]; }

 private:
  void validate() const;

  std::vector<double> values_;
  std::vector<Partition> partitions_;
};

enum class WilsonVariant {
  standard,  ///< the usual Wilson score interval
  verbatim,  ///< the printed variant with z^2/(2s) sqrt(2 s p(1-p) + z^2)
};

/// Wilson bounds for a binomial proportion, clamped to [0,1].
std::pair<double, double> wilson_interval(double p_hat, std::size_t s, double z,
                                          WilsonVariant variant = WilsonVariant::standard);

/// Center of the standard Wilson interval, (p + z^2/2s) / (1 + z^2/s).
double wilson_center(double p_hat, std::size_t s, double z);

enum class Side { low, high };

struct PosteriorCell {
  double delta;
  double weight;
};

/// Point estimate with bounds. `posterior` is set by the Bayesian estimator.
struct IntervalEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double z = 0.0;
  std::optional<std::vector<PosteriorCell>> posterior;
};

/// Per-grid-cell quantities behind the admissible set.
struct CellDiagnostics {
  double delta = 0.0;
  double measure_low = 0.0;    ///< empirical Q_l of the side's region
  double measure_high = 0.0;   ///< empirical Q_h of the side's region
  double lower_low = 0.0;      ///< Wilson bounds on measure_low
  double upper_low = 0.0;
  double lower_high = 0.0;     ///< Wilson bounds on measure_high
  double upper_high = 0.0;
  double bound_ratio = 0.0;    ///< Q+_l/Q-_h (low) or Q+_h/Q-_l (high); +inf if undefined
  double threshold = 0.0;      ///< delta/(1-delta) (low) or (1-delta)/delta (high)
  bool admissible = false;
  double likelihood = 0.0;     ///< normal density at 0 of the balance equation
};

struct BayesianOptions {
  WilsonVariant wilson = WilsonVariant::standard;
};

struct SideEstimate {
  Side side = Side::low;
  IntervalEstimate delta;                 ///< estimate of delta_low or delta_high
  std::vector<CellDiagnostics> cells;
  /// Admissible grid values; {0} (low) or {1} (high) when none qualify.
  std::vector<double> admissible_set;
  bool sentinel = false;                  ///< admissible set replaced by {0} / {1}
  std::vector<std::string> warnings;
};

/// Posterior over the delta grid for delta_low (side = low, regions D_p) or
/// delta_high (side = high, regions D_n). Throws LinearDependenceError when
/// the two populations cannot be told apart on any grid cell.
SideEstimate bayesian_delta_estimate(const EmpiricalPopulation& pop_low,
                                     const EmpiricalPopulation& pop_high,
                                     const DeltaGrid& grid, double z, Side side,
                                     const BayesianOptions& options = {});

/// Both sides plus the conversion to training prevalences.
struct AlphaEstimate {
  SideEstimate low;
  SideEstimate high;
  IntervalEstimate alpha_low;   ///< interval maps the delta_low interval at fixed delta_high
  IntervalEstimate alpha_high;  ///< interval maps the delta_high interval at fixed delta_low
};

AlphaEstimate bayesian_alpha_estimate(const EmpiricalPopulation& pop_low,
                                      const EmpiricalPopulation& pop_high,
                                      const DeltaGrid& grid, double z,
                                      const BayesianOptions& options = {});

/// One side converted to its training prevalence, holding the other side's
/// point estimate fixed.
IntervalEstimate bayesian_alpha_estimate(const EmpiricalPopulation& pop_low,
                                         const EmpiricalPopulation& pop_high,
                                         const DeltaGrid& grid, double z, Side side,
                                         const BayesianOptions& options = {});

struct ExactBoundsOptions {
  /// A region counts as nonempty when its Q-measure exceeds this. Defaults to
  /// 1e3 x engine tolerance (quadrature) or 0.5/n (Monte Carlo).
  std::optional<double> mass_floor;
  /// Minimum measure right past the root for the root to count as a jump.
  double min_jump = 1e-3;
  /// Bisection stops when the bracket is narrower than this.
  double resolution = 1e-10;
};

struct ExactDeltaBounds {
  double delta_low;
  double delta_high;
  /// Ratio residuals Q_l/Q_h - delta/(1-delta) and Q_h/Q_l - (1-delta)/delta
  /// just past each root.
  double residual_low;
  double residual_high;
};

/// Solves the ratio equations for delta_low and delta_high with the true
/// densities, locating the jump of the region measures. Throws
/// DisjointnessError when no jump exists (supports not partially disjoint).
ExactDeltaBounds exact_delta_bounds(const MixturePair& pair, const MeasureEngine& engine,
                                    const DeltaGrid& grid,
                                    const ExactBoundsOptions& options = {});

/// Region measures for the asymptotic approximation:
/// D+ where N/P is small and D- where P/N is small.
struct AsymptoticMeasures {
  double low_on_plus;    ///< Q_l(D+)
  double high_on_plus;   ///< Q_h(D+)
  double low_on_minus;   ///< Q_l(D-)
  double high_on_minus;  ///< Q_h(D-)
};

/// (delta~_low, delta~_high) from Q_l(D+)/Q_h(D+) = d/(1-d) and
/// Q_h(D-)/Q_l(D-) = (1-d)/d. RegionChoiceError when a ratio is >= 1 or
/// undefined.
std::pair<double, double> asymptotic_delta_estimate(const AsymptoticMeasures& m);

}  // namespace impure

#endif  // IMPURE_ALPHA_ESTIMATION_HPP
