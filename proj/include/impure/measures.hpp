#ifndef IMPURE_MEASURES_HPP
#define IMPURE_MEASURES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "impure/densities.hpp"
#include "impure/partitions.hpp"
#include "impure/population.hpp"

namespace impure {

struct QuadratureMode {
  /// Probe points per line used to locate decision-boundary crossings; also
  /// sets the number of initial panels on outer axes.
  std::size_t grid_resolution = 64;
  /// Relative tolerance handed to the adaptive Gauss-Kronrod rules. Since a
  /// measure is at most 1 it also bounds the absolute error.
  double tolerance = 1e-8;
};

struct MonteCarloMode {
  std::size_t sample_count = 100000;
  std::uint64_t seed = 0;
};

/// How region measures X_D are computed, and over which box.
///
/// Monte Carlo draws are split into fixed-size shards, each with its own
/// stream derived from (seed, shard index), so results do not depend on the
/// number of workers.
class MeasureEngine {
 public:
  using Mode = std::variant<QuadratureMode, MonteCarloMode>;

  static constexpr std::size_t kShardSize = 8192;

  static MeasureEngine quadrature(Box bounds, std::size_t grid_resolution = 64,
                                  double tolerance = 1e-8);
  static MeasureEngine monte_carlo(Box bounds, std::size_t sample_count,
                                   std::uint64_t seed, std::size_t workers = 1);

  /// Parses "quad:<resolution>:<tolerance>" or "mc:<samples>:<seed>".
  static MeasureEngine parse(std::string_view spec, Box bounds);

  const Box& bounds() const { return bounds_; }
  const Mode& mode() const { return mode_; }
  bool is_quadrature() const { return std::holds_alternative<QuadratureMode>(mode_); }
  std::size_t workers() const { return workers_; }
  MeasureEngine with_workers(std::size_t workers) const;

  /// Nominal accuracy: the quadrature tolerance, or 1/sqrt(n) for Monte Carlo
  /// (twice the worst-case binomial standard error).
  double tolerance() const;

  std::string describe() const;

 private:
  MeasureEngine(Mode mode, Box bounds, std::size_t workers);

  Mode mode_;
  Box bounds_;
  std::size_t workers_ = 1;
};

/// X_D for D = {r : U(r) = region}, restricted to the engine bounds.
/// Quadrature supports dimensions 1 to 3.
double measure(const Density& density, const Partition& partition, Label region,
               const MeasureEngine& engine);

/// Fraction of population points that the partition assigns to `region`.
double empirical_measure(const EmpiricalPopulation& population,
                         const Partition& partition, Label region);

}  // namespace impure

#endif  // IMPURE_MEASURES_HPP
