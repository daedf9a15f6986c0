#ifndef IMPURE_PARTITIONS_HPP
#define IMPURE_PARTITIONS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "impure/densities.hpp"

namespace impure {

class MeasureEngine;

enum class Label : std::uint8_t { negative = 0, positive = 1 };

/// Which side receives points on the boundary set (equality in the level-set
/// inequality).
enum class TieRule { positive, negative };

struct Provenance {
  enum class Kind { pure_ratio, impure_ratio, plugin };
  Kind kind = Kind::plugin;
  /// q for pure_ratio, delta for impure_ratio, unused otherwise.
  double parameter = 0.0;
  std::string description;
};

/// A binary decision rule over the measurement space, held intensionally.
/// The "high" class of an impure partition is reported as Label::positive.
class Partition {
 public:
  using Rule = std::function<Label(PointView)>;

  Partition(std::size_t dim, Rule rule, Provenance provenance);

  /// Throws InputError on dimension mismatch and propagates
  /// DegeneratePointError from the underlying densities.
  Label operator()(PointView r) const;
  Label decide(PointView r) const { return (*this)(r); }

  std::size_t dim() const { return dim_; }
  const Provenance& provenance() const { return provenance_; }

 private:
  std::size_t dim_;
  Rule rule_;
  Provenance provenance_;
};

/// Pseudoprevalence range and the training prevalences it came from.
struct PseudoprevalenceBounds {
  double delta_low;
  double delta_high;
  double alpha_low;
  double alpha_high;
};

/// Raises LinearDependenceError unless alpha_high - alpha_low >= 1e-9, and
/// InputError unless both lie in [0,1].
void check_linear_independence(double alpha_low, double alpha_high);

/// delta(q) = [q(1-a_l) + (1-q)a_l] / [(a_l+a_h)(1-q) + (2-a_l-a_h)q].
double delta_of_q(double q, double alpha_low, double alpha_high);

/// Inverse of delta_of_q on [delta_low, delta_high]; RangeError outside.
double q_of_delta(double delta, double alpha_low, double alpha_high);

/// delta_low = a_l/(a_l+a_h), delta_high = (1-a_l)/(2-a_l-a_h).
PseudoprevalenceBounds pseudoprevalence_bounds(double alpha_low, double alpha_high);

/// Multiplier c(q) in E_I(U; delta(q)) = c(q) E(U; q) + C(q). Equals
/// (a_h - a_l) / [(a_l+a_h)(1-q) + (2-a_l-a_h)q]; reduces to a_h - a_l when
/// a_l + a_h = 1.
double impure_error_scale(double q, double alpha_low, double alpha_high);

/// Offset C(q) = delta(q) - q c(q) of the same affine relation.
double impure_error_offset(double q, double alpha_low, double alpha_high);

/// Positive iff q P(r) >= (1-q) N(r) (ties per `tie`).
Partition optimal_partition_pure(const Density& positive, const Density& negative,
                                 double q, TieRule tie = TieRule::positive);

/// High (positive) iff delta Q_h(r) >= (1-delta) Q_l(r) (ties per `tie`).
/// Works for any pair of impure densities, including estimated ones.
Partition optimal_partition_impure(const Density& q_low, const Density& q_high,
                                   double delta, TieRule tie = TieRule::positive);
Partition optimal_partition_impure(const MixturePair& pair, double delta,
                                   TieRule tie = TieRule::positive);

/// Labels every point the same way.
Partition constant_partition(std::size_t dim, Label label);

/// Positive iff normal . r >= offset.
Partition half_space_partition(std::vector<double> normal, double offset);

/// Flips `base` inside the closed ball of radius `radius` about `center`.
Partition xor_ball_partition(Partition base, Point center, double radius);

/// E(U; q) = (1-q) N(D_p) + q P(D_n).
double expected_error_pure(const Partition& partition, const Density& positive,
                           const Density& negative, double q,
                           const MeasureEngine& engine);

/// E_I(U; delta) = (1-delta) Q_l(D_h) + delta Q_h(D_l).
double expected_error_impure(const Partition& partition, const MixturePair& pair,
                             double delta, const MeasureEngine& engine);

}  // namespace impure

#endif  // IMPURE_PARTITIONS_HPP
