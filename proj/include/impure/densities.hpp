#ifndef IMPURE_DENSITIES_HPP
#define IMPURE_DENSITIES_HPP

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace impure {

using Point = std::vector<double>;
using PointView = std::span<const double>;
using Rng = std::mt19937_64;

/// Axis-aligned box [lower, upper] in R^m.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  std::size_t dim() const { return lower.size(); }
  double volume() const;
  bool contains(PointView r) const;

  /// Smallest box containing both.
  static Box hull(const Box& a, const Box& b);
  /// [lo, hi]^dim
  static Box cube(std::size_t dim, double lo, double hi);
};

/// A normalized probability density over R^m, evaluable pointwise.
///
/// The support box tells quadrature where the mass lives. Breakpoints list,
/// per axis, the coordinates at which the density may jump (edges of a
/// uniform support, for example); quadrature splits its panels there.
/// A sampler is optional; `with_rejection_sampler` adds one to any density
/// with a bounded support box.
class Density {
 public:
  using Evaluator = std::function<double(PointView)>;
  using Sampler = std::function<Point(Rng&)>;
  using Breakpoints = std::vector<std::vector<double>>;

  Density(std::string name, std::size_t dim, Evaluator eval, Box support,
          Sampler sampler = {}, Breakpoints breaks = {});

  /// Throws InputError on dimension mismatch.
  double operator()(PointView r) const;

  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const Box& support() const { return support_; }
  const Breakpoints& breakpoints() const { return breaks_; }

  bool can_sample() const { return static_cast<bool>(sampler_); }
  /// Throws NumericError when no sampler is attached.
  Point sample(Rng& rng) const;

 private:
  std::string name_;
  std::size_t dim_;
  Evaluator eval_;
  Box support_;
  Sampler sampler_;
  Breakpoints breaks_;
};

/// Q(r; alpha) = alpha P(r) + (1 - alpha) N(r).
class MixtureDensity {
 public:
  MixtureDensity(Density positive, Density negative, double alpha);

  double operator()(PointView r) const;

  double alpha() const { return alpha_; }
  const Density& positive() const { return positive_; }
  const Density& negative() const { return negative_; }
  std::size_t dim() const { return positive_.dim(); }

  /// Type-erased view usable wherever a Density is expected. Samples by
  /// drawing the class first, so it requires samplers on both components.
  Density as_density() const;

 private:
  Density positive_;
  Density negative_;
  double alpha_;
};

/// Two impure training densities over shared components with
/// alpha_low < alpha_high. A gap below 1e-9 raises LinearDependenceError.
class MixturePair {
 public:
  MixturePair(Density positive, Density negative, double alpha_low,
              double alpha_high);

  MixtureDensity low() const { return {positive_, negative_, alpha_low_}; }
  MixtureDensity high() const { return {positive_, negative_, alpha_high_}; }

  double alpha_low() const { return alpha_low_; }
  double alpha_high() const { return alpha_high_; }
  const Density& positive() const { return positive_; }
  const Density& negative() const { return negative_; }
  std::size_t dim() const { return positive_.dim(); }

 private:
  Density positive_;
  Density negative_;
  double alpha_low_;
  double alpha_high_;
};

/// Nonnegative extended real: either finite or the +infinity sentinel.
/// Arithmetic on the sentinel is deliberately not provided.
class ExtendedReal {
 public:
  static ExtendedReal finite(double v) { return ExtendedReal(v, false); }
  static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  bool is_infinite() const { return infinite_; }
  /// Throws RangeError on the sentinel.
  double value() const;

  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

double mixture_eval(const MixtureDensity& q, PointView r);

/// R(r) = N(r) / P(r). Infinity sentinel when P(r) = 0 < N(r);
/// DegeneratePointError when both vanish.
ExtendedReal relative_conditional_probability(const Density& positive,
                                              const Density& negative,
                                              PointView r);

/// Axis-aligned Gaussian with independent components. `support` is only a
/// quadrature hint; evaluation is not truncated.
Density diagonal_gaussian(std::string name, std::vector<double> mean,
                          std::vector<double> stddev, Box support);

/// Uniform density on a box.
Density uniform_box(std::string name, Box box);

/// The 2-D example pair: P has mean (2,2) and variances (1, 1/4); N is the
/// standard bivariate normal. Returns (positive, negative).
std::pair<Density, Density> gaussian_example_densities();

/// N uniform on [a,b], P uniform on [c,d], with a < c < b < d.
/// Returns (positive, negative).
std::pair<Density, Density> uniform_overlap_densities(double a, double b,
                                                      double c, double d);

/// Attaches a rejection sampler over the support box. The envelope is the
/// maximum found on a scan lattice, inflated by `envelope_factor`.
/// Each draw gives up after `max_iterations` proposals (NumericError).
Density with_rejection_sampler(const Density& density,
                               std::size_t scan_resolution = 64,
                               double envelope_factor = 1.5,
                               std::size_t max_iterations = 1000000);

}  // namespace impure

#endif  // IMPURE_DENSITIES_HPP
