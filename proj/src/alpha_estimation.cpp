#include "impure/alpha_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "impure/error.hpp"
#include "impure/prevalence.hpp"

namespace impure {

// ---------------------------------------------------------------------------
// Grid

DeltaGrid::DeltaGrid(std::vector<double> values, const Density& q_low, const Density& q_high,
                     TieRule tie)
    : values_(std::move(values)) {
  validate();
  partitions_.reserve(values_.size());
  for (double d : values_) partitions_.push_back(optimal_partition_impure(q_low, q_high, d, tie));
}

DeltaGrid::DeltaGrid(std::vector<double> values, std::vector<Partition> partitions)
    : values_(std::move(values)), partitions_(std::move(partitions)) {
  validate();
  if (partitions_.size() != values_.size()) {
    throw InputError("delta grid needs one partition per value");
  }
}

void DeltaGrid::validate() const {
  if (values_.empty()) throw InputError("delta grid is empty");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] > 0.0 && values_[k] < 1.0)) {
      throw InputError("delta grid values must lie strictly inside (0,1)");
    }
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw InputError("delta grid values must be strictly increasing");
    }
  }
}

std::vector<double> DeltaGrid::range(double start, double stop, double step) {
  if (!(step > 0.0)) throw InputError("delta grid step must be positive");
  if (!(stop >= start)) throw InputError("delta grid stop must not precede start");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    // Round to 12 decimals so 0.05 + 3*0.05 prints as 0.2.
    out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return out;
}

std::vector<double> DeltaGrid::default_values() { return range(0.05, 0.95, 0.05); }

// ---------------------------------------------------------------------------
// Wilson

double wilson_center(double p_hat, std::size_t s, double z) {
  const double n = static_cast<double>(s);
  const double z2 = z * z;
  return (p_hat + z2 / (2.0 * n)) / (1.0 + z2 / n);
}

std::pair<double, double> wilson_interval(double p_hat, std::size_t s, double z,
                                          WilsonVariant variant) {
  if (s == 0) throw InputError("Wilson interval needs a positive sample size");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw InputError("proportion must lie in [0,1]");
  if (!(z > 0.0)) throw InputError("z must be positive");
  const double n = static_cast<double>(s);
  const double z2 = z * z;
  double center = 0.0;
  double half = 0.0;
  if (variant == WilsonVariant::standard) {
    center = wilson_center(p_hat, s, z);
    half = z / (1.0 + z2 / n) * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
  } else {
    const double scale = n / (n + z2);
    center = scale * (p_hat + z2 / (2.0 * n));
    half = scale * z2 / (2.0 * n) * std::sqrt(2.0 * n * p_hat * (1.0 - p_hat) + z2);
  }
  const double lower = p_hat == 0.0 ? 0.0 : std::clamp(center - half, 0.0, 1.0);
  const double upper = p_hat == 1.0 ? 1.0 : std::clamp(center + half, 0.0, 1.0);
  return {lower, upper};
}

// ---------------------------------------------------------------------------
// Bayesian estimate

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial_variance(double p, std::size_t s, double z) {
  const double n = static_cast<double>(s);
  if (p * (1.0 - p) > 0.0) return p * (1.0 - p) / n;
  const double pc = wilson_center(p, s, z);
  return pc * (1.0 - pc) / n;
}

double log_normal_density_at_zero(double mean, double variance) {
  return -0.5 * mean * mean / variance - 0.5 * std::log(2.0 * std::numbers::pi * variance);
}

bool intervals_overlap(double lo1, double hi1, double lo2, double hi2) {
  return lo1 <= hi2 && lo2 <= hi1;
}

const char* side_name(Side side) { return side == Side::low ? "low" : "high"; }

}  // namespace

SideEstimate bayesian_delta_estimate(const EmpiricalPopulation& pop_low,
                                     const EmpiricalPopulation& pop_high,
                                     const DeltaGrid& grid, double z, Side side,
                                     const BayesianOptions& options) {
  if (pop_low.empty() || pop_high.empty()) throw InputError("training populations must be nonempty");
  if (pop_low.dim != pop_high.dim) throw InputError("training populations differ in dimension");
  if (!(z > 0.0)) throw InputError("z must be positive");

  const std::size_t s_l = pop_low.size();
  const std::size_t s_h = pop_high.size();
  const Label region = side == Side::low ? Label::positive : Label::negative;

  SideEstimate out;
  out.side = side;
  out.delta.z = z;
  out.cells.resize(grid.size());

  bool any_separated = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto& c = out.cells[k];
    const double d = grid.value(k);
    c.delta = d;
    try {
      c.measure_low = empirical_measure(pop_low, grid.partition(k), region);
      c.measure_high = empirical_measure(pop_high, grid.partition(k), region);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "delta_k = " << d << ": " << e.what();
      throw Error(e.kind(), msg.str());
    }
    std::tie(c.lower_low, c.upper_low) = wilson_interval(c.measure_low, s_l, z, options.wilson);
    std::tie(c.lower_high, c.upper_high) =
        wilson_interval(c.measure_high, s_h, z, options.wilson);
    if (!intervals_overlap(c.lower_low, c.upper_low, c.lower_high, c.upper_high)) {
      any_separated = true;
    }
    if (side == Side::low) {
      c.threshold = d / (1.0 - d);
      c.bound_ratio = c.lower_high > 0.0 ? c.upper_low / c.lower_high : kInf;
    } else {
      c.threshold = (1.0 - d) / d;
      c.bound_ratio = c.lower_low > 0.0 ? c.upper_high / c.lower_low : kInf;
    }
    c.admissible = c.bound_ratio >= c.threshold;
  }
  if (!any_separated) {
    throw LinearDependenceError(
        std::string("the two populations are statistically indistinguishable on every grid "
                    "region (") +
        side_name(side) + " side); their prevalences cannot be separated");
  }

  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (out.cells[k].admissible) support.push_back(k);
  }

  if (support.empty()) {
    const double sentinel = side == Side::low ? 0.0 : 1.0;
    out.sentinel = true;
    out.admissible_set = {sentinel};
    out.delta.point = out.delta.lower = out.delta.upper = sentinel;
    out.delta.posterior = std::vector<PosteriorCell>{{sentinel, 1.0}};
    return out;
  }

  std::vector<double> log_lik(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto& c = out.cells[support[i]];
    const double d = c.delta;
    const double mean = c.measure_low * (1.0 - d) - c.measure_high * d;
    const double var = (1.0 - d) * (1.0 - d) * binomial_variance(c.measure_low, s_l, z) +
                       d * d * binomial_variance(c.measure_high, s_h, z);
    log_lik[i] = log_normal_density_at_zero(mean, var);
    c.likelihood = std::exp(log_lik[i]);
  }
  const double peak = *std::max_element(log_lik.begin(), log_lik.end());
  std::vector<double> w(support.size());
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    w[i] = std::exp(log_lik[i] - peak);
    total += w[i];
  }
  std::vector<PosteriorCell> posterior;
  double mean = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    w[i] /= total;
    const double d = grid.value(support[i]);
    posterior.push_back({d, w[i]});
    out.admissible_set.push_back(d);
    mean += w[i] * d;
  }

  // Credible interval: start at the posterior median and grow one neighbour
  // at a time, taking the heavier side, until the mass reaches the level.
  const double level = std::erf(z / std::numbers::sqrt2);
  std::size_t median = 0;
  for (double cum = 0.0; median < w.size(); ++median) {
    cum += w[median];
    if (cum >= 0.5) break;
  }
  median = std::min(median, w.size() - 1);
  std::size_t lo = median;
  std::size_t hi = median;
  double mass = w[median];
  while (mass < level - 1e-12 && (lo > 0 || hi + 1 < w.size())) {
    const double left = lo > 0 ? w[lo - 1] : -1.0;
    const double right = hi + 1 < w.size() ? w[hi + 1] : -1.0;
    if (right > left) {
      mass += w[++hi];
    } else {
      mass += w[--lo];
    }
  }

  out.delta.point = mean;
  out.delta.lower = std::min(posterior[lo].delta, mean);
  out.delta.upper = std::max(posterior[hi].delta, mean);
  out.delta.posterior = std::move(posterior);

  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= 0.99) {
      const bool endpoint = support[i] == 0 || support[i] + 1 == grid.size();
      std::ostringstream msg;
      msg << "posterior mass " << w[i] << " sits on the single grid cell delta = "
          << grid.value(support[i]) << (endpoint ? " at the end of the grid" : "")
          << "; the grid is too coarse to resolve the estimate";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

namespace {

IntervalEstimate convert_side(const SideEstimate& mine, double other_delta) {
  IntervalEstimate out;
  out.z = mine.delta.z;
  auto alpha_at = [&](double d) {
    return mine.side == Side::low ? alpha_from_delta(d, other_delta).first
                                  : alpha_from_delta(other_delta, d).second;
  };
  out.point = alpha_at(mine.delta.point);
  out.lower = alpha_at(mine.delta.lower);
  out.upper = alpha_at(mine.delta.upper);
  return out;
}

}  // namespace

AlphaEstimate bayesian_alpha_estimate(const EmpiricalPopulation& pop_low,
                                      const EmpiricalPopulation& pop_high,
                                      const DeltaGrid& grid, double z,
                                      const BayesianOptions& options) {
  AlphaEstimate out;
  out.low = bayesian_delta_estimate(pop_low, pop_high, grid, z, Side::low, options);
  out.high = bayesian_delta_estimate(pop_low, pop_high, grid, z, Side::high, options);
  out.alpha_low = convert_side(out.low, out.high.delta.point);
  out.alpha_high = convert_side(out.high, out.low.delta.point);
  return out;
}

IntervalEstimate bayesian_alpha_estimate(const EmpiricalPopulation& pop_low,
                                         const EmpiricalPopulation& pop_high,
                                         const DeltaGrid& grid, double z, Side side,
                                         const BayesianOptions& options) {
  const auto both = bayesian_alpha_estimate(pop_low, pop_high, grid, z, options);
  return side == Side::low ? both.alpha_low : both.alpha_high;
}

// ---------------------------------------------------------------------------
// Exact bounds

ExactDeltaBounds exact_delta_bounds(const MixturePair& pair, const MeasureEngine& engine,
                                    const DeltaGrid& grid, const ExactBoundsOptions& options) {
  const Density q_low = pair.low().as_density();
  const Density q_high = pair.high().as_density();
  double floor = 0.0;
  if (options.mass_floor) {
    floor = *options.mass_floor;
  } else if (engine.is_quadrature()) {
    floor = 1e3 * engine.tolerance();
  } else {
    floor = 0.5 / static_cast<double>(std::get<MonteCarloMode>(engine.mode()).sample_count);
  }

  // Q_h-measure of D_p(delta); nondecreasing in delta.
  auto low_mass = [&](double d) {
    return measure(q_high, optimal_partition_impure(q_low, q_high, d), Label::positive, engine);
  };
  // Q_l-measure of D_n(delta); nonincreasing in delta.
  auto high_mass = [&](double d) {
    return measure(q_low, optimal_partition_impure(q_low, q_high, d), Label::negative, engine);
  };
  auto disjointness = [](const char* which, double jump) {
    std::ostringstream msg;
    msg << "no boundary jump at " << which << " (measure past the root is " << jump
        << "); the supports of P and N do not look partially disjoint, use the asymptotic "
           "estimator instead";
    return DisjointnessError(msg.str());
  };

  const auto& g = grid.values();
  ExactDeltaBounds out{};

  // Low side: infimum of delta where D_p(delta) carries mass.
  {
    double lo = 0.0;
    double hi = -1.0;
    for (double d : g) {
      if (low_mass(d) > floor) {
        hi = d;
        break;
      }
      lo = d;
    }
    if (hi < 0.0) throw disjointness("delta_low", 0.0);
    if (lo == 0.0 && low_mass(0.0) > floor) {
      hi = 0.0;
    } else {
      while (hi - lo > options.resolution) {
        const double mid = 0.5 * (lo + hi);
        (low_mass(mid) > floor ? hi : lo) = mid;
      }
    }
    const double jump = low_mass(hi);
    if (jump < options.min_jump) throw disjointness("delta_low", jump);
    const double ql = measure(q_low, optimal_partition_impure(q_low, q_high, hi),
                              Label::positive, engine);
    out.delta_low = hi;
    out.residual_low = ql / jump - hi / (1.0 - hi);
  }

  // High side: supremum of delta where D_n(delta) carries mass.
  {
    double lo = -1.0;
    double hi = 1.0;
    for (auto it = g.rbegin(); it != g.rend(); ++it) {
      if (high_mass(*it) > floor) {
        lo = *it;
        break;
      }
      hi = *it;
    }
    if (lo < 0.0) throw disjointness("delta_high", 0.0);
    while (hi - lo > options.resolution) {
      const double mid = 0.5 * (lo + hi);
      (high_mass(mid) > floor ? lo : hi) = mid;
    }
    const double jump = high_mass(lo);
    if (jump < options.min_jump) throw disjointness("delta_high", jump);
    const double qh = measure(q_high, optimal_partition_impure(q_low, q_high, lo),
                              Label::negative, engine);
    out.delta_high = hi;
    out.residual_high = qh / jump - (1.0 - lo) / lo;
  }
  return out;
}

std::pair<double, double> asymptotic_delta_estimate(const AsymptoticMeasures& m) {
  auto fail = [](const char* which, double ratio) {
    std::ostringstream msg;
    msg << "region " << which << " does not separate the classes (measured ratio " << ratio
        << " is not below 1)";
    return RegionChoiceError(msg.str());
  };
  if (!(m.high_on_plus > 0.0)) throw fail("D+", kInf);
  if (!(m.low_on_minus > 0.0)) throw fail("D-", kInf);
  const double rho_plus = m.low_on_plus / m.high_on_plus;
  const double rho_minus = m.high_on_minus / m.low_on_minus;
  if (!(rho_plus < 1.0)) throw fail("D+", rho_plus);
  if (!(rho_minus < 1.0)) throw fail("D-", rho_minus);
  return {rho_plus / (1.0 + rho_plus), 1.0 / (1.0 + rho_minus)};
}

}  // namespace impure
