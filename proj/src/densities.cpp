#include "impure/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "impure/error.hpp"

namespace impure {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::range: return "range";
    case ErrorKind::parse: return "parse";
    case ErrorKind::degenerate_point: return "degenerate_point";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::linear_dependence: return "linear_dependence";
    case ErrorKind::disjointness: return "disjointness";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::region_choice: return "region_choice";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw InputError("box bounds must be nonempty and of equal dimension");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw InputError("box lower bound must be below upper bound on every axis");
    }
  }
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= upper[i] - lower[i];
  return v;
}

bool Box::contains(PointView r) const {
  if (r.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (r[i] < lower[i] || r[i] > upper[i]) return false;
  }
  return true;
}

Box Box::hull(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) throw InputError("box dimension mismatch in hull");
  Box out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.lower[i] = std::min(a.lower[i], b.lower[i]);
    out.upper[i] = std::max(a.upper[i], b.upper[i]);
  }
  return out;
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

// ---------------------------------------------------------------------------
// Density

Density::Density(std::string name, std::size_t dim, Evaluator eval, Box support,
                 Sampler sampler, Breakpoints breaks)
    : name_(std::move(name)),
      dim_(dim),
      eval_(std::move(eval)),
      support_(std::move(support)),
      sampler_(std::move(sampler)),
      breaks_(std::move(breaks)) {
  if (dim_ == 0) throw InputError("density dimension must be positive");
  if (!eval_) throw InputError("density '" + name_ + "' has no evaluator");
  if (support_.dim() != dim_) {
    throw InputError("support box dimension does not match density '" + name_ + "'");
  }
  if (breaks_.empty()) breaks_.resize(dim_);
  if (breaks_.size() != dim_) {
    throw InputError("breakpoint table must have one entry per axis");
  }
  for (auto& axis : breaks_) {
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  }
}

double Density::operator()(PointView r) const {
  if (r.size() != dim_) {
    std::ostringstream msg;
    msg << "density '" << name_ << "' expects dimension " << dim_ << ", got "
        << r.size();
    throw InputError(msg.str());
  }
  return eval_(r);
}

Point Density::sample(Rng& rng) const {
  if (!sampler_) throw NumericError("density '" + name_ + "' has no sampler");
  return sampler_(rng);
}

// ---------------------------------------------------------------------------
// Mixtures

namespace {

void check_same_space(const Density& p, const Density& n) {
  if (p.dim() != n.dim()) {
    throw InputError("positive and negative densities differ in dimension");
  }
}

Density::Breakpoints merge_breaks(const Density& a, const Density& b) {
  Density::Breakpoints out = a.breakpoints();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& extra = b.breakpoints()[i];
    out[i].insert(out[i].end(), extra.begin(), extra.end());
  }
  return out;
}

}  // namespace

MixtureDensity::MixtureDensity(Density positive, Density negative, double alpha)
    : positive_(std::move(positive)), negative_(std::move(negative)), alpha_(alpha) {
  check_same_space(positive_, negative_);
  if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) {
    throw InputError("mixture prevalence must lie in [0,1]");
  }
}

double MixtureDensity::operator()(PointView r) const {
  return alpha_ * positive_(r) + (1.0 - alpha_) * negative_(r);
}

Density MixtureDensity::as_density() const {
  Density::Sampler sampler;
  if (positive_.can_sample() && negative_.can_sample()) {
    sampler = [p = positive_, n = negative_, a = alpha_](Rng& rng) {
      std::bernoulli_distribution coin(a);
      return coin(rng) ? p.sample(rng) : n.sample(rng);
    };
  }
  std::ostringstream name;
  name << "mixture(" << alpha_ << ")";
  return Density(name.str(), dim(),
                 [p = positive_, n = negative_, a = alpha_](PointView r) {
                   return a * p(r) + (1.0 - a) * n(r);
                 },
                 Box::hull(positive_.support(), negative_.support()),
                 std::move(sampler), merge_breaks(positive_, negative_));
}

MixturePair::MixturePair(Density positive, Density negative, double alpha_low,
                         double alpha_high)
    : positive_(std::move(positive)),
      negative_(std::move(negative)),
      alpha_low_(alpha_low),
      alpha_high_(alpha_high) {
  check_same_space(positive_, negative_);
  if (!(alpha_low_ >= 0.0 && alpha_high_ <= 1.0)) {
    throw InputError("training prevalences must lie in [0,1]");
  }
  if (!(alpha_high_ - alpha_low_ >= 1e-9)) {
    throw LinearDependenceError(
        "training populations are not linearly independent (alpha_high - alpha_low < 1e-9)");
  }
}

double ExtendedReal::value() const {
  if (infinite_) throw RangeError("extended real is the infinity sentinel");
  return value_;
}

double mixture_eval(const MixtureDensity& q, PointView r) { return q(r); }

ExtendedReal relative_conditional_probability(const Density& positive,
                                              const Density& negative,
                                              PointView r) {
  const double p = positive(r);
  const double n = negative(r);
  if (p == 0.0 && n == 0.0) {
    throw DegeneratePointError("P(r) = N(r) = 0: point lies outside the measurement space");
  }
  if (p == 0.0) return ExtendedReal::infinity();
  return ExtendedReal::finite(n / p);
}

// ---------------------------------------------------------------------------
// Concrete densities

Density diagonal_gaussian(std::string name, std::vector<double> mean,
                          std::vector<double> stddev, Box support) {
  const std::size_t dim = mean.size();
  if (dim == 0 || stddev.size() != dim) {
    throw InputError("gaussian mean and stddev must have equal nonzero length");
  }
  double norm = 1.0;
  for (double s : stddev) {
    if (!(s > 0.0)) throw InputError("gaussian stddev must be positive");
    norm *= std::sqrt(2.0 * std::numbers::pi) * s;
  }
  auto eval = [mean, stddev, norm](PointView r) {
    double e = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double u = (r[i] - mean[i]) / stddev[i];
      e += u * u;
    }
    return std::exp(-0.5 * e) / norm;
  };
  auto sampler = [mean, stddev](Rng& rng) {
    Point out(mean.size());
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < mean.size(); ++i) out[i] = mean[i] + stddev[i] * z(rng);
    return out;
  };
  return Density(std::move(name), dim, std::move(eval), std::move(support),
                 std::move(sampler));
}

Density uniform_box(std::string name, Box box) {
  const double height = 1.0 / box.volume();
  Density::Breakpoints breaks(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) breaks[i] = {box.lower[i], box.upper[i]};
  auto eval = [box, height](PointView r) { return box.contains(r) ? height : 0.0; };
  auto sampler = [box](Rng& rng) {
    Point out(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
      std::uniform_real_distribution<double> u(box.lower[i], box.upper[i]);
      out[i] = u(rng);
    }
    return out;
  };
  Box support = box;
  return Density(std::move(name), box.dim(), std::move(eval), std::move(support),
                 std::move(sampler), std::move(breaks));
}

std::pair<Density, Density> gaussian_example_densities() {
  const Box bounds = Box::cube(2, -8.0, 12.0);
  Density positive(
      "gaussian_example_P", 2,
      [](PointView r) {
        const double dx = r[0] - 2.0;
        const double dy = r[1] - 2.0;
        return std::exp(-0.5 * dx * dx - 2.0 * dy * dy) / std::numbers::pi;
      },
      bounds,
      [](Rng& rng) {
        std::normal_distribution<double> z(0.0, 1.0);
        const double x = 2.0 + z(rng);
        const double y = 2.0 + 0.5 * z(rng);
        return Point{x, y};
      });
  Density negative(
      "gaussian_example_N", 2,
      [](PointView r) {
        return std::exp(-0.5 * (r[0] * r[0] + r[1] * r[1])) /
               (2.0 * std::numbers::pi);
      },
      bounds,
      [](Rng& rng) {
        std::normal_distribution<double> z(0.0, 1.0);
        const double x = z(rng);
        const double y = z(rng);
        return Point{x, y};
      });
  return {std::move(positive), std::move(negative)};
}

std::pair<Density, Density> uniform_overlap_densities(double a, double b,
                                                      double c, double d) {
  if (!(a < c && c < b && b < d)) {
    throw InputError("uniform overlap fixture requires a < c < b < d");
  }
  return {uniform_box("uniform_P", Box({c}, {d})),
          uniform_box("uniform_N", Box({a}, {b}))};
}

Density with_rejection_sampler(const Density& density, std::size_t scan_resolution,
                               double envelope_factor, std::size_t max_iterations) {
  const Box& box = density.support();
  const std::size_t dim = density.dim();
  if (scan_resolution < 2) throw InputError("rejection scan needs at least 2 points per axis");

  // Scan a lattice for the envelope height.
  double peak = 0.0;
  std::vector<std::size_t> idx(dim, 0);
  Point r(dim);
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double t = static_cast<double>(idx[i]) / static_cast<double>(scan_resolution - 1);
      r[i] = box.lower[i] + t * (box.upper[i] - box.lower[i]);
    }
    const double v = density(r);
    if (!std::isfinite(v)) throw NumericError("non-finite density value during envelope scan");
    peak = std::max(peak, v);
    std::size_t axis = 0;
    while (axis < dim && ++idx[axis] == scan_resolution) idx[axis++] = 0;
    if (axis == dim) break;
  }
  if (!(peak > 0.0)) throw NumericError("density vanishes on its whole scan lattice");
  const double envelope = peak * envelope_factor;

  auto sampler = [density, box, envelope, max_iterations](Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point x(box.dim());
    for (std::size_t it = 0; it < max_iterations; ++it) {
      for (std::size_t i = 0; i < box.dim(); ++i) {
        x[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
      }
      if (unit(rng) * envelope <= density(x)) return x;
    }
    throw NumericError("rejection sampler for '" + density.name() +
                       "' exceeded its iteration cap");
  };
  return Density(density.name(), dim, [density](PointView p) { return density(p); },
                 box, std::move(sampler), density.breakpoints());
}

}  // namespace impure
