#include "impure/measures.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "impure/error.hpp"

namespace impure {

MeasureEngine::MeasureEngine(Mode mode, Box bounds, std::size_t workers)
    : mode_(std::move(mode)), bounds_(std::move(bounds)), workers_(std::max<std::size_t>(workers, 1)) {}

MeasureEngine MeasureEngine::quadrature(Box bounds, std::size_t grid_resolution,
                                        double tolerance) {
  if (!(tolerance > 0.0)) throw InputError("quadrature tolerance must be positive");
  if (grid_resolution < 2) throw InputError("quadrature grid resolution must be at least 2");
  return MeasureEngine(QuadratureMode{grid_resolution, tolerance}, std::move(bounds), 1);
}

MeasureEngine MeasureEngine::monte_carlo(Box bounds, std::size_t sample_count,
                                         std::uint64_t seed, std::size_t workers) {
  if (sample_count < 1000) throw InputError("Monte Carlo sample count must be at least 1000");
  return MeasureEngine(MonteCarloMode{sample_count, seed}, std::move(bounds), workers);
}

MeasureEngine MeasureEngine::parse(std::string_view spec, Box bounds) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  auto bad = [&]() {
    return InputError("engine spec '" + std::string(spec) +
                      "' is not quad:<resolution>:<tolerance> or mc:<samples>:<seed>");
  };
  if (parts.size() != 3) throw bad();
  try {
    std::size_t used = 0;
    if (parts[0] == "quad") {
      const auto res = std::stoull(parts[1], &used);
      if (used != parts[1].size()) throw bad();
      const double tol = std::stod(parts[2], &used);
      if (used != parts[2].size()) throw bad();
      return quadrature(std::move(bounds), res, tol);
    }
    if (parts[0] == "mc") {
      const auto n = std::stoull(parts[1], &used);
      if (used != parts[1].size()) throw bad();
      const auto seed = std::stoull(parts[2], &used);
      if (used != parts[2].size()) throw bad();
      return monte_carlo(std::move(bounds), n, seed);
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  throw bad();
}

MeasureEngine MeasureEngine::with_workers(std::size_t workers) const {
  MeasureEngine out = *this;
  out.workers_ = std::max<std::size_t>(workers, 1);
  return out;
}

double MeasureEngine::tolerance() const {
  if (const auto* q = std::get_if<QuadratureMode>(&mode_)) return q->tolerance;
  const auto& mc = std::get<MonteCarloMode>(mode_);
  return 1.0 / std::sqrt(static_cast<double>(mc.sample_count));
}

std::string MeasureEngine::describe() const {
  std::ostringstream out;
  if (const auto* q = std::get_if<QuadratureMode>(&mode_)) {
    out << "quad:" << q->grid_resolution << ":" << q->tolerance;
  } else {
    const auto& mc = std::get<MonteCarloMode>(mode_);
    out << "mc:" << mc.sample_count << ":" << mc.seed;
  }
  return out.str();
}

namespace {

// Iterated adaptive quadrature. The innermost axis is handled line by line:
// probes locate changes of the integrand's state (outside support, inside
// region, outside region), bisection pins each change down, and each piece
// where the state is "inside" is integrated with Gauss-Kronrod. Outer axes
// are integrated adaptively over the line integrals.
class RegionIntegrator {
 public:
  RegionIntegrator(const Density& density, const Partition& partition, Label region,
                   const Box& box, const QuadratureMode& mode)
      : density_(density),
        partition_(partition),
        region_(region),
        box_(box),
        mode_(mode),
        scratch_(box.dim(), 0.0) {}

  double run() { return integrate_axis(box_.dim() - 1); }

 private:
  enum class State { null, inside, outside };

  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  static constexpr unsigned kMaxDepth = 48;

  double value_at(PointView r) const {
    const double v = density_(r);
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "density '" << density_.name() << "' returned " << v << " inside the engine bounds";
      throw NumericError(msg.str());
    }
    return v;
  }

  State state_at(PointView r) const {
    if (value_at(r) == 0.0) return State::null;
    return partition_(r) == region_ ? State::inside : State::outside;
  }

  std::vector<double> panel_edges(std::size_t axis, std::size_t panels) const {
    const double lo = box_.lower[axis];
    const double hi = box_.upper[axis];
    std::vector<double> edges;
    edges.reserve(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) {
      edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(panels));
    }
    for (double b : density_.breakpoints()[axis]) {
      if (b > lo && b < hi) edges.push_back(b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
  }

  // Allowed absolute error per unit length on `axis`: a tenth of the
  // tolerance, spread evenly over the box.
  double absolute_floor(std::size_t axis) const {
    double volume = 1.0;
    for (std::size_t j = axis; j < box_.dim(); ++j) volume *= box_.upper[j] - box_.lower[j];
    return 0.1 * mode_.tolerance / volume;
  }

  template <class F>
  double gauss_kronrod(F& f, double a, double b, std::size_t axis, unsigned depth = 0) const {
    double err = 0.0;
    double l1 = 0.0;
    const double v = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
    err *= 0.5 * (b - a);  // reported on the reference interval
    const double target = std::max(mode_.tolerance * l1, absolute_floor(axis) * (b - a));
    if (std::isfinite(v) && err <= target) return v;
    const double span = box_.upper[axis] - box_.lower[axis];
    if (depth >= kMaxDepth || b - a <= 1e-12 * span) {
      if (!std::isfinite(v) || err > std::max(1e3 * target, 1e-3 * mode_.tolerance)) {
        std::ostringstream msg;
        msg << "quadrature did not converge on axis " << axis << " over [" << a << ", " << b
            << "]: error estimate " << err << " (L1 " << l1 << ", tolerance "
            << mode_.tolerance << ")";
        throw NumericError(msg.str());
      }
      return v;
    }
    const double mid = 0.5 * (a + b);
    return gauss_kronrod(f, a, mid, axis, depth + 1) + gauss_kronrod(f, mid, b, axis, depth + 1);
  }

  // States along the innermost axis at the current outer coordinates.
  std::vector<State> line_states(const std::vector<double>& probes) {
    Point r = scratch_;
    std::vector<State> out;
    out.reserve(probes.size());
    for (double t : probes) {
      r[0] = t;
      out.push_back(state_at(r));
    }
    return out;
  }

  static std::vector<State> runs(const std::vector<State>& states) {
    std::vector<State> out;
    for (State s : states) {
      if (out.empty() || out.back() != s) out.push_back(s);
    }
    return out;
  }

  // Where the run pattern along the innermost axis changes as axis 1 moves,
  // the region boundary is tangent to the lines and the line integral has a
  // square-root kink. Such points become panel edges. Near a tangency the
  // chord is thinner than the probe spacing, so each change is refined with
  // progressively finer probes around it; those probes are kept as hints for
  // every line in this pass.
  void add_pattern_breaks(std::vector<double>& edges) {
    constexpr int kLevels = 3;
    constexpr std::size_t kWindowPoints = 16;
    const auto coarse = panel_edges(0, mode_.grid_resolution);
    const auto ys = panel_edges(1, mode_.grid_resolution);
    const double saved = scratch_[1];
    hints_.clear();

    auto states_at = [&](double y, const std::vector<double>& probes) {
      scratch_[1] = y;
      return line_states(probes);
    };

    auto prev = runs(states_at(ys.front(), coarse));
    for (std::size_t i = 1; i < ys.size(); ++i) {
      auto cur = runs(states_at(ys[i], coarse));
      if (cur == prev) continue;
      const double a0 = ys[i - 1];
      const double b0 = ys[i];
      std::vector<double> probes = coarse;
      double a = a0;
      double b = b0;
      for (int level = 0; level <= kLevels; ++level) {
        const auto ref = runs(states_at(a0, probes));
        a = a0;
        b = b0;
        for (int it = 0; it < 60 && b - a > 1e-13 * (1.0 + std::abs(a)); ++it) {
          const double mid = 0.5 * (a + b);
          (runs(states_at(mid, probes)) == ref ? a : b) = mid;
        }
        if (level == kLevels) break;
        const auto sa = states_at(a, probes);
        const auto sb = states_at(b, probes);
        std::vector<double> window;
        for (std::size_t j = 0; j < probes.size(); ++j) {
          if (sa[j] == sb[j]) continue;
          const double lo = probes[j > 0 ? j - 1 : 0];
          const double hi = probes[std::min(j + 1, probes.size() - 1)];
          for (std::size_t k = 1; k < kWindowPoints; ++k) {
            window.push_back(lo + (hi - lo) * static_cast<double>(k) /
                                      static_cast<double>(kWindowPoints));
          }
        }
        if (window.empty()) break;
        hints_.insert(hints_.end(), window.begin(), window.end());
        probes.insert(probes.end(), window.begin(), window.end());
        std::sort(probes.begin(), probes.end());
        probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
      }
      edges.push_back(0.5 * (a + b));
      prev = std::move(cur);
    }
    scratch_[1] = saved;
    std::sort(edges.begin(), edges.end());
    std::sort(hints_.begin(), hints_.end());
    hints_.erase(std::unique(hints_.begin(), hints_.end()), hints_.end());
  }

  double integrate_axis(std::size_t axis) {
    if (axis == 0) return integrate_line();
    const std::size_t panels = std::max<std::size_t>(4, mode_.grid_resolution / 8);
    auto edges = panel_edges(axis, panels);
    if (axis == 1) add_pattern_breaks(edges);
    const double min_width = 1e-12 * (box_.upper[axis] - box_.lower[axis]);
    double total = 0.0;
    auto f = [this, axis](double t) {
      scratch_[axis] = t;
      return integrate_axis(axis - 1);
    };
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      if (edges[i + 1] - edges[i] <= min_width) continue;
      total += gauss_kronrod(f, edges[i], edges[i + 1], axis);
    }
    return total;
  }

  double integrate_line() {
    auto probes = panel_edges(0, mode_.grid_resolution);
    if (!hints_.empty()) {
      probes.insert(probes.end(), hints_.begin(), hints_.end());
      std::sort(probes.begin(), probes.end());
      probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    }
    Point r = scratch_;
    auto state_of = [&](double t) {
      r[0] = t;
      return state_at(r);
    };

    std::vector<double> cuts{probes.front()};
    State prev = state_of(probes.front());
    for (std::size_t i = 1; i < probes.size(); ++i) {
      const State cur = state_of(probes[i]);
      if (cur != prev) {
        double lo = probes[i - 1];
        double hi = probes[i];
        for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          if (state_of(mid) == prev) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        cuts.push_back(0.5 * (lo + hi));
      }
      prev = cur;
    }
    cuts.push_back(probes.back());
    // The density itself may jump at its breakpoints.
    for (double b : density_.breakpoints()[0]) {
      if (b > box_.lower[0] && b < box_.upper[0]) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double b = cuts[i + 1];
      if (!(b > a)) continue;
      if (state_of(0.5 * (a + b)) != State::inside) continue;
      auto f = [&](double t) {
        r[0] = t;
        return value_at(r);
      };
      total += gauss_kronrod(f, a, b, 0);
    }
    return total;
  }

  const Density& density_;
  const Partition& partition_;
  Label region_;
  const Box& box_;
  QuadratureMode mode_;
  Point scratch_;
  std::vector<double> hints_;
};

struct ShardResult {
  std::uint64_t hits = 0;
  double weighted = 0.0;
};

ShardResult run_shard(const Density& density, const Partition& partition, Label region,
                      const Box& box, std::uint64_t seed, std::size_t shard,
                      std::size_t count) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard & 0xffffffffu),
                    static_cast<std::uint32_t>(shard >> 32)};
  Rng rng(seq);
  ShardResult out;
  if (density.can_sample()) {
    for (std::size_t i = 0; i < count; ++i) {
      const Point r = density.sample(rng);
      if (!box.contains(r)) continue;
      if (density(r) == 0.0) continue;
      if (partition(r) == region) ++out.hits;
    }
  } else {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point r(box.dim());
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < box.dim(); ++k) {
        r[k] = box.lower[k] + unit(rng) * (box.upper[k] - box.lower[k]);
      }
      const double v = density(r);
      if (!std::isfinite(v)) throw NumericError("non-finite density value in Monte Carlo draw");
      if (v == 0.0) continue;
      if (partition(r) == region) out.weighted += v;
    }
  }
  return out;
}

double monte_carlo_measure(const Density& density, const Partition& partition, Label region,
                           const MeasureEngine& engine, const MonteCarloMode& mode) {
  const std::size_t shards = (mode.sample_count + MeasureEngine::kShardSize - 1) /
                             MeasureEngine::kShardSize;
  std::vector<ShardResult> results(shards);
  auto shard_count = [&](std::size_t s) {
    return std::min(MeasureEngine::kShardSize,
                    mode.sample_count - s * MeasureEngine::kShardSize);
  };
  auto run_range = [&](std::size_t first, std::size_t last) {
    for (std::size_t s = first; s < last; ++s) {
      results[s] = run_shard(density, partition, region, engine.bounds(), mode.seed, s,
                             shard_count(s));
    }
  };
  const std::size_t workers = std::min(engine.workers(), shards);
  if (workers <= 1) {
    run_range(0, shards);
  } else {
    std::vector<std::future<void>> jobs;
    const std::size_t per = (shards + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t first = w * per;
      const std::size_t last = std::min(shards, first + per);
      if (first >= last) break;
      jobs.push_back(std::async(std::launch::async, run_range, first, last));
    }
    for (auto& j : jobs) j.get();
  }
  // Fixed reduction order.
  std::uint64_t hits = 0;
  double weighted = 0.0;
  for (const auto& r : results) {
    hits += r.hits;
    weighted += r.weighted;
  }
  const double n = static_cast<double>(mode.sample_count);
  if (density.can_sample()) return static_cast<double>(hits) / n;
  return engine.bounds().volume() * weighted / n;
}

}  // namespace

double measure(const Density& density, const Partition& partition, Label region,
               const MeasureEngine& engine) {
  const std::size_t dim = engine.bounds().dim();
  if (density.dim() != dim || partition.dim() != dim) {
    std::ostringstream msg;
    msg << "measure: density (" << density.dim() << ") / partition (" << partition.dim()
        << ") dimension does not match engine bounds (" << dim << ")";
    throw InputError(msg.str());
  }
  if (const auto* q = std::get_if<QuadratureMode>(&engine.mode())) {
    if (dim > 3) throw InputError("quadrature supports dimensions 1 to 3; use Monte Carlo");
    RegionIntegrator integrator(density, partition, region, engine.bounds(), *q);
    return integrator.run();
  }
  return monte_carlo_measure(density, partition, region, engine,
                             std::get<MonteCarloMode>(engine.mode()));
}

double empirical_measure(const EmpiricalPopulation& population, const Partition& partition,
                         Label region) {
  if (population.empty()) throw InputError("empirical measure of an empty population");
  std::size_t hits = 0;
  for (const auto& r : population.points) {
    if (partition(r) == region) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(population.size());
}

}  // namespace impure
