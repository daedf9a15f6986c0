#include "impure/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impure/error.hpp"
#include "impure/measures.hpp"

namespace impure {

Partition::Partition(std::size_t dim, Rule rule, Provenance provenance)
    : dim_(dim), rule_(std::move(rule)), provenance_(std::move(provenance)) {
  if (dim_ == 0) throw InputError("partition dimension must be positive");
  if (!rule_) throw InputError("partition has no decision rule");
}

Label Partition::operator()(PointView r) const {
  if (r.size() != dim_) {
    std::ostringstream msg;
    msg << "partition expects dimension " << dim_ << ", got " << r.size();
    throw InputError(msg.str());
  }
  return rule_(r);
}

// ---------------------------------------------------------------------------
// Pseudoprevalence map

void check_linear_independence(double alpha_low, double alpha_high) {
  if (!(alpha_low >= 0.0 && alpha_low <= 1.0 && alpha_high >= 0.0 && alpha_high <= 1.0)) {
    throw InputError("training prevalences must lie in [0,1]");
  }
  if (!(alpha_high - alpha_low >= 1e-9)) {
    throw LinearDependenceError(
        "alpha_low must be strictly below alpha_high (gap >= 1e-9)");
  }
}

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw InputError(std::string(what) + " must lie in [0,1]");
  }
}

double denominator(double q, double a, double h) {
  return (a + h) * (1.0 - q) + (2.0 - a - h) * q;
}

}  // namespace

double delta_of_q(double q, double alpha_low, double alpha_high) {
  check_linear_independence(alpha_low, alpha_high);
  check_unit(q, "q");
  const double a = alpha_low;
  return (q * (1.0 - a) + (1.0 - q) * a) / denominator(q, a, alpha_high);
}

double q_of_delta(double delta, double alpha_low, double alpha_high) {
  const auto b = pseudoprevalence_bounds(alpha_low, alpha_high);
  constexpr double slack = 1e-14;
  if (!(delta >= b.delta_low - slack && delta <= b.delta_high + slack)) {
    std::ostringstream msg;
    msg << "delta = " << delta << " outside [" << b.delta_low << ", " << b.delta_high << "]";
    throw RangeError(msg.str());
  }
  const double a = alpha_low;
  const double h = alpha_high;
  // Solve delta * denominator(q) = a + q (1 - 2a) for q.
  const double q = (delta * (a + h) - a) / ((1.0 - 2.0 * a) - delta * (2.0 - 2.0 * a - 2.0 * h));
  return std::clamp(q, 0.0, 1.0);
}

PseudoprevalenceBounds pseudoprevalence_bounds(double alpha_low, double alpha_high) {
  check_linear_independence(alpha_low, alpha_high);
  return {alpha_low / (alpha_low + alpha_high),
          (1.0 - alpha_low) / (2.0 - alpha_low - alpha_high), alpha_low, alpha_high};
}

double impure_error_scale(double q, double alpha_low, double alpha_high) {
  check_linear_independence(alpha_low, alpha_high);
  check_unit(q, "q");
  return (alpha_high - alpha_low) / denominator(q, alpha_low, alpha_high);
}

double impure_error_offset(double q, double alpha_low, double alpha_high) {
  return delta_of_q(q, alpha_low, alpha_high) -
         q * impure_error_scale(q, alpha_low, alpha_high);
}

// ---------------------------------------------------------------------------
// Ratio partitions

namespace {

Label compare(double lhs, double rhs, TieRule tie) {
  if (lhs > rhs) return Label::positive;
  if (lhs < rhs) return Label::negative;
  return tie == TieRule::positive ? Label::positive : Label::negative;
}

}  // namespace

Partition optimal_partition_pure(const Density& positive, const Density& negative,
                                 double q, TieRule tie) {
  check_unit(q, "q");
  if (positive.dim() != negative.dim()) {
    throw InputError("positive and negative densities differ in dimension");
  }
  std::ostringstream desc;
  desc << "pure_ratio(q=" << q << ")";
  return Partition(
      positive.dim(),
      [p = positive, n = negative, q, tie](PointView r) {
        const double pv = p(r);
        const double nv = n(r);
        if (pv == 0.0 && nv == 0.0) {
          throw DegeneratePointError("P(r) = N(r) = 0 inside a pure ratio partition");
        }
        return compare(q * pv, (1.0 - q) * nv, tie);
      },
      {Provenance::Kind::pure_ratio, q, desc.str()});
}

Partition optimal_partition_impure(const Density& q_low, const Density& q_high,
                                   double delta, TieRule tie) {
  check_unit(delta, "delta");
  if (q_low.dim() != q_high.dim()) {
    throw InputError("impure densities differ in dimension");
  }
  std::ostringstream desc;
  desc << "impure_ratio(delta=" << delta << ")";
  return Partition(
      q_low.dim(),
      [lo = q_low, hi = q_high, delta, tie](PointView r) {
        const double l = lo(r);
        const double h = hi(r);
        if (l == 0.0 && h == 0.0) {
          throw DegeneratePointError("Q_l(r) = Q_h(r) = 0 inside an impure ratio partition");
        }
        return compare(delta * h, (1.0 - delta) * l, tie);
      },
      {Provenance::Kind::impure_ratio, delta, desc.str()});
}

Partition optimal_partition_impure(const MixturePair& pair, double delta, TieRule tie) {
  return optimal_partition_impure(pair.low().as_density(), pair.high().as_density(),
                                  delta, tie);
}

Partition constant_partition(std::size_t dim, Label label) {
  return Partition(dim, [label](PointView) { return label; },
                   {Provenance::Kind::plugin, 0.0,
                    label == Label::positive ? "all_positive" : "all_negative"});
}

Partition half_space_partition(std::vector<double> normal, double offset) {
  if (normal.empty()) throw InputError("half-space normal must be nonempty");
  std::ostringstream desc;
  desc << "half_space(offset=" << offset << ")";
  const std::size_t dim = normal.size();
  return Partition(
      dim,
      [normal = std::move(normal), offset](PointView r) {
        double dot = 0.0;
        for (std::size_t i = 0; i < normal.size(); ++i) dot += normal[i] * r[i];
        return dot >= offset ? Label::positive : Label::negative;
      },
      {Provenance::Kind::plugin, offset, desc.str()});
}

Partition xor_ball_partition(Partition base, Point center, double radius) {
  if (center.size() != base.dim()) throw InputError("ball center dimension mismatch");
  if (!(radius > 0.0)) throw InputError("ball radius must be positive");
  Provenance prov{Provenance::Kind::plugin, radius,
                  base.provenance().description + " xor ball"};
  const std::size_t dim = base.dim();
  return Partition(
      dim,
      [base = std::move(base), center = std::move(center), r2 = radius * radius](PointView r) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
          const double d = r[i] - center[i];
          d2 += d * d;
        }
        const Label l = base(r);
        if (d2 > r2) return l;
        return l == Label::positive ? Label::negative : Label::positive;
      },
      std::move(prov));
}

// ---------------------------------------------------------------------------
// Error functionals

double expected_error_pure(const Partition& partition, const Density& positive,
                           const Density& negative, double q,
                           const MeasureEngine& engine) {
  check_unit(q, "q");
  const double n_dp = measure(negative, partition, Label::positive, engine);
  const double p_dn = measure(positive, partition, Label::negative, engine);
  return (1.0 - q) * n_dp + q * p_dn;
}

double expected_error_impure(const Partition& partition, const MixturePair& pair,
                             double delta, const MeasureEngine& engine) {
  check_unit(delta, "delta");
  const double ql_dh = measure(pair.low().as_density(), partition, Label::positive, engine);
  const double qh_dl = measure(pair.high().as_density(), partition, Label::negative, engine);
  return (1.0 - delta) * ql_dh + delta * qh_dl;
}

}  // namespace impure
