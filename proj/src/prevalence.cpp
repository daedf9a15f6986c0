#include "impure/prevalence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impure/error.hpp"
#include "impure/measures.hpp"

namespace impure {

MixtureMatrix::MixtureMatrix(double alpha_low, double alpha_high, double singularity)
    : alpha_low_(alpha_low), alpha_high_(alpha_high) {
  if (!(alpha_low >= 0.0 && alpha_low <= 1.0 && alpha_high >= 0.0 && alpha_high <= 1.0)) {
    throw InputError("training prevalences must lie in [0,1]");
  }
  if (!(alpha_high - alpha_low >= singularity)) {
    std::ostringstream msg;
    msg << "mixture matrix is singular: alpha_high - alpha_low = " << alpha_high - alpha_low
        << " (threshold " << singularity << ")";
    throw LinearDependenceError(msg.str());
  }
}

std::array<std::array<double, 2>, 2> MixtureMatrix::entries() const {
  return {{{alpha_low_, 1.0 - alpha_low_}, {alpha_high_, 1.0 - alpha_high_}}};
}

std::pair<double, double> MixtureMatrix::forward(double p_d, double n_d) const {
  return {alpha_low_ * p_d + (1.0 - alpha_low_) * n_d,
          alpha_high_ * p_d + (1.0 - alpha_high_) * n_d};
}

std::pair<double, double> MixtureMatrix::inverse(double q_low_d, double q_high_d) const {
  const double a = alpha_low_;
  const double h = alpha_high_;
  const double g = h - a;
  return {((h - 1.0) * q_low_d + (1.0 - a) * q_high_d) / g, (h * q_low_d - a * q_high_d) / g};
}

std::pair<double, double> pure_measures_from_impure(double q_low_d, double q_high_d,
                                                    double alpha_low, double alpha_high) {
  return MixtureMatrix(alpha_low, alpha_high).inverse(q_low_d, q_high_d);
}

std::pair<double, double> alpha_from_delta(double delta_low, double delta_high) {
  if (!(delta_low < delta_high)) {
    std::ostringstream msg;
    msg << "delta_low (" << delta_low << ") must be below delta_high (" << delta_high << ")";
    throw InputError(msg.str());
  }
  if (!(delta_low >= 0.0 && delta_low < 0.5 && delta_high > 0.5 && delta_high <= 1.0)) {
    std::ostringstream msg;
    msg << "need 0 <= delta_low < 1/2 < delta_high <= 1, got (" << delta_low << ", "
        << delta_high << ")";
    throw RangeError(msg.str());
  }
  const double s = (2.0 * delta_high - 1.0) / (delta_high - delta_low);
  return {delta_low * s, (1.0 - delta_low) * s};
}

PrevalenceEstimate estimate_prevalence(const EmpiricalPopulation& test, const Region& region,
                                       double p_d, double n_d,
                                       const PrevalenceOptions& options) {
  if (!(std::abs(p_d - n_d) > options.separation)) {
    std::ostringstream msg;
    msg << "region separates the classes too weakly: |P_D - N_D| = " << std::abs(p_d - n_d)
        << " <= " << options.separation;
    throw ConditioningError(msg.str());
  }
  PrevalenceEstimate out;
  out.test_measure = empirical_measure(test, region.partition, region.label);
  out.p_d = p_d;
  out.n_d = n_d;
  out.test_size = test.size();
  out.q_raw = (out.test_measure - n_d) / (p_d - n_d);
  out.q_hat = out.q_raw;
  if (options.clamp) {
    out.q_hat = std::clamp(out.q_raw, 0.0, 1.0);
    out.clamped = out.q_hat != out.q_raw;
  }
  return out;
}

ImpurePrevalenceEstimate estimate_prevalence_impure(const EmpiricalPopulation& test,
                                                    const Region& region,
                                                    const EmpiricalPopulation& pop_low,
                                                    const EmpiricalPopulation& pop_high,
                                                    double alpha_low, double alpha_high,
                                                    const PrevalenceOptions& options) {
  const MixtureMatrix matrix(alpha_low, alpha_high);
  ImpurePrevalenceEstimate out;
  out.q_low_d = empirical_measure(pop_low, region.partition, region.label);
  out.q_high_d = empirical_measure(pop_high, region.partition, region.label);
  out.low_size = pop_low.size();
  out.high_size = pop_high.size();
  const auto [p_d, n_d] = matrix.inverse(out.q_low_d, out.q_high_d);
  out.estimate = estimate_prevalence(test, region, p_d, n_d, options);
  return out;
}

}  // namespace impure
