#ifndef IMPURE_ERROR_HPP
#define IMPURE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace impure {

/// Broad error classes. The CLI maps each class to a distinct exit code.
enum class ErrorKind {
  input,              ///< malformed or out-of-contract arguments
  range,              ///< value outside the admissible range of a map
  parse,              ///< unreadable data file
  degenerate_point,   ///< both conditional densities vanish at a point
  numeric,            ///< quadrature / sampler failure, non-finite values
  linear_dependence,  ///< alpha_low == alpha_high (or statistically so)
  disjointness,       ///< supports are not partially disjoint
  conditioning,       ///< region too weakly separating to invert
  region_choice,      ///< asymptotic regions do not separate the classes
  io,                 ///< filesystem failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define IMPURE_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(Kind, what) {}    \
  };

IMPURE_DEFINE_ERROR(InputError, ErrorKind::input)
IMPURE_DEFINE_ERROR(RangeError, ErrorKind::range)
IMPURE_DEFINE_ERROR(ParseError, ErrorKind::parse)
IMPURE_DEFINE_ERROR(DegeneratePointError, ErrorKind::degenerate_point)
IMPURE_DEFINE_ERROR(NumericError, ErrorKind::numeric)
IMPURE_DEFINE_ERROR(LinearDependenceError, ErrorKind::linear_dependence)
IMPURE_DEFINE_ERROR(DisjointnessError, ErrorKind::disjointness)
IMPURE_DEFINE_ERROR(ConditioningError, ErrorKind::conditioning)
IMPURE_DEFINE_ERROR(RegionChoiceError, ErrorKind::region_choice)
IMPURE_DEFINE_ERROR(IoError, ErrorKind::io)

#undef IMPURE_DEFINE_ERROR

}  // namespace impure

#endif  // IMPURE_ERROR_HPP
