#ifndef IMPURE_CLI_HPP
#define IMPURE_CLI_HPP

#include <iosfwd>

#include "json.hpp"

#include "impure/error.hpp"

namespace impure::cli {

/// 0 success; 2 input/range/parse/region choice; 3 numeric, degenerate,
/// disjointness, conditioning; 4 linear dependence; 5 I/O; 1 anything else.
int exit_code(ErrorKind kind);

/// Configuration used when a key is absent from the config file.
nlohmann::json default_config();

/// Entry point of the `impure` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace impure::cli

#endif  // IMPURE_CLI_HPP
