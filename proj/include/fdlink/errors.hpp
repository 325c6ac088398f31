#ifndef FDLINK_ERRORS_HPP
#define FDLINK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fdlink {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed content in an input file (pattern CSV, touchstone, ...).
/// Messages carry "path:line:" prefixes where a line is known.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A scenario configuration that fails validation. Messages name the
/// offending field path.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (non-convergence, non-finite intermediate).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fdlink

#endif
