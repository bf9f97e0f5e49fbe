#pragma once

#include <stdexcept>
#include <string>

namespace frz {

// Common base so callers can catch everything from this library at once.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Precondition violation on a mathematical domain (bad argument range,
// unusable Lyapunov exponents, divergent generator integrand, ...).
struct domain_error : error {
  explicit domain_error(const std::string& msg) : error(msg) {}
};

// Malformed or inconsistent user-supplied configuration (CLI or JSON).
struct config_error : error {
  explicit config_error(const std::string& msg) : error(msg) {}
};

// A numerical routine could not reach its accuracy target. The message names
// the routine and, for quadrature failures, the worst subinterval.
struct numeric_error : error {
  explicit numeric_error(const std::string& msg) : error(msg) {}
};

// A statistical routine was asked for an estimate its input cannot support
// (too few samples, empty tail window, ...).
struct stats_error : error {
  explicit stats_error(const std::string& msg) : error(msg) {}
};

// Filesystem I/O failure while writing results.
struct io_error : error {
  explicit io_error(const std::string& msg) : error(msg) {}
};

// Time ordering violation (stepping a simulation backwards).
struct ordering_error : error {
  explicit ordering_error(const std::string& msg) : error(msg) {}
};

}  // namespace frz
