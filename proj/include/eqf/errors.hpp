#pragma once

#include <stdexcept>
#include <string>

namespace eqf {

/// Array shapes or dimensions that do not match.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs outside an operation's domain (degenerate planes, off-equator points,
/// points outside a chart, singular matrices).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A tensor or quadratic form that should be positive is not.
class PositivityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A sampled linear system came out rank deficient.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqf
