#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace upf {

/// Invalid argument or parameter outside a function's domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A sector group priced with an all-zero bid vector.
class DegeneratePrice : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Every sector group is masked out of the stage.
class NoEligibleGroup : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Grid oracle refused an instance above its size guard.
class TooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative oracle ran out of sweeps before its gain fell below tolerance.
class MaxItersError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario document. `line()` is 0 when the location is unknown.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Well-formed scenario that breaks a model invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace upf
