#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace homophily {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data. Carries the 1-based line number when known.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input that violates a contract (duplicate id, negative count,
/// edge endpoint outside the user universe, unlabeled target, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Lookup of a user or attribute record that does not exist.
class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// Synthetic dataset generation cannot satisfy the requested configuration.
class GenerationError : public Error {
  public:
    using Error::Error;
};

} // namespace homophily
