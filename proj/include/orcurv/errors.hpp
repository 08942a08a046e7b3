#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace orc {

/// Argument outside the chart or mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scale parameter (radius, delta, epsilon) too large or non-positive.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A required shortest path does not exist.
class UnreachableError : public std::runtime_error {
 public:
  UnreachableError(std::int64_t from, std::int64_t to)
      : std::runtime_error("node " + std::to_string(to) + " is unreachable from node " +
                           std::to_string(from)),
        from_(from),
        to_(to) {}
  std::int64_t from() const noexcept { return from_; }
  std::int64_t to() const noexcept { return to_; }

 private:
  std::int64_t from_;
  std::int64_t to_;
};

/// Probe nodes cannot be compared (isolated or mutually unreachable).
class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested edge is not present in the graph.
class MissingEdgeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invariant broken inside the library (e.g. runaway rejection loop).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace orc
