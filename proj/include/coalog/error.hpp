#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace coalog {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed functor, formula, model or proof text. `position` is a 0-based
/// byte offset into the parsed text when known.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position = npos)
      : Error(position == npos ? what : what + " at position " + std::to_string(position)),
        position_(position) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// A formula (or TValue) does not fit the layer structure of its functor.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// An enumeration would exceed the configured cardinality bound.
class ResourceLimit : public Error {
public:
  ResourceLimit(const std::string& what, std::uint64_t projected)
      : Error(what + ": projected cardinality " + describe(projected) + " exceeds limit"),
        projected_(projected) {}

  std::uint64_t projected() const { return projected_; }

  static std::string describe(std::uint64_t card) {
    return card == UINT64_MAX ? std::string(">= 2^64") : std::to_string(card);
  }

private:
  std::uint64_t projected_;
};

/// A value was constructed in violation of a type invariant.
class InvariantViolation : public Error {
public:
  using Error::Error;
};

/// Raised by h_generic when one of the finite isomorphisms fails to invert.
/// Never expected; it signals an implementation bug.
class NotInvertible : public Error {
public:
  using Error::Error;
};

// Global cardinality bound for enumerated sets. Default 2^20; the CLI sets it
// once at startup from --limit or COALOG_LIMIT.
std::uint64_t resource_limit();
void set_resource_limit(std::uint64_t limit);

/// Throws ResourceLimit when `card` exceeds the current bound.
void check_card(std::uint64_t card, const std::string& what);

class ScopedLimit {
public:
  explicit ScopedLimit(std::uint64_t limit) : saved_(resource_limit()) { set_resource_limit(limit); }
  ~ScopedLimit() { set_resource_limit(saved_); }
  ScopedLimit(const ScopedLimit&) = delete;
  ScopedLimit& operator=(const ScopedLimit&) = delete;

private:
  std::uint64_t saved_;
};

// Saturating arithmetic for cardinalities; UINT64_MAX stands for "too big".
std::uint64_t sat_add(std::uint64_t a, std::uint64_t b);
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t sat_pow2(std::uint64_t exponent);

} // namespace coalog
