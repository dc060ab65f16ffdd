#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two relations or maps were combined over carriers that do not line up.
class CarrierMismatch : public Error {
 public:
  using Error::Error;
};

/// A materialized carrier or search space would exceed the configured bound.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t cardinality)
      : Error(what + " (cardinality " + std::to_string(cardinality) + ")"),
        cardinality_(cardinality) {}

  std::size_t cardinality() const noexcept { return cardinality_; }

 private:
  std::size_t cardinality_;
};

/// Malformed textual or JSON input. `location` is a 1-based line or byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what + " at " + std::to_string(location)), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

/// A relator or functor description is ill-formed or violates a precondition.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed; indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace relsim
