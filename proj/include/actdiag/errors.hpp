#pragma once

#include <stdexcept>
#include <string>

namespace actdiag {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A diagram violates a construction invariant (dangling endpoint, duplicate id, ...).
class DiagramError : public Error {
 public:
  using Error::Error;
};

class NodeNotFound : public Error {
 public:
  explicit NodeNotFound(const std::string& id)
      : Error("node not found: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// An operation was called on input that does not meet its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace actdiag
