#pragma once

#include <stdexcept>
#include <string>

namespace topo {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Errors caused by the caller's input: bad expressions, malformed terms,
/// questions no kernel accepts. The CLI maps these to exit code 1.
class UserError : public Error {
 public:
  using Error::Error;
};

/// Errors raised while computing or talking to a kernel. Exit code 2.
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace topo
