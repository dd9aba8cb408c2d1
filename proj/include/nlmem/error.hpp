#pragma once

#include <stdexcept>
#include <string>

namespace nlmem {

enum class ErrorKind {
  invalid_parameter,
  invalid_model,
  numerical_blowup,
  shape_mismatch,
  boundary_contact,
  config,
};

auto to_string(ErrorKind kind) -> const char*;

/// Exception thrown by every module of the library. The kind lets callers
/// (the CLI, sweeps) decide whether a failure is fatal for a whole batch.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nlmem
