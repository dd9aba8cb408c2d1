#include "nlmem/log.hpp"

#include "nlmem/error.hpp"

#include <iostream>
#include <mutex>

namespace nlmem {

namespace {

std::mutex handler_mutex;

auto default_handler() -> WarningHandler {
  return [](const std::string& message) { std::cerr << "warning: " << message << '\n'; };
}

auto handler_slot() -> WarningHandler& {
  static WarningHandler handler = default_handler();
  return handler;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex);
  if (auto& handler = handler_slot()) {
    handler(message);
  }
}

auto set_warning_handler(WarningHandler handler) -> WarningHandler {
  std::lock_guard lock(handler_mutex);
  auto previous = std::move(handler_slot());
  handler_slot() = handler ? std::move(handler) : default_handler();
  return previous;
}

auto to_string(ErrorKind kind) -> const char* {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_model: return "invalid-model";
    case ErrorKind::numerical_blowup: return "numerical-blowup";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::boundary_contact: return "boundary-contact";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

}  // namespace nlmem
