#pragma once

#include <functional>
#include <string>

namespace nlmem {

using WarningHandler = std::function<void(const std::string&)>;

/// Emits a warning through the installed handler (stderr by default).
void warn(const std::string& message);

/// Installs a new handler and returns the previous one.
auto set_warning_handler(WarningHandler handler) -> WarningHandler;

/// Restores the previous handler when it goes out of scope.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  auto operator=(const ScopedWarningHandler&) -> ScopedWarningHandler& = delete;

 private:
  WarningHandler previous_;
};

}  // namespace nlmem
