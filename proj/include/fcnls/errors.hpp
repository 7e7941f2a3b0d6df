#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fcnls {

// All library failures carry a short machine-readable code next to the
// human-readable message, so callers (and tests) can branch on the cause
// without parsing prose.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace fcnls
