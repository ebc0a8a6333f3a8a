#pragma once

#include <stdexcept>
#include <string>

namespace symdyn {

// Exit-code conventions used by the CLI:
//   2 validation error, 3 resource-cap error, 4 precondition unmet (recoverable).

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResourceCapError : std::runtime_error {
  explicit ResourceCapError(const std::string& msg) : std::runtime_error(msg) {}
};

// A precondition that can be retried with different parameters
// (e.g. a good-point search that needs a larger window).
struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace symdyn
