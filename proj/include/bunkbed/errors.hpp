#pragma once

#include <stdexcept>
#include <string>

namespace bunkbed {

/// Thrown when an input would exceed one of the documented enumeration or
/// size guards (e.g. more than 2^24 configurations, minor test on more than
/// 10 vertices). The message names the guard.
struct guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by the instance-file parser. Carries the 1-based offending line.
struct parse_error : std::runtime_error {
  int line;
  parse_error(int line_no, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
        line(line_no) {}
};

}  // namespace bunkbed
