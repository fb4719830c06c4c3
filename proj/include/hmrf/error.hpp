#ifndef HMRF_ERROR_HPP
#define HMRF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hmrf {

/// Coarse error classes; the CLI maps each to its own exit status.
enum class ErrorKind {
  io,         ///< file missing, unreadable or unwritable
  format,     ///< malformed file contents
  dimension,  ///< inputs whose grid sizes disagree
  config,     ///< invalid parameter or precondition violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io:
      return 2;
    case ErrorKind::format:
      return 3;
    case ErrorKind::dimension:
      return 4;
    case ErrorKind::config:
      return 5;
  }
  return 1;
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io:
      return "io";
    case ErrorKind::format:
      return "format";
    case ErrorKind::dimension:
      return "dimension";
    case ErrorKind::config:
      return "config";
  }
  return "unknown";
}

}  // namespace hmrf

#endif  // HMRF_ERROR_HPP
