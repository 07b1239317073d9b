#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace splatsim {

// Broad failure classes. The CLI maps these onto exit codes and the
// machine-readable error line.
enum class ErrorCategory {
  invalid_argument,
  not_found,
  io,
  parse,
  convergence,
  planning,
  generation,
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// Malformed file content. `location` is a 1-based line for text formats or
// a byte offset for binary payloads.
class ParseError : public Error {
 public:
  enum class Unit { line, byte };

  ParseError(const std::string& path, Unit unit, std::size_t location, const std::string& what);

  const std::string& path() const { return path_; }
  Unit unit() const { return unit_; }
  std::size_t location() const { return location_; }

 private:
  std::string path_;
  Unit unit_;
  std::size_t location_;
};

inline Error invalid_argument(const std::string& message) {
  return Error(ErrorCategory::invalid_argument, message);
}

inline Error io_error(const std::string& message) { return Error(ErrorCategory::io, message); }

}  // namespace splatsim
