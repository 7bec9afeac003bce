// Error types shared across the reconstruction engine. The CLI maps these
// onto exit codes: FormatError -> 2, ConfigError -> 3, IoError -> 4.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace voxrec {

// Malformed capture data (binary or text). Carries the byte offset or the
// 1-based line number where parsing failed, when known.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}

  static FormatError at_offset(const std::string& what, std::size_t offset) {
    FormatError e(what + " (at byte " + std::to_string(offset) + ")");
    e.byte_offset = offset;
    return e;
  }

  static FormatError at_line(const std::string& what, int line) {
    FormatError e(what + " (at line " + std::to_string(line) + ")");
    e.line = line;
    return e;
  }

  std::optional<std::size_t> byte_offset;
  std::optional<int> line;
};

// Invalid configuration: bad config file, incompatible option combination,
// missing required setting.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure (missing file, unwritable directory).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Dimension mismatch between frames / plane stacks / parallel arrays.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Value outside an operation's domain (non-finite input, depth behind the
// camera, sample outside [0,1], invalid weight stack).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace voxrec
