#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stereodecomp {

// Bad data fed to an operation (dimension mismatch, empty input, ...).
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Inconsistent or out-of-range configuration.
class InvalidConfig : public std::runtime_error {
 public:
  explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file content; carries the byte offset of the first bad byte.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset(byte_offset) {}
  std::size_t byte_offset;
};

// Integer overflow in complexity accounting.
class OverflowError : public std::runtime_error {
 public:
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stereodecomp
