#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msaprobe {

/// Input violates a documented invariant (unsorted times, dimension mismatch,
/// refused configuration). The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed line in a text input.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Malformed binary input; carries the byte offset where decoding failed.
class FormatError : public ValidationError {
 public:
  FormatError(std::uint64_t offset, const std::string& what)
      : ValidationError("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace msaprobe
