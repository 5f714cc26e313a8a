#pragma once

#include <stdexcept>
#include <string>

namespace symgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported font file.
class FontParseError : public Error {
 public:
  using Error::Error;
};

/// Missing fonts, glyphs, or languages.
class FontError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, attribute name, or distribution parameter.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or serialization failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or inconsistent dataset container.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Per-sample failure during generation; carries the failing index.
class SampleError : public Error {
 public:
  SampleError(std::size_t index, const std::string& what)
      : Error("sample " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace symgen
