#ifndef COLLGRAM_ERROR_HPP
#define COLLGRAM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collgram {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Index file load failures. Each failure mode has its own type so callers
// can tell a stale file from a damaged one.
class IndexLoadError : public Error {
 public:
  using Error::Error;
};
class IndexFormatError : public IndexLoadError {
 public:
  using IndexLoadError::IndexLoadError;
};
class IndexVersionError : public IndexLoadError {
 public:
  using IndexLoadError::IndexLoadError;
};
class IndexChecksumError : public IndexLoadError {
 public:
  using IndexLoadError::IndexLoadError;
};
class IndexTruncatedError : public IndexLoadError {
 public:
  using IndexLoadError::IndexLoadError;
};

class UndefinedBasisError : public Error {
 public:
  using Error::Error;
};
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};
class UndefinedSignError : public Error {
 public:
  using Error::Error;
};
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace collgram

#endif  // COLLGRAM_ERROR_HPP
