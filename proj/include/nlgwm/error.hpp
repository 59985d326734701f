#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlgwm {

// Base of every error thrown by the library. The CLI maps any Error to exit
// code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Malformed input at a known 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t source_lines, std::size_t target_lines)
      : Error("parallel files are not aligned: " + std::to_string(source_lines) +
              " source lines vs " + std::to_string(target_lines) + " target lines"),
        source_lines_(source_lines),
        target_lines_(target_lines) {}
  std::size_t source_lines() const { return source_lines_; }
  std::size_t target_lines() const { return target_lines_; }

 private:
  std::size_t source_lines_;
  std::size_t target_lines_;
};

// Watermark generation ran out of viable draws.
class ExhaustionError : public Error {
 public:
  ExhaustionError(std::size_t produced, std::size_t requested)
      : Error("watermark generation exhausted: produced " + std::to_string(produced) +
              " of " + std::to_string(requested) + " distinct watermarks"),
        produced_(produced) {}
  std::size_t produced() const { return produced_; }

 private:
  std::size_t produced_;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

// Oracle-side failures. TransportError is the only retryable one.
class OracleError : public Error {
 public:
  using Error::Error;
};

class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
};

class ProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};

class StatusError : public OracleError {
 public:
  StatusError(int status, const std::string& body)
      : OracleError("oracle returned HTTP " + std::to_string(status) + ": " + body),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace nlgwm
