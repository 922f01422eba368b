#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wimax60 {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape, length or index constraints violated.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class LengthOverflowError : public Error {
 public:
  using Error::Error;
};

class TruncatedInputError : public Error {
 public:
  using Error::Error;
};

class HcsMismatchError : public Error {
 public:
  HcsMismatchError(std::uint8_t expected, std::uint8_t actual);
  std::uint8_t expected() const noexcept { return expected_; }
  std::uint8_t actual() const noexcept { return actual_; }

 private:
  std::uint8_t expected_;
  std::uint8_t actual_;
};

class CrcMismatchError : public Error {
 public:
  CrcMismatchError(std::uint32_t expected, std::uint32_t actual);
  std::uint32_t expected() const noexcept { return expected_; }
  std::uint32_t actual() const noexcept { return actual_; }

 private:
  std::uint32_t expected_;
  std::uint32_t actual_;
};

class DegenerateSeedError : public Error {
 public:
  using Error::Error;
};

class ProfileError : public Error {
 public:
  using Error::Error;
};

// Capture file errors carry the byte offset where decoding failed.
class CaptureError : public Error {
 public:
  CaptureError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class BadMagicError : public CaptureError {
 public:
  using CaptureError::CaptureError;
};

class VersionMismatchError : public CaptureError {
 public:
  using CaptureError::CaptureError;
};

class TruncatedPayloadError : public CaptureError {
 public:
  using CaptureError::CaptureError;
};

// Configuration problems; line is 0 when not tied to a file line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wimax60
