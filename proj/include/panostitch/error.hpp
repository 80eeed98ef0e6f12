#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace panostitch {

// Root of every error the library throws. Callers that only care about
// "something in panostitch failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed PTSR payload. field() names the offending header field
// ("magic", "version", "dtype", "rank", "dims", "payload").
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class NumericalDomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

class DegenerateEmbeddingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure talking to a backend (connection refused, timeout).
// Retried by the remote client up to its retry budget.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Backend answered, but not according to the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Backend answered with values we refuse to blend (NaN/Inf).
class DataError : public Error {
 public:
  using Error::Error;
};

// A denoise request failed inside a sampling step. Carries where it happened
// so a run can report "step 37, window 4" instead of a bare transport message.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::optional<int> step,
               std::optional<int> window, std::optional<int> stitch_pass)
      : Error(what), step_(step), window_(window), stitch_pass_(stitch_pass) {}

  std::optional<int> step() const noexcept { return step_; }
  std::optional<int> window() const noexcept { return window_; }
  std::optional<int> stitch_pass() const noexcept { return stitch_pass_; }

 private:
  std::optional<int> step_;
  std::optional<int> window_;
  std::optional<int> stitch_pass_;
};

}  // namespace panostitch
