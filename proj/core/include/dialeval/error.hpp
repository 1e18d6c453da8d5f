// Copyright 2026 The dialeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dialeval {

/// Base of every error the library throws. The CLI maps subclasses to exit
/// codes (2 config/data, 3 transport/protocol, 4 insufficient data).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: invalid scorer config, unknown scheme string, missing
/// scorer for a label scheme that needs one.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invariant-violating input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Backend could not be reached after all retry attempts.
class TransportError : public Error {
 public:
  TransportError(std::string endpoint, int attempts, const std::string& detail)
      : Error("backend " + endpoint + " unreachable after " +
              std::to_string(attempts) + " attempt(s): " + detail),
        endpoint_(std::move(endpoint)),
        attempts_(attempts) {}
  TransportError(const std::string& prefix, const TransportError& inner)
      : Error(prefix + inner.what()),
        endpoint_(inner.endpoint_),
        attempts_(inner.attempts_) {}

  const std::string& endpoint() const noexcept { return endpoint_; }
  int attempts() const noexcept { return attempts_; }

 private:
  std::string endpoint_;
  int attempts_;
};

/// Backend answered, but the answer breaks the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Fewer usable pairs than a statistic needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Correlation is undefined because one side has zero variance.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

}  // namespace dialeval
