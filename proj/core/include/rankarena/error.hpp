// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rankarena {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or record.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A zero-norm or mismatched embedding vector.
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

/// Remote service failure after retries (maps to CLI exit code 3).
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Response body did not have the expected shape.
class DecodeError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// Cache lookup failed while the network backend is disabled.
class CacheMissError : public ProviderError {
 public:
  CacheMissError(std::string kind, std::string digest)
      : ProviderError("cache miss for " + kind + " key " + digest +
                      " (network disabled)"),
        kind_(std::move(kind)),
        digest_(std::move(digest)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string kind_;
  std::string digest_;
};

}  // namespace rankarena
