#pragma once

#include <stdexcept>
#include <string>

namespace pwqc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (too few responses, empty password, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

// Run directory or record files that cannot be read back.
class RunError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Timeouts, rate limits, 5xx. Eligible for retry.
class TransientError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

}  // namespace pwqc
