#pragma once

#include <stdexcept>
#include <string>

namespace proxmc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or mismatched inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the support of the posterior.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Unknown key (country, column, ...).
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Requested window not covered by the available data.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

/// Nothing to summarize (no trace files or no stored samples).
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace proxmc
