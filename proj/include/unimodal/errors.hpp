// Copyright (c) 2026, The unimodal authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unimodal {

/// Caller violated an operation precondition (shape mismatch, label out of range, ...).
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A value fell outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed input file. line() is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input whose contents break an invariant (e.g. label outside 1..c).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Experiment configuration does not match the schema; field() names the offending key.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Non-finite loss or gradient during optimization.
class TrainingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace unimodal
