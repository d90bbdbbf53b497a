#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xxz {

// Invalid physical or numerical input (maps to CLI exit status 1).
class ParameterError : public std::invalid_argument {
  public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A soliton kind was requested that the sign of c1 cannot support.
class RegimeMismatchError : public ParameterError {
  public:
    using ParameterError::ParameterError;
};

// Requested time step is above the explicit stability bound.
class StepSizeError : public ParameterError {
  public:
    StepSizeError(double dt, double bound);
    double dt;
    double bound;
};

// Two fields that must share a grid do not.
class GridMismatchError : public ParameterError {
  public:
    using ParameterError::ParameterError;
};

// Config text could not be parsed; line is 1-based (0 when not tied to a line).
class ConfigError : public ParameterError {
  public:
    ConfigError(const std::string& what, std::size_t line, std::string key = {});
    std::size_t line;
    std::string key;
};

class UnknownPresetError : public ParameterError {
  public:
    using ParameterError::ParameterError;
};

// Non-finite or runaway amplitudes during evaluation or integration (exit status 2).
class NumericBlowupError : public std::runtime_error {
  public:
    NumericBlowupError(const std::string& what, std::size_t index, double time, double position);
    std::size_t index;
    double time;
    double position;
};

// Peak/dip tracking on a profile that is flat to within 1e-12.
class DegenerateProfileError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InsufficientPointsError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// File content does not match the trajectory/report schema.
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace xxz
