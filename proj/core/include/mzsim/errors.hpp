#pragma once

#include <stdexcept>
#include <string>

namespace mzsim {

// Base class for all domain errors thrown by the library.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested splitting ratio lies outside the visibility-limited band.
class UnreachableRatio : public SimError {
 public:
  using SimError::SimError;
};

// Requested phase needs a voltage outside the configured drive window.
class DriveRangeExceeded : public SimError {
 public:
  using SimError::SimError;
};

// Reference dropout: photodiode sum below the detection floor.
class SignalLost : public SimError {
 public:
  using SimError::SimError;
};

class SeriesTooShort : public SimError {
 public:
  using SimError::SimError;
};

// Averaging time is not an integer multiple of the sample period.
class InvalidTau : public SimError {
 public:
  using SimError::SimError;
};

class NoEdgeFound : public SimError {
 public:
  using SimError::SimError;
};

// Quadrature extraction asked to explain more width than is present.
class InconsistentBudget : public SimError {
 public:
  using SimError::SimError;
};

// A release ratio falls outside the coupler's extinction-limited band.
class InfeasibleSchedule : public SimError {
 public:
  using SimError::SimError;
};

class TooManyBins : public SimError {
 public:
  using SimError::SimError;
};

class DegenerateDistribution : public SimError {
 public:
  using SimError::SimError;
};

class ConfigInvalid : public SimError {
 public:
  using SimError::SimError;
};

}  // namespace mzsim
