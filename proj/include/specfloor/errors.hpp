#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace specfloor {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid scalar parameter (nonpositive range, spacing, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

// Mismatched dimensions or process counts.
class ShapeError : public Error {
public:
  using Error::Error;
};

class IndexError : public Error {
public:
  using Error::Error;
};

// A documented hypothesis of an operation does not hold for its input.
class ContractError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

// Rejection sampling ran out of attempts.
class SaturationError : public Error {
public:
  SaturationError(const std::string &what, std::size_t process)
      : Error(what), process_(process) {}
  std::size_t process() const { return process_; }

private:
  std::size_t process_;
};

// Duplicate point inside one process.
class ZeroDistanceError : public Error {
public:
  ZeroDistanceError(const std::string &what, std::size_t process)
      : Error(what), process_(process) {}
  std::size_t process() const { return process_; }

private:
  std::size_t process_;
};

enum class FailureStage { decay, spectral, min_distance, row_sum, envelope };

// Raised when a lower bound cannot be certified. Carries enough context for
// the report: which hypothesis broke and where.
class CertificationFailure : public Error {
public:
  CertificationFailure(FailureStage stage, const std::string &what,
                       std::vector<double> location = {})
      : Error(what), stage_(stage), location_(std::move(location)) {}

  FailureStage stage() const { return stage_; }
  // Frequency argmin for spectral failures, worst lag for decay failures.
  const std::vector<double> &location() const { return location_; }
  // Set when raised from a parameter-family certification.
  const std::vector<double> &theta() const { return theta_; }
  void set_theta(std::vector<double> theta) { theta_ = std::move(theta); }

private:
  FailureStage stage_;
  std::vector<double> location_;
  std::vector<double> theta_;
};

} // namespace specfloor
