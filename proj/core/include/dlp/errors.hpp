#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlp {

/// Invalid input to an operation (non-positive price, inverted LTVs, shape mismatch...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition of the calling context was violated, e.g. a no-spread
/// estimator invoked with a rate spread.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite or otherwise unusable numbers produced during a roll-forward.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t path, std::size_t step)
      : std::runtime_error(what + " (path " + std::to_string(path) + ", step " +
                           std::to_string(step) + ")"),
        path_(path),
        step_(step) {}

  std::size_t path() const noexcept { return path_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t path_;
  std::size_t step_;
};

class TrainingDivergence : public std::runtime_error {
 public:
  TrainingDivergence(const std::string& what, std::size_t epoch)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// A metric could not be formed from the supplied samples.
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dlp
