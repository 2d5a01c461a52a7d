#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hooke {

struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Trial wavefunction that cannot be normalized on the grid.
struct InvalidTrialError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

class NumericFailureError : public std::runtime_error {
 public:
  NumericFailureError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DegradedBasisError : public std::runtime_error {
 public:
  DegradedBasisError(const std::string& what, std::size_t i, std::size_t j, double overlap)
      : std::runtime_error(what), i_(i), j_(j), overlap_(overlap) {}
  std::pair<std::size_t, std::size_t> pair() const noexcept { return {i_, j_}; }
  double overlap() const noexcept { return overlap_; }

 private:
  std::size_t i_, j_;
  double overlap_;
};

class SearchFailureError : public std::runtime_error {
 public:
  SearchFailureError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

class NormalizationError : public std::runtime_error {
 public:
  NormalizationError(const std::string& what, double deviation)
      : std::runtime_error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

class NonPhysicalKernelError : public std::runtime_error {
 public:
  NonPhysicalKernelError(const std::string& what, double eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

struct DegenerateDenominatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class AlignmentError : public std::runtime_error {
 public:
  AlignmentError(const std::string& what, std::vector<std::string> methods)
      : std::runtime_error(what), methods_(std::move(methods)) {}
  const std::vector<std::string>& methods() const noexcept { return methods_; }

 private:
  std::vector<std::string> methods_;
};

}  // namespace hooke
