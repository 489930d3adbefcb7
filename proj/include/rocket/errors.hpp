#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rocket {

/// Invalid configuration or command-line usage.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a numerical routine.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Failed or degenerate numerical computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel whose effective span does not fit a series, even with its padding.
class IncompatibleKernelError : public DataError {
 public:
  IncompatibleKernelError(std::size_t series_index, std::size_t kernel_index, const std::string& what)
      : DataError(what), series_index_(series_index), kernel_index_(kernel_index) {}

  std::size_t series_index() const noexcept { return series_index_; }
  std::size_t kernel_index() const noexcept { return kernel_index_; }

 private:
  std::size_t series_index_;
  std::size_t kernel_index_;
};

}  // namespace rocket
