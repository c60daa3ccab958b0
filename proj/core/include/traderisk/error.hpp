#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace traderisk {

/// Malformed or inconsistent input data. Carries the file and 1-based line
/// when the problem originates in a parsed file (line 0 = whole file).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& message)
      : std::runtime_error(message) {}
  InputError(std::string file, std::size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_ = 0;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_estimate,
                   double residual, std::size_t iterations)
      : std::runtime_error(what),
        last_estimate_(last_estimate),
        residual_(residual),
        iterations_(iterations) {}

  double last_estimate() const noexcept { return last_estimate_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double last_estimate_;
  double residual_;
  std::size_t iterations_;
};

}  // namespace traderisk
