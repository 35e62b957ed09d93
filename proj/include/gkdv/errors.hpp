#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gkdv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: length mismatch, out-of-range parameter, bad order.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Data that should be consistent is not (e.g. broken Hermitian symmetry).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A requested allocation would exceed the configured cap.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t required)
      : Error(what + " (required " + std::to_string(required) + " points)"),
        required_(required) {}
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// sigma exceeds what the field's Fourier decay supports.
class AnalyticityExceeded : public Error {
 public:
  using Error::Error;
};

/// Too few usable modes to fit a decay rate.
class InsufficientResolution : public Error {
 public:
  using Error::Error;
};

/// A probe ensemble produced no usable ratios.
class ProbeInvalid : public Error {
 public:
  using Error::Error;
};

/// Validation failure carrying every problem found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& p : items) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace gkdv
