#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sphsparse {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or grid dimensions that do not agree with the operator.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid band-limits, wavelet parameters or experiment settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed map/config files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Harmonic band-limit L: all coefficients with ell >= L vanish.
class BandLimit {
 public:
  explicit BandLimit(int L) : value_(L) {
    if (L < 1) throw ConfigError("band-limit must be >= 1, got " + std::to_string(L));
  }
  [[nodiscard]] int value() const noexcept { return value_; }
  friend bool operator==(BandLimit, BandLimit) = default;

 private:
  int value_;
};

inline void require_size(Eigen::Index actual, Eigen::Index expected, const char* what) {
  if (actual != expected) {
    throw SizeError(std::string(what) + ": expected length " + std::to_string(expected) +
                    ", got " + std::to_string(actual));
  }
}

}  // namespace sphsparse
