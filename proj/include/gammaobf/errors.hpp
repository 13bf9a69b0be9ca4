//
// Copyright 2026 The gammaobf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GAMMAOBF_ERRORS_HPP_
#define GAMMAOBF_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gammaobf {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or parameter (non-positive scale, delta outside (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Ordinary-smooth bounds requested for a shape where they degenerate.
class UnsupportedShapeError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// The empirical measure evaluated exactly at a data point while the noise
// density is infinite there.
class UndefinedPointError : public Error {
 public:
  using Error::Error;
};

// Every noise weight underflowed to zero; the point lies outside the set
// where the empirical measure is defined.
class ExcludedPointError : public Error {
 public:
  using Error::Error;
};

// A convolution integral fell below the underflow floor.
class DegenerateSupportError : public Error {
 public:
  using Error::Error;
};

// No sign change of the calibration criterion inside the search range.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Quadrature, bracketing or minimization failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed or degenerate input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  // 1-based input line the error refers to; 0 when not line-specific.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gammaobf

#endif  // GAMMAOBF_ERRORS_HPP_
