// Copyright 2026 The evopop Authors.
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

#ifndef EVOPOP_ERRORS_H_
#define EVOPOP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace evopop {

// Base class for every error raised by the library. The CLI maps
// ConfigError to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scalar parameter lies outside its documented domain (s <= 1, f >= 0,
// negative look-ahead, non-positive learning rate, ...).
class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

// Matrix or vector dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN or infinity where a finite value is required.
class NumericInputError : public Error {
 public:
  using Error::Error;
};

// Odd or too-small population.
class PopulationSizeError : public Error {
 public:
  using Error::Error;
};

// Rule-mix fractions do not sum to one.
class MixError : public Error {
 public:
  using Error::Error;
};

// Explicit-Euler replicator step left the simplex.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace evopop

#endif  // EVOPOP_ERRORS_H_
