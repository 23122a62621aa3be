// Copyright 2026 The smartspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace smartspin {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented invariant of an input object does not hold (e.g. a
/// supposedly Hermitian matrix is not).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Bad argument values: non-positive step sizes, NaNs from a model, ...
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-convergence, norm drift).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or out-of-range configuration. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Gate calibration is missing or could not be established.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Eigenstates could not be matched to product-basis labels.
class LabelingError : public Error {
 public:
  using Error::Error;
};

}  // namespace smartspin
