// Copyright 2026 The Metakernel Authors
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

namespace metakernel {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the mathematical domain of an operation.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// Parameters too close to a singularity of tan (or another pole).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numerical procedure failed to converge or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File or stream failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace metakernel
