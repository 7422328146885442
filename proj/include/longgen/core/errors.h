// Copyright 2026 The longgen Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace longgen {

// Input or configuration rejected before any work was done. The CLI maps
// these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Weight archive header does not match the tensor inventory a config needs.
class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NumericInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ManifestError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failures discovered while doing the work. The CLI maps these to exit code 1.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptArchiveError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class IoError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class InfeasibleError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class JudgeError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace longgen
